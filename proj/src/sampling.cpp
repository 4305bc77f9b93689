#include "refsynth/sampling.hpp"

#include <array>
#include <cmath>

namespace refsynth {

namespace {

constexpr std::array<std::uint32_t, kMaxPrimeDimensions> kPrimes = {
    2,  3,  5,  7,  11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53,
    59, 61, 67, 71, 73, 79, 83, 89, 97, 101, 103, 107, 109, 113, 127, 131};

constexpr double kOneMinusEpsilon = 0x1.fffffffffffffp-1;

constexpr std::uint64_t reverse_bits(std::uint64_t v)
{
    v = ((v >> 1) & 0x5555555555555555ull) | ((v & 0x5555555555555555ull) << 1);
    v = ((v >> 2) & 0x3333333333333333ull) | ((v & 0x3333333333333333ull) << 2);
    v = ((v >> 4) & 0x0f0f0f0f0f0f0f0full) | ((v & 0x0f0f0f0f0f0f0f0full) << 4);
    v = ((v >> 8) & 0x00ff00ff00ff00ffull) | ((v & 0x00ff00ff00ff00ffull) << 8);
    v = ((v >> 16) & 0x0000ffff0000ffffull) | ((v & 0x0000ffff0000ffffull) << 16);
    return (v >> 32) | (v << 32);
}

}  // namespace

double radical_inverse(std::uint32_t base, std::uint64_t index)
{
    if (base == 2) {
        return std::min(to_unit_interval(reverse_bits(index)), kOneMinusEpsilon);
    }
    const double inv_base = 1.0 / base;
    std::uint64_t reversed_digits = 0;
    double inv_base_n = 1.0;
    while (index) {
        const std::uint64_t next = index / base;
        const std::uint64_t digit = index - next * base;
        reversed_digits = reversed_digits * base + digit;
        inv_base_n *= inv_base;
        index = next;
    }
    return std::min(static_cast<double>(reversed_digits) * inv_base_n, kOneMinusEpsilon);
}

std::uint32_t prime_for_dimension(std::uint32_t dimension)
{
    return kPrimes[dimension % kMaxPrimeDimensions];
}

double sample_value(SamplerKind kind, std::uint64_t seed, std::uint64_t pixel, std::uint64_t sample,
                    std::uint32_t dimension, bool scrambled)
{
    const std::uint64_t key = hash_combine(hash_combine(mix64(seed), pixel), dimension);
    if (kind == SamplerKind::Independent)
        return to_unit_interval(hash_combine(key, sample));

    const double base_value = radical_inverse(prime_for_dimension(dimension), sample);
    if (!scrambled)
        return base_value;
    // Dimensions past the prime table reuse a base; the rotation decorrelates them.
    double v = base_value + to_unit_interval(key);
    if (v >= 1.0)
        v -= 1.0;
    return std::min(v, kOneMinusEpsilon);
}

Vec2 concentric_disk(Vec2 u)
{
    const double ox = 2.0 * u.x - 1.0;
    const double oy = 2.0 * u.y - 1.0;
    if (ox == 0.0 && oy == 0.0)
        return {0.0, 0.0};
    double r, theta;
    if (std::abs(ox) > std::abs(oy)) {
        r = ox;
        theta = (kPi / 4.0) * (oy / ox);
    } else {
        r = oy;
        theta = (kPi / 2.0) - (kPi / 4.0) * (ox / oy);
    }
    return {r * std::cos(theta), r * std::sin(theta)};
}

Vec3 cosine_hemisphere(const Vec3 &n, Vec2 u)
{
    const Vec2 d = concentric_disk(u);
    const double z = std::sqrt(std::max(0.0, 1.0 - d.x * d.x - d.y * d.y));
    // Orthonormal basis (Duff et al. 2017).
    const double sign = std::copysign(1.0, n.z);
    const double a = -1.0 / (sign + n.z);
    const double b = n.x * n.y * a;
    const Vec3 t(1.0 + sign * n.x * n.x * a, sign * b, -sign * n.x);
    const Vec3 s(b, sign + n.y * n.y * a, -n.y);
    return normalize(t * d.x + s * d.y + n * z);
}

}  // namespace refsynth
