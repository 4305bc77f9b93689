#pragma once

#include <cstdint>

#include "refsynth/vec3.hpp"

namespace refsynth {

enum class SamplerKind {
    LowDiscrepancy,  // Halton radical inverses, Cranley-Patterson rotated per (seed, pixel, dimension)
    Independent,     // hashed uniform values; used as a plain Monte Carlo reference
};

/// 64-bit finalizer from splitmix64.
constexpr std::uint64_t mix64(std::uint64_t z)
{
    z += 0x9e3779b97f4a7c15ull;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

constexpr std::uint64_t hash_combine(std::uint64_t a, std::uint64_t b)
{
    return mix64(a ^ (mix64(b) + 0x632be59bd9b4e019ull + (a << 6) + (a >> 2)));
}

/// Maps the top 53 bits of `bits` to [0,1).
constexpr double to_unit_interval(std::uint64_t bits)
{
    return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

/// Radical inverse of `index` in the given prime base. Result in [0,1).
double radical_inverse(std::uint32_t base, std::uint64_t index);

/// Number of distinct prime bases before dimensions wrap around.
inline constexpr std::uint32_t kMaxPrimeDimensions = 32;
std::uint32_t prime_for_dimension(std::uint32_t dimension);

/// Deterministic sample value for the coordinate (seed, pixel, sample, dimension).
///
/// With `scrambled == false` the low-discrepancy kind returns the bare radical inverse of
/// `sample` in the dimension's prime base (dimension 0 is base 2).
double sample_value(SamplerKind kind, std::uint64_t seed, std::uint64_t pixel, std::uint64_t sample,
                    std::uint32_t dimension, bool scrambled = true);

/// Cursor over the sample dimensions of one (pixel, sample) pair.
///
/// Copies are independent; a copy continues from the same dimension. The object carries no
/// shared state, so streams can be created on any thread.
class SampleStream {
public:
    SampleStream(std::uint64_t seed, std::uint64_t pixel, std::uint64_t sample,
                 SamplerKind kind = SamplerKind::LowDiscrepancy, bool scrambled = true)
        : seed_(seed), pixel_(pixel), sample_(sample), kind_(kind), scrambled_(scrambled)
    {}

    /// Value at the current dimension; advances to the next dimension.
    double next() { return sample_value(kind_, seed_, pixel_, sample_, dimension_++, scrambled_); }
    Vec2 next_2d()
    {
        const double u = next();
        return {u, next()};
    }

    void skip_to(std::uint32_t dimension) { dimension_ = dimension; }

    std::uint64_t seed() const { return seed_; }
    std::uint64_t pixel() const { return pixel_; }
    std::uint64_t sample() const { return sample_; }
    std::uint32_t dimension() const { return dimension_; }

private:
    std::uint64_t seed_;
    std::uint64_t pixel_;
    std::uint64_t sample_;
    SamplerKind kind_;
    bool scrambled_;
    std::uint32_t dimension_ = 0;
};

/// Shirley-Chiu concentric map from [0,1)^2 to the unit disk. (0.5, 0.5) maps to the center.
Vec2 concentric_disk(Vec2 u);

/// Cosine-weighted direction on the hemisphere around unit `n`.
Vec3 cosine_hemisphere(const Vec3 &n, Vec2 u);

}  // namespace refsynth
