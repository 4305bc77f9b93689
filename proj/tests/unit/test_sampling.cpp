#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "fixtures.hpp"
#include "refsynth/directions.hpp"
#include "refsynth/sampling.hpp"

using namespace refsynth;

namespace {

// Independent oracle: write the index in base b, mirror the digit string about the radix point.
double radical_inverse_oracle(unsigned base, unsigned long long index)
{
    std::vector<unsigned> digits;
    while (index) {
        digits.push_back(static_cast<unsigned>(index % base));
        index /= base;
    }
    double value = 0.0, scale = 1.0 / base;
    for (unsigned d : digits) {
        value += d * scale;
        scale /= base;
    }
    return value;
}

double star_discrepancy(std::vector<double> xs)
{
    std::sort(xs.begin(), xs.end());
    const double n = static_cast<double>(xs.size());
    double d = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i)
        d = std::max({d, (i + 1) / n - xs[i], xs[i] - i / n});
    return d;
}

double angle_between(const Vec3 &a, const Vec3 &b)
{
    return std::acos(std::clamp(dot(normalize(a), normalize(b)), -1.0, 1.0));
}

}  // namespace

TEST_CASE("base-2 radical inverse matches bit reversal")
{
    CHECK(radical_inverse(2, 0) == 0.0);
    CHECK(radical_inverse(2, 1) == 0.5);
    CHECK(radical_inverse(2, 2) == 0.25);
    CHECK(radical_inverse(2, 3) == 0.75);
    for (unsigned base : {2u, 3u, 5u, 7u, 131u})
        for (unsigned long long i = 0; i < 2000; i += 7)
            CHECK(radical_inverse(base, i) == doctest::Approx(radical_inverse_oracle(base, i)).epsilon(1e-15));
}

TEST_CASE("unscrambled stream dimension 0 is the base-2 sequence")
{
    for (std::uint64_t s = 0; s < 4; ++s) {
        SampleStream stream(123, 7, s, SamplerKind::LowDiscrepancy, false);
        CHECK(stream.next() == radical_inverse_oracle(2, s));
    }
}

TEST_CASE("sample values are deterministic and lie in [0,1)")
{
    for (auto kind : {SamplerKind::LowDiscrepancy, SamplerKind::Independent}) {
        for (std::uint32_t dim = 0; dim < 40; ++dim) {
            for (std::uint64_t s = 0; s < 64; ++s) {
                const double a = sample_value(kind, 99, 1234, s, dim);
                const double b = sample_value(kind, 99, 1234, s, dim);
                CHECK(a == b);
                CHECK(a >= 0.0);
                CHECK(a < 1.0);
            }
        }
    }
    SampleStream a(5, 6, 7), b(5, 6, 7);
    for (int i = 0; i < 10; ++i)
        CHECK(a.next() == b.next());
}

TEST_CASE("seeds and pixels decorrelate the rotation")
{
    CHECK(sample_value(SamplerKind::LowDiscrepancy, 1, 0, 0, 0) != sample_value(SamplerKind::LowDiscrepancy, 2, 0, 0, 0));
    CHECK(sample_value(SamplerKind::LowDiscrepancy, 1, 0, 0, 0) != sample_value(SamplerKind::LowDiscrepancy, 1, 1, 0, 0));
}

TEST_CASE("star discrepancy of a scrambled stream decays like log(N)/N")
{
    for (std::uint32_t dim : {0u, 1u, 4u}) {
        for (int n : {64, 100, 256, 1000, 4096}) {
            std::vector<double> xs;
            for (int s = 0; s < n; ++s)
                xs.push_back(sample_value(SamplerKind::LowDiscrepancy, 42, 17, static_cast<std::uint64_t>(s), dim));
            const double d = star_discrepancy(xs);
            CAPTURE(dim);
            CAPTURE(n);
            // Van der Corput in base b satisfies D* <= b log(N) / (N log b) up to small constants;
            // the rotation at most doubles it.
            const double base = prime_for_dimension(dim);
            CHECK(d <= 2.0 * (base * std::log(n) / std::log(base) + 1.0) / n);
        }
    }
    // Far below plain Monte Carlo at N = 4096 (expected ~0.87/sqrt(N) = 0.0136).
    std::vector<double> xs;
    for (int s = 0; s < 4096; ++s)
        xs.push_back(sample_value(SamplerKind::LowDiscrepancy, 3, 9, static_cast<std::uint64_t>(s), 0));
    CHECK(star_discrepancy(xs) < 0.002);
}

TEST_CASE("reflect")
{
    const Vec3 n(0, 0, 1);
    SUBCASE("normal incidence retroreflects")
    {
        const Vec3 r = reflect(-n, n);
        CHECK(r == n);
    }
    SUBCASE("45 degrees keeps the tangential component")
    {
        const Vec3 d = normalize(Vec3(1, 0, -1));
        const Vec3 r = reflect(d, n);
        CHECK(r.x == doctest::Approx(d.x).epsilon(1e-15));
        CHECK(r.y == 0.0);
        CHECK(r.z == doctest::Approx(-d.z).epsilon(1e-15));
        CHECK(degrees(angle_between(r, n)) == doctest::Approx(45.0).epsilon(1e-12));
    }
    SUBCASE("involution and length preservation")
    {
        fixtures::Rng rng(11);
        for (int i = 0; i < 1000; ++i) {
            const Vec3 d = normalize(Vec3(rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1)));
            const Vec3 m = normalize(Vec3(rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1)));
            const Vec3 r = reflect(d, m);
            CHECK(length(r) == doctest::Approx(1.0).epsilon(1e-15));
            const Vec3 back = reflect(r, m);
            CHECK(length(back - d) < 1e-14);
            CHECK(angle_between(r, m) == doctest::Approx(angle_between(-d, m)).epsilon(1e-9));
        }
    }
}

TEST_CASE("refract")
{
    const Vec3 n(0, 0, 1);
    SUBCASE("normal incidence passes straight through")
    {
        for (double eta : {0.5, 1.0, 1.6, 2.4}) {
            const auto t = refract(Vec3(0, 0, -1), n, eta);
            REQUIRE(t.has_value());
            CHECK(length(*t - Vec3(0, 0, -1)) < 1e-15);
        }
    }
    SUBCASE("45 degrees into glass of index 1.6 bends to 26.23 degrees")
    {
        // Snell: asin(sin 45 / 1.6) = 26.2280 degrees.
        const auto t = refract(normalize(Vec3(1, 0, -1)), n, 1.6);
        REQUIRE(t.has_value());
        CHECK(degrees(angle_between(*t, -n)) == doctest::Approx(26.23).epsilon(0.01 / 26.23));
        CHECK(length(*t) == doctest::Approx(1.0).epsilon(1e-12));
    }
    SUBCASE("45 degrees from inside the glass is totally reflected")
    {
        CHECK(degrees(std::asin(1.0 / 1.6)) == doctest::Approx(38.68).epsilon(0.01 / 38.68));
        CHECK_FALSE(refract(normalize(Vec3(1, 0, -1)), n, 1.0 / 1.6).has_value());
        CHECK(refract(normalize(Vec3(std::sin(radians(38.0)), 0, -std::cos(radians(38.0)))), n, 1.0 / 1.6).has_value());
    }
    SUBCASE("refracting back across the interface recovers the direction")
    {
        fixtures::Rng rng(5);
        for (int i = 0; i < 1000; ++i) {
            const double theta = rng.uniform(0.0, radians(89.0));
            const double phi = rng.uniform(0.0, 2 * kPi);
            const Vec3 d(std::sin(theta) * std::cos(phi), std::sin(theta) * std::sin(phi), -std::cos(theta));
            const double eta = rng.uniform(1.05, 2.5);
            const auto in = refract(d, n, eta);
            REQUIRE(in.has_value());
            const auto out = refract(*in, n, 1.0 / eta);
            REQUIRE(out.has_value());
            CHECK(length(*out - d) < 1e-6);
        }
    }
}
