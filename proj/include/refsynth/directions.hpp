#pragma once

#include <optional>

#include "refsynth/vec3.hpp"

namespace refsynth {

/// Mirror direction of `d` about the surface normal `n`. Either orientation of `n` works.
inline Vec3 reflect(const Vec3 &d, const Vec3 &n)
{
    return d - n * (2.0 * dot(d, n));
}

/// Refracts the unit direction `d` through an interface with unit normal `n`.
///
/// `eta_ratio` is n_transmitted / n_incident, so sin(theta_t) = sin(theta_i) / eta_ratio.
/// The normal may face either side of the interface. Returns std::nullopt under
/// total internal reflection.
inline std::optional<Vec3> refract(const Vec3 &d, const Vec3 &n, double eta_ratio)
{
    Vec3 normal = n;
    double cos_i = -dot(d, normal);
    if (cos_i < 0.0) {
        normal = -normal;
        cos_i = -cos_i;
    }
    const double inv_eta = 1.0 / eta_ratio;
    const double sin2_t = inv_eta * inv_eta * std::max(0.0, 1.0 - cos_i * cos_i);
    if (sin2_t > 1.0)
        return std::nullopt;
    const double cos_t = std::sqrt(1.0 - sin2_t);
    return normalize(d * inv_eta + normal * (inv_eta * cos_i - cos_t));
}

}  // namespace refsynth
