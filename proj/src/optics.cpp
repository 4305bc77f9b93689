#include "refsynth/optics.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "refsynth/directions.hpp"
#include "refsynth/sampling.hpp"

namespace refsynth {

void GlassSpec::validate() const
{
    if (!(thickness > 0.0))
        throw std::invalid_argument("GlassSpec: thickness must be > 0");
    if (!(ior > 1.0))
        throw std::invalid_argument("GlassSpec: ior must be > 1");
    if (absorption.r < 0.0 || absorption.g < 0.0 || absorption.b < 0.0)
        throw std::invalid_argument("GlassSpec: absorption must be >= 0");
    if (!(distance_to_camera > 0.0))
        throw std::invalid_argument("GlassSpec: distance_to_camera must be > 0");
}

double LensSpec::hfov_deg() const
{
    return degrees(2.0 * std::atan(film_width / (2.0 * focal_length)));
}

void LensSpec::validate() const
{
    if (!(focal_length > 0.0))
        throw std::invalid_argument("LensSpec: focal_length must be > 0");
    if (!(film_width > 0.0))
        throw std::invalid_argument("LensSpec: film_width must be > 0");
    if (aperture_radius < 0.0)
        throw std::invalid_argument("LensSpec: aperture_radius must be >= 0");
    if (mode == LensMode::ThinLens && !(focus_distance > focal_length))
        throw std::invalid_argument("LensSpec: focus_distance must exceed focal_length");
}

Color SlabInteraction::total(SlabSide side) const
{
    Color sum;
    for (const auto &e : exit_rays)
        if (e.side == side)
            sum += e.weight;
    return sum;
}

double fresnel_dielectric(double cos_theta_i, double eta)
{
    cos_theta_i = std::clamp(cos_theta_i, 0.0, 1.0);
    const double sin2_t = (1.0 - cos_theta_i * cos_theta_i) / (eta * eta);
    if (sin2_t >= 1.0)
        return 1.0;
    const double cos_t = std::sqrt(1.0 - sin2_t);
    const double rs = (cos_theta_i - eta * cos_t) / (cos_theta_i + eta * cos_t);
    const double rp = (eta * cos_theta_i - cos_t) / (eta * cos_theta_i + cos_t);
    return 0.5 * (rs * rs + rp * rp);
}

Color beer_lambert(const Color &absorption, double distance)
{
    return {std::exp(-absorption.r * distance), std::exp(-absorption.g * distance),
            std::exp(-absorption.b * distance)};
}

namespace {

/// Entry point and per-traversal step through the slab.
struct SlabPath {
    Vec3 entry;
    double exit_plane = 0;  // z of the opposite face
    Vec3 lateral_step;      // xy displacement of one traversal
    double traversal_length = 0;
    double reflectance = 0;
    Vec3 mirrored;  // reflected direction
};

SlabPath trace_slab_path(const Ray &ray, const GlassSpec &glass)
{
    const Vec3 &d = ray.direction;
    if (std::abs(d.z) < 1e-12)
        throw std::invalid_argument("interact_slab: ray is parallel to the slab");
    const double z = ray.origin.z;
    double entry_plane, exit_plane;
    if (z <= glass.near_plane() && d.z > 0.0) {
        entry_plane = glass.near_plane();
        exit_plane = glass.far_plane();
    } else if (z >= glass.far_plane() && d.z < 0.0) {
        entry_plane = glass.far_plane();
        exit_plane = glass.near_plane();
    } else {
        throw std::invalid_argument("interact_slab: ray does not reach the slab");
    }
    SlabPath path;
    const double t = (entry_plane - z) / d.z;
    path.entry = ray.at(t);
    path.entry.z = entry_plane;
    path.exit_plane = exit_plane;
    path.mirrored = {d.x, d.y, -d.z};

    const double cos_i = std::abs(d.z);
    path.reflectance = fresnel_dielectric(cos_i, glass.ior);
    // Entering from air never produces total internal reflection.
    const Vec3 inside = *refract(d, Vec3(0.0, 0.0, 1.0), glass.ior);
    const double scale = glass.thickness / std::abs(inside.z);
    path.lateral_step = {inside.x * scale, inside.y * scale, 0.0};
    path.traversal_length = scale;
    return path;
}

Ray transmitted_ray(const SlabPath &path, const Ray &incident, int traversals)
{
    Ray r;
    r.origin = {path.entry.x + path.lateral_step.x * traversals,
                path.entry.y + path.lateral_step.y * traversals, path.exit_plane};
    r.direction = incident.direction;
    return r;
}

Ray reflected_ray(const SlabPath &path, int traversals)
{
    Ray r;
    r.origin = {path.entry.x + path.lateral_step.x * traversals,
                path.entry.y + path.lateral_step.y * traversals, path.entry.z};
    r.direction = path.mirrored;
    return r;
}

}  // namespace

void interact_slab(const Ray &ray, const GlassSpec &glass, int max_orders, SlabInteraction &out)
{
    if (glass.mode != GlassMode::Real)
        throw std::invalid_argument("interact_slab: glass must be in Real mode");
    if (max_orders < 0)
        throw std::invalid_argument("interact_slab: max_orders must be >= 0");
    out.exit_rays.clear();
    const SlabPath path = trace_slab_path(ray, glass);
    const double r = path.reflectance;
    const double t2 = (1.0 - r) * (1.0 - r);
    const double r2 = r * r;

    out.exit_rays.push_back({reflected_ray(path, 0), Color(r), 0.0, SlabSide::Reflect, 0});
    double fresnel = t2;
    for (int k = 0; k <= max_orders; ++k) {
        const int traversals = 2 * k + 1;
        const double length = path.traversal_length * traversals;
        out.exit_rays.push_back({transmitted_ray(path, ray, traversals),
                                 beer_lambert(glass.absorption, length) * fresnel, length,
                                 SlabSide::Transmit, k});
        if (k < max_orders) {
            const int back = 2 * (k + 1);
            const double back_length = path.traversal_length * back;
            out.exit_rays.push_back({reflected_ray(path, back),
                                     beer_lambert(glass.absorption, back_length) * (fresnel * r),
                                     back_length, SlabSide::Reflect, k + 1});
        }
        fresnel *= r2;
    }
}

SlabInteraction interact_slab(const Ray &ray, const GlassSpec &glass, int max_orders)
{
    SlabInteraction out;
    out.exit_rays.reserve(2 * static_cast<std::size_t>(max_orders) + 2);
    interact_slab(ray, glass, max_orders, out);
    return out;
}

SlabExit interact_virtual_slab(const Ray &ray, const GlassSpec &glass, SlabSide side)
{
    const SlabPath path = trace_slab_path(ray, glass);
    if (side == SlabSide::Reflect)
        return {reflected_ray(path, 0), Color(1.0), 0.0, SlabSide::Reflect, 0};
    return {transmitted_ray(path, ray, 1), Color(1.0), path.traversal_length, SlabSide::Transmit, 0};
}

double slab_entry_distance(const Ray &ray, const GlassSpec &glass)
{
    const double dz = ray.direction.z;
    const double z = ray.origin.z;
    if (dz > 0.0 && z <= glass.near_plane())
        return (glass.near_plane() - z) / dz;
    if (dz < 0.0 && z >= glass.far_plane())
        return (glass.far_plane() - z) / dz;
    return std::numeric_limits<double>::infinity();
}

Ray generate_camera_ray(const LensSpec &lens, Vec2 film_position, const Film &film, Vec2 lens_sample)
{
    const Vec3 through = film.pinhole().film_to_direction(film_position.x, film_position.y);
    Ray ray;
    if (lens.mode == LensMode::Pinhole) {
        ray.direction = normalize(through);
        return ray;
    }
    const Vec2 disk = concentric_disk(lens_sample);
    const Vec3 lens_point(disk.x * lens.aperture_radius, disk.y * lens.aperture_radius, 0.0);
    const Vec3 focus_point = through * lens.focus_distance;
    ray.origin = lens_point;
    ray.direction = normalize(focus_point - lens_point);
    return ray;
}

double circle_of_confusion_radius(const LensSpec &lens, double depth)
{
    return lens.aperture_radius * std::abs(depth - lens.focus_distance) / depth;
}

}  // namespace refsynth
