#include "fixtures.hpp"

#include <cmath>

#include "refsynth/optics.hpp"

namespace refsynth::fixtures {

double default_hfov()
{
    return LensSpec{}.hfov_deg();
}

DepthImage make_image(int width, int height, double hfov_deg, const std::function<Color(double, double)> &color,
                      const std::function<double(double, double)> &depth)
{
    DepthImage img{Image(width, height, 3), Image(width, height, 1), hfov_deg};
    for (int y = 0; y < height; ++y)
        for (int x = 0; x < width; ++x) {
            const double u = (x + 0.5) / width;
            const double v = (y + 0.5) / height;
            img.rgb.set_rgb(x, y, color(u, v));
            img.depth.at(x, y) = static_cast<float>(depth(u, v));
        }
    return img;
}

DepthImage constant_plane(int width, int height, double depth, Color color, double hfov_deg)
{
    return make_image(width, height, hfov_deg, [&](double, double) { return color; },
                      [&](double, double) { return depth; });
}

DepthImage front_scene(int size)
{
    // The fov is a little wider than the camera's so the film is fully covered.
    return make_image(
        size, size, default_hfov() * 1.1,
        [](double u, double v) {
            Color c(0.25 + 0.5 * u, 0.2 + 0.6 * v, 0.35 + 0.3 * std::sin(6.0 * u) * std::sin(5.0 * v));
            if (u > 0.6 && u < 0.9 && v > 0.15 && v < 0.45) {
                const bool check = (static_cast<int>(u * 40) + static_cast<int>(v * 40)) % 2 == 0;
                c = check ? Color(0.9, 0.85, 0.8) : Color(0.1, 0.12, 0.15);
            }
            return c;
        },
        [](double u, double v) {
            if (u > 0.15 && u < 0.35 && v > 0.55 && v < 0.85)
                return 1.2;  // box in front of the wall
            return 2.0 + 0.8 * (u - 0.5) + 0.3 * (v - 0.5);
        });
}

DepthImage back_scene(int size)
{
    return make_image(
        size, size, default_hfov() * 1.1,
        [](double u, double v) {
            const double stripe = 0.5 + 0.5 * std::sin(30.0 * u + 4.0 * v);
            const double blob = std::exp(-((u - 0.3) * (u - 0.3) + (v - 0.6) * (v - 0.6)) * 40.0);
            return Color(0.2 + 0.6 * stripe, 0.3 + 0.5 * blob, 0.7 - 0.4 * stripe);
        },
        [](double u, double v) { return 1.5 + 2.5 * u + 0.2 * v; });
}

DepthImage back_depth_ramp(int size)
{
    return make_image(
        size, size, default_hfov() * 1.1,
        [](double u, double v) {
            const int cx = static_cast<int>(u * 16.0);
            const int cy = static_cast<int>(v * 16.0);
            return (cx + cy) % 2 == 0 ? Color(0.9) : Color(0.1);
        },
        [](double u, double) { return 0.1 + 7.9 * u; });
}

SceneDescription default_scene(int size)
{
    return assemble_scene(front_scene(size), back_scene(size), SceneParams{});
}

std::uint64_t Rng::next_u64()
{
    state_ ^= state_ << 13;
    state_ ^= state_ >> 7;
    state_ ^= state_ << 17;
    return state_;
}

}  // namespace refsynth::fixtures
