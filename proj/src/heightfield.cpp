#include "refsynth/heightfield.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace refsynth {

void DepthImage::validate() const
{
    if (rgb.channels() != 3)
        throw std::invalid_argument("DepthImage: rgb must have 3 channels");
    if (depth.channels() != 1 || depth.width() != rgb.width() || depth.height() != rgb.height())
        throw std::invalid_argument("DepthImage: depth raster must be single-channel and match rgb");
    if (!(hfov_deg > 0.0 && hfov_deg < 180.0))
        throw std::invalid_argument("DepthImage: horizontal fov must be in (0, 180) degrees");
    for (float d : depth.data())
        if (!std::isfinite(d) || d <= 0.0f)
            throw std::invalid_argument("DepthImage: depth must be finite and > 0 everywhere");
    for (float c : rgb.data())
        if (!std::isfinite(c) || c < 0.0f)
            throw std::invalid_argument("DepthImage: color must be finite and >= 0");
}

double Pinhole::tan_half_x() const
{
    return std::tan(radians(hfov_deg) * 0.5);
}

Vec3 Pinhole::film_to_direction(double fx, double fy) const
{
    const double sx = (2.0 * fx / width - 1.0) * tan_half_x();
    const double sy = (1.0 - 2.0 * fy / height) * tan_half_y();
    return {sx, sy, 1.0};
}

Vec2 Pinhole::project(const Vec3 &p) const
{
    const double sx = p.x / p.z;
    const double sy = p.y / p.z;
    return {(sx / tan_half_x() + 1.0) * 0.5 * width, (1.0 - sy / tan_half_y()) * 0.5 * height};
}

HeightfieldMesh build_heightfield(const DepthImage &img, double split_threshold)
{
    img.validate();
    if (img.width() < 2 || img.height() < 2)
        throw std::invalid_argument("build_heightfield: image must be at least 2x2");
    if (!(split_threshold > 0.0))
        throw std::invalid_argument("build_heightfield: split_threshold must be > 0");

    const int w = img.width();
    const int h = img.height();
    const Pinhole pinhole{w, h, img.hfov_deg};

    HeightfieldMesh mesh;
    mesh.grid_width = w;
    mesh.grid_height = h;
    mesh.vertices.reserve(static_cast<std::size_t>(w) * h);
    mesh.uvs.reserve(static_cast<std::size_t>(w) * h);
    for (int j = 0; j < h; ++j) {
        for (int i = 0; i < w; ++i) {
            const double z = img.depth.at(i, j);
            mesh.vertices.push_back(pinhole.film_to_direction(i + 0.5, j + 0.5) * z);
            mesh.uvs.push_back({(i + 0.5) / w, (j + 0.5) / h});
        }
    }

    auto depth_of = [&](std::uint32_t v) { return static_cast<double>(img.depth.data()[v]); };
    auto joined = [&](std::uint32_t a, std::uint32_t b) {
        return std::abs(depth_of(a) - depth_of(b)) <= split_threshold;
    };
    auto emit = [&](std::uint32_t a, std::uint32_t b, std::uint32_t c) {
        if (!joined(a, b) || !joined(b, c) || !joined(c, a))
            return;
        const Vec3 &p0 = mesh.vertices[a];
        const Vec3 n = cross(mesh.vertices[b] - p0, mesh.vertices[c] - p0);
        const double scale = dot(p0, p0);
        if (dot(n, n) <= 1e-24 * scale * scale)
            return;
        mesh.triangles.push_back({a, b, c});
    };

    mesh.triangles.reserve(static_cast<std::size_t>(w - 1) * (h - 1) * 2);
    for (int j = 0; j + 1 < h; ++j) {
        for (int i = 0; i + 1 < w; ++i) {
            const std::uint32_t v00 = mesh.vertex_index(i, j);
            const std::uint32_t v10 = mesh.vertex_index(i + 1, j);
            const std::uint32_t v01 = mesh.vertex_index(i, j + 1);
            const std::uint32_t v11 = mesh.vertex_index(i + 1, j + 1);
            const double main_jump = std::abs(depth_of(v00) - depth_of(v11));
            const double anti_jump = std::abs(depth_of(v10) - depth_of(v01));
            if (main_jump <= anti_jump) {
                emit(v00, v10, v11);
                emit(v00, v11, v01);
            } else {
                emit(v00, v10, v01);
                emit(v10, v11, v01);
            }
        }
    }
    mesh.texture = std::make_shared<const Image>(img.rgb);
    return mesh;
}

Color sample_texture(const Image &texture, Vec2 uv)
{
    const int x = std::clamp(static_cast<int>(std::floor(uv.x * texture.width())), 0, texture.width() - 1);
    const int y = std::clamp(static_cast<int>(std::floor(uv.y * texture.height())), 0, texture.height() - 1);
    return texture.rgb(x, y);
}

}  // namespace refsynth
