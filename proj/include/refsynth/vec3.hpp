#pragma once

#include <algorithm>
#include <cmath>
#include <limits>

namespace refsynth {

/// Point or direction in camera space. Units are meters.
struct Vec3 {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;

    constexpr Vec3() = default;
    constexpr Vec3(double x_, double y_, double z_) : x(x_), y(y_), z(z_) {}

    constexpr double operator[](int axis) const { return axis == 0 ? x : (axis == 1 ? y : z); }
    constexpr double &operator[](int axis) { return axis == 0 ? x : (axis == 1 ? y : z); }

    constexpr Vec3 operator-() const { return {-x, -y, -z}; }
    constexpr Vec3 &operator+=(const Vec3 &o) { x += o.x; y += o.y; z += o.z; return *this; }
    constexpr Vec3 &operator-=(const Vec3 &o) { x -= o.x; y -= o.y; z -= o.z; return *this; }
    constexpr Vec3 &operator*=(double s) { x *= s; y *= s; z *= s; return *this; }

    friend constexpr bool operator==(const Vec3 &, const Vec3 &) = default;
};

constexpr Vec3 operator+(Vec3 a, const Vec3 &b) { return a += b; }
constexpr Vec3 operator-(Vec3 a, const Vec3 &b) { return a -= b; }
constexpr Vec3 operator*(Vec3 a, double s) { return a *= s; }
constexpr Vec3 operator*(double s, Vec3 a) { return a *= s; }
constexpr Vec3 operator/(const Vec3 &a, double s) { return {a.x / s, a.y / s, a.z / s}; }

constexpr double dot(const Vec3 &a, const Vec3 &b) { return a.x * b.x + a.y * b.y + a.z * b.z; }
constexpr Vec3 cross(const Vec3 &a, const Vec3 &b)
{
    return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}
inline double length(const Vec3 &v) { return std::sqrt(dot(v, v)); }
inline Vec3 normalize(const Vec3 &v) { return v / length(v); }
constexpr Vec3 min(const Vec3 &a, const Vec3 &b)
{
    return {std::min(a.x, b.x), std::min(a.y, b.y), std::min(a.z, b.z)};
}
constexpr Vec3 max(const Vec3 &a, const Vec3 &b)
{
    return {std::max(a.x, b.x), std::max(a.y, b.y), std::max(a.z, b.z)};
}

struct Vec2 {
    double x = 0.0;
    double y = 0.0;
};

/// Linear RGB radiance or per-channel weight.
struct Color {
    double r = 0.0;
    double g = 0.0;
    double b = 0.0;

    constexpr Color() = default;
    constexpr explicit Color(double v) : r(v), g(v), b(v) {}
    constexpr Color(double r_, double g_, double b_) : r(r_), g(g_), b(b_) {}

    constexpr double operator[](int c) const { return c == 0 ? r : (c == 1 ? g : b); }
    constexpr double &operator[](int c) { return c == 0 ? r : (c == 1 ? g : b); }

    constexpr Color &operator+=(const Color &o) { r += o.r; g += o.g; b += o.b; return *this; }
    constexpr Color &operator*=(const Color &o) { r *= o.r; g *= o.g; b *= o.b; return *this; }
    constexpr Color &operator*=(double s) { r *= s; g *= s; b *= s; return *this; }

    constexpr bool is_black() const { return r == 0.0 && g == 0.0 && b == 0.0; }
    constexpr double luminance() const { return 0.2126 * r + 0.7152 * g + 0.0722 * b; }
    constexpr double max_component() const { return std::max(r, std::max(g, b)); }

    friend constexpr bool operator==(const Color &, const Color &) = default;
};

constexpr Color operator+(Color a, const Color &b) { return a += b; }
constexpr Color operator*(Color a, const Color &b) { return a *= b; }
constexpr Color operator*(Color a, double s) { return a *= s; }
constexpr Color operator*(double s, Color a) { return a *= s; }

struct Ray {
    Vec3 origin;
    Vec3 direction;  // unit length
    double t_min = 0.0;
    double t_max = std::numeric_limits<double>::infinity();

    Vec3 at(double t) const { return origin + direction * t; }
};

inline constexpr double kPi = 3.14159265358979323846;

inline double degrees(double radians) { return radians * 180.0 / kPi; }
inline double radians(double degrees) { return degrees * kPi / 180.0; }

}  // namespace refsynth
