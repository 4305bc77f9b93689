#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <vector>

#include "refsynth/heightfield.hpp"
#include "refsynth/vec3.hpp"

namespace refsynth {

struct Aabb {
    Vec3 lo{std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity(),
            std::numeric_limits<double>::infinity()};
    Vec3 hi{-std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity(),
            -std::numeric_limits<double>::infinity()};

    void expand(const Vec3 &p) { lo = min(lo, p); hi = max(hi, p); }
    void expand(const Aabb &b) { lo = min(lo, b.lo); hi = max(hi, b.hi); }
    bool contains(const Vec3 &p) const
    {
        return p.x >= lo.x && p.y >= lo.y && p.z >= lo.z && p.x <= hi.x && p.y <= hi.y && p.z <= hi.z;
    }
    bool contains(const Aabb &b) const { return contains(b.lo) && contains(b.hi); }
    double surface_area() const;
};

struct Hit {
    double t = 0;
    Vec3 position;
    Vec3 normal;  // geometric face normal, unit length
    Vec2 uv;
    std::uint32_t triangle = 0;
};

/// Bounding volume hierarchy over the triangles of one mesh.
///
/// Built with binned SAH. Nodes are stored depth-first: an interior node's first child directly
/// follows it and `offset` holds the second child; a leaf covers `count` entries of
/// triangle_order() starting at `offset`.
class Bvh {
public:
    struct Node {
        Aabb box;
        std::uint32_t offset = 0;
        std::uint16_t count = 0;  // 0 for interior nodes
        std::uint8_t axis = 0;
        bool is_leaf() const { return count != 0; }
    };

    explicit Bvh(std::shared_ptr<const HeightfieldMesh> mesh);

    /// Nearest hit with t in [ray.t_min, ray.t_max].
    std::optional<Hit> intersect(const Ray &ray) const;
    /// True when anything is hit in [ray.t_min, ray.t_max].
    bool occluded(const Ray &ray) const;

    const std::vector<Node> &nodes() const { return nodes_; }
    const std::vector<std::uint32_t> &triangle_order() const { return order_; }
    const HeightfieldMesh &mesh() const { return *mesh_; }
    const Aabb &bounds() const { return nodes_.front().box; }

private:
    struct PackedTriangle {
        Vec3 v0, e1, e2;
    };

    std::uint32_t build_recursive(std::vector<Aabb> &boxes, std::vector<Vec3> &centroids,
                                  std::uint32_t begin, std::uint32_t end);
    template <bool AnyHit>
    bool traverse(const Ray &ray, double &t_best, std::uint32_t &tri_best, double &u_best,
                  double &v_best) const;

    std::shared_ptr<const HeightfieldMesh> mesh_;
    std::vector<Node> nodes_;
    std::vector<std::uint32_t> order_;
    std::vector<PackedTriangle> packed_;
};

/// Builds the hierarchy; the mesh must contain at least one triangle.
Bvh build_bvh(std::shared_ptr<const HeightfieldMesh> mesh);

/// Moller-Trumbore test. On a hit in (t_min, t_max) writes t and barycentrics (u, v) of the
/// second and third vertex.
bool intersect_triangle(const Ray &ray, const Vec3 &v0, const Vec3 &e1, const Vec3 &e2, double t_max,
                        double &t, double &u, double &v);

}  // namespace refsynth
