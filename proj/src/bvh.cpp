#include "refsynth/bvh.hpp"

#include <algorithm>
#include <array>
#include <stdexcept>

namespace refsynth {

namespace {

constexpr int kBins = 16;
constexpr std::uint32_t kMaxLeafSize = 4;
constexpr double kTraversalCost = 1.0;
constexpr double kIntersectCost = 1.5;

struct Bin {
    Aabb box;
    std::uint32_t count = 0;
};

}  // namespace

double Aabb::surface_area() const
{
    const Vec3 d = hi - lo;
    if (d.x < 0 || d.y < 0 || d.z < 0)
        return 0.0;
    return 2.0 * (d.x * d.y + d.y * d.z + d.z * d.x);
}

bool intersect_triangle(const Ray &ray, const Vec3 &v0, const Vec3 &e1, const Vec3 &e2, double t_max,
                        double &t, double &u, double &v)
{
    const Vec3 p = cross(ray.direction, e2);
    const double det = dot(e1, p);
    if (det == 0.0)
        return false;
    const double inv_det = 1.0 / det;
    const Vec3 s = ray.origin - v0;
    const double bu = dot(s, p) * inv_det;
    if (bu < 0.0 || bu > 1.0)
        return false;
    const Vec3 q = cross(s, e1);
    const double bv = dot(ray.direction, q) * inv_det;
    if (bv < 0.0 || bu + bv > 1.0)
        return false;
    const double tt = dot(e2, q) * inv_det;
    if (tt < ray.t_min || tt > t_max)
        return false;
    t = tt;
    u = bu;
    v = bv;
    return true;
}

Bvh::Bvh(std::shared_ptr<const HeightfieldMesh> mesh) : mesh_(std::move(mesh))
{
    if (!mesh_ || mesh_->triangles.empty())
        throw std::invalid_argument("build_bvh: mesh has no triangles");
    const auto n = static_cast<std::uint32_t>(mesh_->triangles.size());
    std::vector<Aabb> boxes(n);
    std::vector<Vec3> centroids(n);
    order_.resize(n);
    for (std::uint32_t i = 0; i < n; ++i) {
        const auto &tri = mesh_->triangles[i];
        for (auto vi : tri) {
            if (vi >= mesh_->vertices.size())
                throw std::invalid_argument("build_bvh: triangle index out of range");
            boxes[i].expand(mesh_->vertices[vi]);
        }
        centroids[i] = (boxes[i].lo + boxes[i].hi) * 0.5;
        order_[i] = i;
    }
    nodes_.reserve(2 * n / kMaxLeafSize + 1);
    build_recursive(boxes, centroids, 0, n);

    packed_.reserve(n);
    for (std::uint32_t tri : order_) {
        const auto &idx = mesh_->triangles[tri];
        const Vec3 &v0 = mesh_->vertices[idx[0]];
        packed_.push_back({v0, mesh_->vertices[idx[1]] - v0, mesh_->vertices[idx[2]] - v0});
    }
}

std::uint32_t Bvh::build_recursive(std::vector<Aabb> &boxes, std::vector<Vec3> &centroids,
                                   std::uint32_t begin, std::uint32_t end)
{
    const auto node_index = static_cast<std::uint32_t>(nodes_.size());
    nodes_.emplace_back();
    Aabb box, centroid_box;
    for (std::uint32_t i = begin; i < end; ++i) {
        box.expand(boxes[order_[i]]);
        centroid_box.expand(centroids[order_[i]]);
    }
    nodes_[node_index].box = box;
    const std::uint32_t count = end - begin;

    auto make_leaf = [&] {
        nodes_[node_index].offset = begin;
        nodes_[node_index].count = static_cast<std::uint16_t>(count);
        return node_index;
    };
    if (count <= kMaxLeafSize)
        return make_leaf();

    const Vec3 extent = centroid_box.hi - centroid_box.lo;
    int axis = 0;
    if (extent.y > extent[axis]) axis = 1;
    if (extent.z > extent[axis]) axis = 2;

    std::uint32_t mid = begin;
    if (extent[axis] <= 0.0) {
        // All centroids coincide: split by count.
        mid = begin + count / 2;
    } else {
        std::array<Bin, kBins> bins{};
        const double scale = kBins / extent[axis];
        auto bin_of = [&](std::uint32_t tri) {
            const int b = static_cast<int>((centroids[tri][axis] - centroid_box.lo[axis]) * scale);
            return std::clamp(b, 0, kBins - 1);
        };
        for (std::uint32_t i = begin; i < end; ++i) {
            Bin &bin = bins[bin_of(order_[i])];
            bin.count++;
            bin.box.expand(boxes[order_[i]]);
        }
        std::array<double, kBins - 1> cost{};
        Aabb left;
        std::uint32_t left_count = 0;
        for (int i = 0; i < kBins - 1; ++i) {
            left.expand(bins[i].box);
            left_count += bins[i].count;
            cost[i] = left_count * left.surface_area();
        }
        Aabb right;
        std::uint32_t right_count = 0;
        for (int i = kBins - 1; i > 0; --i) {
            right.expand(bins[i].box);
            right_count += bins[i].count;
            cost[i - 1] += right_count * right.surface_area();
        }
        const auto best = std::min_element(cost.begin(), cost.end()) - cost.begin();
        const double area = box.surface_area();
        const double split_cost = kTraversalCost + kIntersectCost * cost[best] / std::max(area, 1e-300);
        if (split_cost >= kIntersectCost * count && count <= 16)
            return make_leaf();
        auto *first = order_.data() + begin;
        auto *last = order_.data() + end;
        auto *pivot = std::partition(first, last, [&](std::uint32_t tri) { return bin_of(tri) <= best; });
        mid = static_cast<std::uint32_t>(pivot - order_.data());
        if (mid == begin || mid == end)
            mid = begin + count / 2;
    }
    build_recursive(boxes, centroids, begin, mid);
    const std::uint32_t second = build_recursive(boxes, centroids, mid, end);
    nodes_[node_index].offset = second;
    nodes_[node_index].axis = static_cast<std::uint8_t>(axis);
    return node_index;
}

namespace {

inline bool hit_box(const Aabb &b, const Vec3 &origin, const Vec3 &inv_dir, double t_min, double t_max)
{
    for (int a = 0; a < 3; ++a) {
        double t0 = (b.lo[a] - origin[a]) * inv_dir[a];
        double t1 = (b.hi[a] - origin[a]) * inv_dir[a];
        if (inv_dir[a] < 0.0)
            std::swap(t0, t1);
        // NaN from 0 * inf leaves the interval unchanged.
        t_min = t0 > t_min ? t0 : t_min;
        t_max = t1 < t_max ? t1 : t_max;
        if (t_min > t_max)
            return false;
    }
    return true;
}

}  // namespace

template <bool AnyHit>
bool Bvh::traverse(const Ray &ray, double &t_best, std::uint32_t &tri_best, double &u_best,
                   double &v_best) const
{
    const Vec3 inv_dir(1.0 / ray.direction.x, 1.0 / ray.direction.y, 1.0 / ray.direction.z);
    std::array<std::uint32_t, 96> stack;
    int sp = 0;
    stack[sp++] = 0;
    bool found = false;
    while (sp > 0) {
        const std::uint32_t ni = stack[--sp];
        const Node &node = nodes_[ni];
        if (!hit_box(node.box, ray.origin, inv_dir, ray.t_min, t_best))
            continue;
        if (node.is_leaf()) {
            for (std::uint32_t i = node.offset; i < node.offset + node.count; ++i) {
                const PackedTriangle &p = packed_[i];
                double t, u, v;
                if (intersect_triangle(ray, p.v0, p.e1, p.e2, t_best, t, u, v)) {
                    // Ties resolve to the lower mesh triangle id so results do not depend on layout.
                    if (t == t_best && found && order_[i] > tri_best)
                        continue;
                    t_best = t;
                    tri_best = order_[i];
                    u_best = u;
                    v_best = v;
                    found = true;
                    if constexpr (AnyHit)
                        return true;
                }
            }
            continue;
        }
        const std::uint32_t first = ni + 1;
        const std::uint32_t second = node.offset;
        if (ray.direction[node.axis] < 0.0) {
            stack[sp++] = first;
            stack[sp++] = second;
        } else {
            stack[sp++] = second;
            stack[sp++] = first;
        }
    }
    return found;
}

std::optional<Hit> Bvh::intersect(const Ray &ray) const
{
    double t = ray.t_max, u = 0, v = 0;
    std::uint32_t tri = 0;
    if (!traverse<false>(ray, t, tri, u, v))
        return std::nullopt;
    const auto &idx = mesh_->triangles[tri];
    const Vec3 &p0 = mesh_->vertices[idx[0]];
    const Vec3 &p1 = mesh_->vertices[idx[1]];
    const Vec3 &p2 = mesh_->vertices[idx[2]];
    const Vec2 &uv0 = mesh_->uvs[idx[0]];
    const Vec2 &uv1 = mesh_->uvs[idx[1]];
    const Vec2 &uv2 = mesh_->uvs[idx[2]];
    const double w = 1.0 - u - v;
    Hit hit;
    hit.t = t;
    hit.position = ray.at(t);
    hit.normal = normalize(cross(p1 - p0, p2 - p0));
    hit.uv = {w * uv0.x + u * uv1.x + v * uv2.x, w * uv0.y + u * uv1.y + v * uv2.y};
    hit.triangle = tri;
    return hit;
}

bool Bvh::occluded(const Ray &ray) const
{
    double t = ray.t_max, u = 0, v = 0;
    std::uint32_t tri = 0;
    return traverse<true>(ray, t, tri, u, v);
}

Bvh build_bvh(std::shared_ptr<const HeightfieldMesh> mesh)
{
    return Bvh(std::move(mesh));
}

}  // namespace refsynth
