#include "isar/bvh.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>

namespace isar {

namespace {

constexpr std::uint32_t kLeafSize = 4;

bool slab_test(const Vec3& lo, const Vec3& hi, const Vec3& origin, const Vec3& inv, double t_min, double t_max,
               double& t_entry) {
    double t0 = t_min;
    double t1 = t_max;
    for (int axis = 0; axis < 3; ++axis) {
        const double a = (lo[axis] - origin[axis]) * inv[axis];
        const double b = (hi[axis] - origin[axis]) * inv[axis];
        // fmin/fmax drop the NaN produced by 0 * inf when the origin sits on a slab.
        t0 = std::fmax(t0, std::fmin(a, b));
        t1 = std::fmin(t1, std::fmax(a, b));
    }
    t_entry = t0;
    return t0 <= t1;
}

}  // namespace

std::optional<double> intersect_triangle(const Ray& ray, const Vec3& a, const Vec3& b, const Vec3& c, double t_min,
                                         double t_max) {
    const Vec3 e1 = b - a;
    const Vec3 e2 = c - a;
    const Vec3 p = cross(ray.direction, e2);
    const double det = dot(e1, p);
    if (det == 0.0) return std::nullopt;
    const double inv_det = 1.0 / det;
    const Vec3 s = ray.origin - a;
    const double u = dot(s, p) * inv_det;
    if (u < 0.0 || u > 1.0) return std::nullopt;
    const Vec3 q = cross(s, e1);
    const double v = dot(ray.direction, q) * inv_det;
    if (v < 0.0 || u + v > 1.0) return std::nullopt;
    const double t = dot(e2, q) * inv_det;
    if (!(t > t_min && t < t_max)) return std::nullopt;
    return t;
}

Bvh::Bvh(const TriangleMesh& mesh) {
    const std::size_t n = mesh.triangle_count();
    prims_.reserve(n);
    std::vector<Vec3> centers;
    centers.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        const auto [a, b, c] = mesh.corners(i);
        prims_.push_back({a, b, c, static_cast<std::uint32_t>(i)});
        centers.push_back((a + b + c) * (1.0 / 3.0));
    }
    nodes_.reserve(2 * n / kLeafSize + 1);
    build(0, static_cast<std::uint32_t>(n), centers);
}

std::uint32_t Bvh::build(std::uint32_t begin, std::uint32_t end, std::vector<Vec3>& centers) {
    const auto index = static_cast<std::uint32_t>(nodes_.size());
    nodes_.push_back({});

    Box box{prims_[begin].a, prims_[begin].a};
    Box cbox{centers[begin], centers[begin]};
    auto grow = [](Box& bx, const Vec3& v) {
        bx.lo = {std::min(bx.lo.x, v.x), std::min(bx.lo.y, v.y), std::min(bx.lo.z, v.z)};
        bx.hi = {std::max(bx.hi.x, v.x), std::max(bx.hi.y, v.y), std::max(bx.hi.z, v.z)};
    };
    for (std::uint32_t i = begin; i < end; ++i) {
        grow(box, prims_[i].a);
        grow(box, prims_[i].b);
        grow(box, prims_[i].c);
        grow(cbox, centers[i]);
    }
    nodes_[index].box = box;

    const std::uint32_t count = end - begin;
    const Vec3 extent = cbox.hi - cbox.lo;
    int axis = 0;
    if (extent.y > extent.x) axis = 1;
    if (extent.z > extent[axis]) axis = 2;
    if (count <= kLeafSize || extent[axis] <= 0.0) {
        nodes_[index].first = begin;
        nodes_[index].count = count;
        return index;
    }

    // Median split along the widest centroid axis; primitives and their centers move together.
    std::vector<std::uint32_t> order(count);
    std::iota(order.begin(), order.end(), begin);
    const std::uint32_t mid = count / 2;
    std::nth_element(order.begin(), order.begin() + mid, order.end(), [&](std::uint32_t l, std::uint32_t r) {
        const double cl = centers[l][axis];
        const double cr = centers[r][axis];
        return cl < cr || (cl == cr && l < r);
    });
    std::vector<Prim> prims(count);
    std::vector<Vec3> cents(count);
    for (std::uint32_t i = 0; i < count; ++i) {
        prims[i] = prims_[order[i]];
        cents[i] = centers[order[i]];
    }
    std::copy(prims.begin(), prims.end(), prims_.begin() + begin);
    std::copy(cents.begin(), cents.end(), centers.begin() + begin);

    build(begin, begin + mid, centers);
    const std::uint32_t right = build(begin + mid, end, centers);
    nodes_[index].first = right;
    nodes_[index].count = 0;
    return index;
}

template <bool AnyHit>
std::optional<RayHit> Bvh::traverse(const Ray& ray, double t_min, double t_max) const {
    if (nodes_.empty()) return std::nullopt;
    const Vec3 inv{1.0 / ray.direction.x, 1.0 / ray.direction.y, 1.0 / ray.direction.z};

    std::optional<RayHit> best;
    double best_t = t_max;
    // Closed upper bound so equal-distance hits can still replace a higher triangle index.
    const auto limit = [&] { return best ? std::nextafter(best_t, std::numeric_limits<double>::infinity()) : t_max; };

    std::array<std::uint32_t, 128> stack{};
    std::size_t top = 0;
    stack[top++] = 0;
    while (top > 0) {
        const Node& node = nodes_[stack[--top]];
        double entry = 0.0;
        if (!slab_test(node.box.lo, node.box.hi, ray.origin, inv, t_min, limit(), entry)) continue;
        if (node.count > 0) {
            for (std::uint32_t i = node.first; i < node.first + node.count; ++i) {
                const Prim& p = prims_[i];
                const auto t = intersect_triangle(ray, p.a, p.b, p.c, t_min, t_max);
                if (!t) continue;
                if constexpr (AnyHit) {
                    return RayHit{p.triangle, *t};
                } else {
                    if (!best || *t < best_t || (*t == best_t && p.triangle < best->triangle)) {
                        best = RayHit{p.triangle, *t};
                        best_t = *t;
                    }
                }
            }
            continue;
        }
        const std::uint32_t left = static_cast<std::uint32_t>(&node - nodes_.data()) + 1;
        const std::uint32_t right = node.first;
        double el = 0.0;
        double er = 0.0;
        const bool hit_l = slab_test(nodes_[left].box.lo, nodes_[left].box.hi, ray.origin, inv, t_min, limit(), el);
        const bool hit_r = slab_test(nodes_[right].box.lo, nodes_[right].box.hi, ray.origin, inv, t_min, limit(), er);
        // Push the farther child first so the nearer one is visited next.
        if (hit_l && hit_r) {
            if (el <= er) {
                stack[top++] = right;
                stack[top++] = left;
            } else {
                stack[top++] = left;
                stack[top++] = right;
            }
        } else if (hit_l) {
            stack[top++] = left;
        } else if (hit_r) {
            stack[top++] = right;
        }
    }
    return best;
}

std::optional<RayHit> Bvh::nearest_hit(const Ray& ray, double t_min, double t_max) const {
    return traverse<false>(ray, t_min, t_max);
}

bool Bvh::occluded(const Ray& ray, double t_min, double t_max) const {
    return traverse<true>(ray, t_min, t_max).has_value();
}

}  // namespace isar
