#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <vector>

#include "isar/mesh.hpp"
#include "isar/vec3.hpp"

namespace isar {

struct Ray {
    Vec3 origin;
    Vec3 direction;  // need not be unit length; distances are in multiples of it
};

struct RayHit {
    std::uint32_t triangle = 0;
    double distance = 0.0;
};

/// Two-sided Moller-Trumbore test. Returns the ray parameter of the hit, if any,
/// strictly inside (t_min, t_max).
std::optional<double> intersect_triangle(const Ray& ray, const Vec3& a, const Vec3& b, const Vec3& c, double t_min,
                                         double t_max);

/// Bounding volume hierarchy over a mesh's triangles. Owns a copy of the
/// triangle corners, so it stays valid after the mesh goes away. Read-only after
/// construction and safe to query from several threads.
class Bvh {
public:
    explicit Bvh(const TriangleMesh& mesh);

    /// Closest hit in (t_min, t_max). Equal distances resolve to the lower
    /// triangle index, matching a linear scan in index order.
    std::optional<RayHit> nearest_hit(const Ray& ray, double t_min = 0.0,
                                      double t_max = std::numeric_limits<double>::infinity()) const;

    /// True when any triangle is hit in (t_min, t_max).
    bool occluded(const Ray& ray, double t_min = 0.0, double t_max = std::numeric_limits<double>::infinity()) const;

    std::size_t node_count() const noexcept { return nodes_.size(); }

private:
    struct Box {
        Vec3 lo;
        Vec3 hi;
    };
    struct Node {
        Box box;
        std::uint32_t first = 0;  // leaf: first primitive slot; inner: right child
        std::uint32_t count = 0;  // 0 for inner nodes
    };
    struct Prim {
        Vec3 a, b, c;
        std::uint32_t triangle;
    };

    std::uint32_t build(std::uint32_t begin, std::uint32_t end, std::vector<Vec3>& centers);
    template <bool AnyHit>
    std::optional<RayHit> traverse(const Ray& ray, double t_min, double t_max) const;

    std::vector<Node> nodes_;
    std::vector<Prim> prims_;
};

}  // namespace isar
