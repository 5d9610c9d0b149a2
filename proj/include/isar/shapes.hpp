#pragma once

#include <string>

#include "isar/mesh.hpp"

namespace isar::shapes {

/// Accumulates triangles; winding follows the right-hand rule so the normal
/// of every piece points along its documented outward direction.
class MeshBuilder {
public:
    /// Rectangle origin + s*edge_u + t*edge_v, split into nu x nv cells.
    /// Normal direction is cross(edge_u, edge_v).
    void quad_grid(const Vec3& origin, const Vec3& edge_u, const Vec3& edge_v, int nu, int nv);
    /// Vertical cylinder wall between z = base.z and base.z + height.
    void cylinder_side(const Vec3& base, double radius, double height, int segments, int stacks, bool outward = true);
    /// Horizontal disk; `up` selects a +z or -z normal.
    void disk(const Vec3& center, double radius, int segments, bool up = true);
    void annulus(const Vec3& center, double inner, double outer, int segments, bool up = true);
    /// Closed axis-aligned box with min corner `lo` and max corner `hi`.
    void box(const Vec3& lo, const Vec3& hi, int cells = 1);
    /// Ellipsoid centered at `center` with the given semi-axes.
    void ellipsoid(const Vec3& center, const Vec3& radii, int slices, int stacks);
    void triangle(const Vec3& a, const Vec3& b, const Vec3& c);

    std::size_t triangle_count() const noexcept { return triangles_.size(); }
    TriangleMesh build() const;

private:
    std::uint32_t add(const Vec3& v);

    std::vector<Vec3> vertices_;
    std::vector<Triangle> triangles_;
};

/// Square plate of side `size` centered at the origin with normal +x.
TriangleMesh plate(double size, int cells = 1);

/// Two square plates meeting at 90 degrees along the z axis, opening toward
/// the +x/+y quadrant (fold axis vertical).
TriangleMesh dihedral(double size, int cells = 1);

/// Three mutually perpendicular square plates with the corner at the origin,
/// opening toward (+1, +1, +1).
TriangleMesh trihedral(double size, int cells = 1);

/// Engineering calibration target: a 2.445 m x 2.75 m x 0.765 m block with one
/// quadrant stepped down to half height (dihedral and trihedral corners), a
/// solid cylinder rising 0.915 m above the block, a top hat, and a hollow
/// cylinder cavity. Exactly 6400 triangles. Not centered.
TriangleMesh slicy();

/// Procedural stand-in for one of the seven aircraft classes (ellipsoid
/// fuselage, swept wings, tails); geometry varies by class. Not centered.
TriangleMesh surrogate_aircraft(const std::string& class_name);

}  // namespace isar::shapes
