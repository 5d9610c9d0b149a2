#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "isar/vec3.hpp"

namespace isar {

/// Triangles smaller than this (m^2) are treated as degenerate and dropped.
inline constexpr double kMinTriangleArea = 1e-12;

using Triangle = std::array<std::uint32_t, 3>;

/// Immutable triangle mesh in meters, z axis up. Every triangle has positive
/// area and a unit normal consistent with its vertex winding.
class TriangleMesh {
public:
    TriangleMesh() = default;

    /// Builds a mesh from explicit geometry, dropping degenerate triangles and
    /// deriving normals from the winding. Throws isar::Error when indices are out
    /// of range, coordinates are not finite, or no usable triangle remains.
    static TriangleMesh from_triangles(std::vector<Vec3> vertices, const std::vector<Triangle>& triangles);

    /// Same as from_triangles, but keeps a supplied per-triangle normal when it is
    /// nonzero and within 90 degrees of the winding normal. Reports how many
    /// triangles were dropped and how many normals had to be recomputed.
    static TriangleMesh from_facets(std::vector<Vec3> vertices, const std::vector<Triangle>& triangles,
                                    const std::vector<Vec3>& facet_normals, std::size_t* dropped = nullptr,
                                    std::size_t* recomputed = nullptr);

    const std::vector<Vec3>& vertices() const noexcept { return vertices_; }
    const std::vector<Triangle>& triangles() const noexcept { return triangles_; }
    const std::vector<Vec3>& normals() const noexcept { return normals_; }

    std::size_t triangle_count() const noexcept { return triangles_.size(); }
    std::array<Vec3, 3> corners(std::size_t tri) const;
    double triangle_area(std::size_t tri) const;
    double surface_area() const;

    /// Area-weighted surface centroid.
    Vec3 centroid() const;
    Vec3 bounds_min() const;
    Vec3 bounds_max() const;
    /// Largest distance from the centroid to any vertex.
    double bounding_radius() const;

private:
    std::vector<Vec3> vertices_;
    std::vector<Triangle> triangles_;
    std::vector<Vec3> normals_;
};

struct StlLoadOptions {
    double scale = 1.0;
    bool center = true;  // translate so the area-weighted centroid sits at the origin
};

struct StlLoadResult {
    TriangleMesh mesh;
    bool binary = false;
    std::size_t dropped_degenerate = 0;
    std::size_t normals_recomputed = 0;
};

/// Parses binary or ASCII STL (auto-detected). Identical corner coordinates are
/// merged into shared vertices.
StlLoadResult load_stl(std::span<const std::uint8_t> bytes, const StlLoadOptions& options = {});
StlLoadResult load_stl_file(const std::string& path, const StlLoadOptions& options = {});

/// Binary little-endian STL with an 80-byte header.
std::vector<std::uint8_t> serialize_stl_binary(const TriangleMesh& mesh);
void save_stl_file(const TriangleMesh& mesh, const std::string& path);

/// Rotation by `yaw_deg` (counter-clockwise seen from +z) about the vertical
/// axis through the mesh centroid.
TriangleMesh rotate_mesh(const TriangleMesh& mesh, double yaw_deg);

TriangleMesh translate_mesh(const TriangleMesh& mesh, const Vec3& offset);
TriangleMesh scale_mesh(const TriangleMesh& mesh, double factor);

/// Concatenates meshes without merging vertices.
TriangleMesh merge_meshes(std::span<const TriangleMesh> parts);

}  // namespace isar
