#pragma once

#include <cstdint>
#include <vector>

#include "isar/bvh.hpp"
#include "isar/geometry.hpp"
#include "isar/mesh.hpp"

namespace isar {

/// Shooting-and-bouncing-rays settings.
struct RaySpec {
    int rays_per_axis = 64;        // launch grid is rays_per_axis x rays_per_axis
    int max_bounces = 3;           // 3 covers the trihedral corner
    double wavelength_m = 0.029979245800;
    bool shadowing = true;         // require an unobstructed path back to the radar
    bool jitter = true;            // jitter each ray inside its grid cell
    std::uint64_t jitter_seed = 0;

    void validate() const;
    /// Half-angle (radians) of the cone around the radar direction that an
    /// outgoing ray must fall in to count as a return: atan(1/N) + 2 degrees.
    double exit_cone_rad() const;
};

/// One ray's contribution at the radar.
struct ScatterReturn {
    double path_length_m = 0.0;    // two-way: radar to first hit, bounce legs, back to radar
    double amplitude = 0.0;        // footprint area x |cos(incidence)| at the last bounce
    int bounce_count = 0;
    std::uint32_t ray_index = 0;
    std::uint32_t triangle = 0;    // facet of the last bounce
    Vec3 last_hit;
};

/// Mesh prepared for repeated tracing: the acceleration structure plus the data
/// needed to place the ray grid. Immutable and shareable across threads.
class ScatteringScene {
public:
    explicit ScatteringScene(const TriangleMesh& mesh);

    const Bvh& bvh() const noexcept { return bvh_; }
    const std::vector<Vec3>& normals() const noexcept { return normals_; }
    const std::vector<Vec3>& points() const noexcept { return points_; }
    double bounding_radius() const noexcept { return radius_; }
    /// Offset used to lift secondary rays off a surface.
    double surface_epsilon() const noexcept { return epsilon_; }

private:
    Bvh bvh_;
    std::vector<Vec3> normals_;
    std::vector<Vec3> points_;  // vertices referenced by at least one triangle
    double radius_ = 0.0;
    double epsilon_ = 0.0;
};

/// Plane-wave launch grid seen from one pose. Rays start on a plane
/// perpendicular to the line of sight, in front of the whole target.
struct LaunchGrid {
    std::vector<Ray> rays;
    double footprint_m2 = 0.0;     // area of one grid cell
    double start_path_m = 0.0;     // radar-to-launch-plane distance
};

LaunchGrid make_launch_grid(const ScatteringScene& scene, const RadarPose& pose, const RaySpec& spec);

/// One bounce of a single traced ray.
struct Bounce {
    Vec3 point;
    std::uint32_t triangle = 0;
    double path_to_hit_m = 0.0;    // radar to this hit along the chain
    double cos_incidence = 0.0;
    bool in_exit_cone = false;
    bool unoccluded = false;
    double return_path_m = 0.0;    // full two-way path if this bounce returned to the radar
};

/// Follows one ray through up to `max_bounces` specular reflections.
std::vector<Bounce> trace_chain(const ScatteringScene& scene, const RadarPose& pose, const RaySpec& spec,
                                const Ray& ray, double start_path_m);

/// All returns for one pose, ordered by ray index then bounce.
std::vector<ScatterReturn> trace_returns(const ScatteringScene& scene, const RadarPose& pose, const RaySpec& spec);
std::vector<ScatterReturn> trace_returns(const TriangleMesh& mesh, const RadarPose& pose, const RaySpec& spec);

}  // namespace isar
