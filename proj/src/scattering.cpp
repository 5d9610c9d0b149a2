#include "isar/scattering.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "isar/error.hpp"
#include "isar/random.hpp"

namespace isar {

namespace {
[[noreturn]] void fail(const std::string& message) { throw Error("scattering", message); }
}  // namespace

void RaySpec::validate() const {
    if (rays_per_axis < 8) fail("rays_per_axis must be >= 8, got " + std::to_string(rays_per_axis));
    if (rays_per_axis > 4096) fail("rays_per_axis must be <= 4096, got " + std::to_string(rays_per_axis));
    if (max_bounces < 1 || max_bounces > 3) fail("max_bounces must lie in [1, 3], got " + std::to_string(max_bounces));
    if (!(wavelength_m > 0.0) || !std::isfinite(wavelength_m)) fail("wavelength must be positive");
}

double RaySpec::exit_cone_rad() const {
    return std::atan(1.0 / static_cast<double>(rays_per_axis)) + deg_to_rad(2.0);
}

ScatteringScene::ScatteringScene(const TriangleMesh& mesh) : bvh_(mesh), normals_(mesh.normals()) {
    std::vector<bool> used(mesh.vertices().size(), false);
    for (const auto& t : mesh.triangles()) {
        for (auto idx : t) used[idx] = true;
    }
    for (std::size_t i = 0; i < used.size(); ++i) {
        if (used[i]) points_.push_back(mesh.vertices()[i]);
    }
    for (const auto& p : points_) radius_ = std::max(radius_, norm(p));
    epsilon_ = 1e-6 * (1.0 + radius_);
}

LaunchGrid make_launch_grid(const ScatteringScene& scene, const RadarPose& pose, const RaySpec& spec) {
    spec.validate();
    const Vec3 u = pose.line_of_sight();
    const Vec3 e1 = normalized(cross(Vec3{0.0, 0.0, 1.0}, u));
    const Vec3 e2 = cross(u, e1);

    double a0 = std::numeric_limits<double>::infinity();
    double a1 = -a0;
    double b0 = a0;
    double b1 = -a0;
    double c1 = -a0;
    for (const auto& p : scene.points()) {
        const double a = dot(p, e1);
        const double b = dot(p, e2);
        a0 = std::min(a0, a);
        a1 = std::max(a1, a);
        b0 = std::min(b0, b);
        b1 = std::max(b1, b);
        c1 = std::max(c1, dot(p, u));
    }
    const auto n = static_cast<std::size_t>(spec.rays_per_axis);
    const double w1 = (a1 - a0) / static_cast<double>(n);
    const double w2 = (b1 - b0) / static_cast<double>(n);
    const double plane = c1 + 1e-3 * (1.0 + scene.bounding_radius());

    LaunchGrid grid;
    grid.footprint_m2 = w1 * w2;
    grid.start_path_m = pose.slant_range_m - plane;
    grid.rays.reserve(n * n);
    const Vec3 center = u * plane;
    for (std::size_t j = 0; j < n; ++j) {
        for (std::size_t i = 0; i < n; ++i) {
            double jx = 0.5;
            double jy = 0.5;
            if (spec.jitter) {
                const std::uint64_t h = hash_words({spec.jitter_seed, j * n + i});
                jx = unit_interval(h);
                jy = unit_interval(mix64(h));
            }
            const double a = a0 + (static_cast<double>(i) + jx) * w1;
            const double b = b0 + (static_cast<double>(j) + jy) * w2;
            grid.rays.push_back({center + e1 * a + e2 * b, -u});
        }
    }
    return grid;
}

std::vector<Bounce> trace_chain(const ScatteringScene& scene, const RadarPose& pose, const RaySpec& spec,
                                const Ray& ray, double start_path_m) {
    const Vec3 u = pose.line_of_sight();
    const double cos_cone = std::cos(spec.exit_cone_rad());
    const double eps = scene.surface_epsilon();

    std::vector<Bounce> chain;
    // Secondary rays leave from the exact hit point and skip the first `eps` of
    // travel, so chains stay on the true specular line and stay reversible.
    Ray current{ray.origin, normalized(ray.direction)};
    double t_min = 0.0;
    double path = start_path_m;
    for (int bounce = 1; bounce <= spec.max_bounces; ++bounce) {
        const auto hit = scene.bvh().nearest_hit(current, t_min);
        if (!hit) break;
        path += hit->distance;
        const Vec3 p = current.origin + current.direction * hit->distance;
        Vec3 n = scene.normals()[hit->triangle];
        if (dot(n, current.direction) > 0.0) n = -n;
        const Vec3 out = normalized(reflect(current.direction, n));

        Bounce b;
        b.point = p;
        b.triangle = hit->triangle;
        b.path_to_hit_m = path;
        b.cos_incidence = std::abs(dot(current.direction, n));
        b.in_exit_cone = dot(out, u) >= cos_cone;
        b.return_path_m = path + pose.slant_range_m - dot(p, u);
        if (b.in_exit_cone && dot(u, n) > 0.0) {
            b.unoccluded = !scene.bvh().occluded(Ray{p, u}, eps);
        }
        chain.push_back(b);
        current = Ray{p, out};
        t_min = eps;
    }
    return chain;
}

std::vector<ScatterReturn> trace_returns(const ScatteringScene& scene, const RadarPose& pose, const RaySpec& spec) {
    const LaunchGrid grid = make_launch_grid(scene, pose, spec);
    std::vector<ScatterReturn> out;
    for (std::size_t r = 0; r < grid.rays.size(); ++r) {
        const auto chain = trace_chain(scene, pose, spec, grid.rays[r], grid.start_path_m);
        for (std::size_t k = 0; k < chain.size(); ++k) {
            const Bounce& b = chain[k];
            if (!b.in_exit_cone) continue;
            if (spec.shadowing && !b.unoccluded) continue;
            out.push_back({b.return_path_m, grid.footprint_m2 * b.cos_incidence, static_cast<int>(k + 1),
                           static_cast<std::uint32_t>(r), b.triangle, b.point});
        }
    }
    return out;
}

std::vector<ScatterReturn> trace_returns(const TriangleMesh& mesh, const RadarPose& pose, const RaySpec& spec) {
    return trace_returns(ScatteringScene(mesh), pose, spec);
}

}  // namespace isar
