#include "isar/slicy_validation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include <json.hpp>

#include "isar/bvh.hpp"
#include "isar/geometry.hpp"
#include "isar/parallel.hpp"
#include "isar/render.hpp"

namespace isar {

namespace {

bool is_cardinal(double rotation_deg) {
    const double r = normalize_azimuth(rotation_deg);
    return std::fmod(r, 90.0) == 0.0;
}

std::string png_name(double elevation_deg, double rotation_deg) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "slicy_e%02d_r%03d.png", static_cast<int>(std::lround(elevation_deg)),
                  static_cast<int>(std::lround(normalize_azimuth(rotation_deg))));
    return buf;
}

}  // namespace

std::size_t count_shadow_violations(const TriangleMesh& mesh, const RadarPose& pose,
                                    const std::vector<ScatterReturn>& returns) {
    const Vec3 u = pose.line_of_sight();
    const double t_min = 1e-6 * (1.0 + mesh.bounding_radius() + norm(mesh.centroid()));
    std::size_t violations = 0;
    for (const auto& r : returns) {
        const Ray ray{r.last_hit, u};
        for (std::size_t i = 0; i < mesh.triangle_count(); ++i) {
            const auto [a, b, c] = mesh.corners(i);
            if (intersect_triangle(ray, a, b, c, t_min, std::numeric_limits<double>::infinity())) {
                ++violations;
                break;
            }
        }
    }
    return violations;
}

SlicyReport validate_slicy(const TriangleMesh& mesh, const SlicyValidationOptions& options) {
    options.waveform.validate();
    options.ray.validate();

    SlicyReport report;
    const Vec3 lo = mesh.bounds_min();
    const Vec3 hi = mesh.bounds_max();
    const double dx = hi.x - lo.x;
    const double dy = hi.y - lo.y;
    report.footprint_width_m = std::min(dx, dy);
    report.footprint_length_m = std::max(dx, dy);
    report.footprint_within_10pct =
        std::abs(report.footprint_width_m - kSlicyWidthM) <= 0.1 * kSlicyWidthM &&
        std::abs(report.footprint_length_m - kSlicyLengthM) <= 0.1 * kSlicyLengthM;

    for (double e : options.elevations_deg) {
        for (double r : options.rotations_deg) {
            SlicyAspect aspect;
            aspect.elevation_deg = e;
            aspect.rotation_deg = r;
            report.aspects.push_back(aspect);
        }
    }
    if (options.png_directory) std::filesystem::create_directories(*options.png_directory);

    const WaveformSpec& wf = options.waveform;
    parallel_for(report.aspects.size(), options.workers, [&](std::size_t i) {
        SlicyAspect& aspect = report.aspects[i];
        const TriangleMesh turned = rotate_mesh(mesh, aspect.rotation_deg);
        const ScatteringScene scene(turned);
        const RadarPose pose = make_pose(0.0, aspect.elevation_deg, options.ground_distance_m);
        PhaseHistory ph = PhaseHistory::zeros(wf);
        for (int p = 0; p < wf.num_pulses; ++p) {
            RadarPose pulse = pose;
            pulse.azimuth_deg = normalize_azimuth(pose.azimuth_deg + wf.pulse_aspect_deg(p));
            const auto returns = trace_returns(scene, pulse, options.ray);
            accumulate_returns(ph, p, returns, wf.motion_compensation ? pose.slant_range_m : 0.0);
            aspect.returns += returns.size();
            aspect.multi_bounce_returns +=
                static_cast<std::size_t>(std::count_if(returns.begin(), returns.end(),
                                                       [](const ScatterReturn& s) { return s.bounce_count >= 2; }));
            if (p == wf.num_pulses / 2) {
                aspect.returns_checked = returns.size();
                aspect.shadow_violations = count_shadow_violations(turned, pulse, returns);
            }
        }
        const ComplexImage image = form_image(ph);
        const double energy = image.pixels.energy();
        aspect.energy_db = energy > 0.0 ? 10.0 * std::log10(energy) : -std::numeric_limits<double>::infinity();
        if (options.png_directory && energy > 0.0) {
            aspect.png = png_name(aspect.elevation_deg, aspect.rotation_deg);
            write_png(render_magnitude(image, options.dynamic_range_db), *options.png_directory / aspect.png);
        }
    });

    report.multi_bounce_at_cardinals = true;
    report.shadowed_facets_silent = true;
    for (const auto& a : report.aspects) {
        if (is_cardinal(a.rotation_deg) && a.multi_bounce_returns == 0) report.multi_bounce_at_cardinals = false;
        if (a.shadow_violations != 0) report.shadowed_facets_silent = false;
    }
    report.aspect_dependence = !options.elevations_deg.empty();
    report.min_energy_spread_db = std::numeric_limits<double>::infinity();
    for (double e : options.elevations_deg) {
        double lo_db = std::numeric_limits<double>::infinity();
        double hi_db = -lo_db;
        for (const auto& a : report.aspects) {
            if (a.elevation_deg != e) continue;
            lo_db = std::min(lo_db, a.energy_db);
            hi_db = std::max(hi_db, a.energy_db);
        }
        const double spread = hi_db - lo_db;
        report.min_energy_spread_db = std::min(report.min_energy_spread_db, spread);
        if (!(spread > 3.0)) report.aspect_dependence = false;
    }
    return report;
}

std::string SlicyReport::to_json() const {
    nlohmann::json aspects_json = nlohmann::json::array();
    for (const auto& a : aspects) {
        aspects_json.push_back({{"elevation_deg", a.elevation_deg},
                                {"rotation_deg", a.rotation_deg},
                                {"returns", a.returns},
                                {"multi_bounce_returns", a.multi_bounce_returns},
                                {"returns_checked_for_shadowing", a.returns_checked},
                                {"shadow_violations", a.shadow_violations},
                                {"energy_db", std::isfinite(a.energy_db) ? nlohmann::json(a.energy_db) : nlohmann::json()},
                                {"png", a.png}});
    }
    nlohmann::json j = {
        {"footprint_m", {footprint_width_m, footprint_length_m}},
        {"footprint_within_10pct", footprint_within_10pct},
        {"checks",
         {{"multi_bounce_at_cardinal_aspects", multi_bounce_at_cardinals},
          {"shadowed_facets_produce_no_returns", shadowed_facets_silent},
          {"aspect_energy_spread_over_3db", aspect_dependence},
          {"min_energy_spread_db", std::isfinite(min_energy_spread_db) ? nlohmann::json(min_energy_spread_db) : nlohmann::json()}}},
        {"passed", passed()},
        {"aspects", aspects_json}};
    return j.dump(2);
}

}  // namespace isar
