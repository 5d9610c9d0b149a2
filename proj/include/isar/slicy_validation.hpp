#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "isar/imaging.hpp"
#include "isar/mesh.hpp"
#include "isar/scattering.hpp"

namespace isar {

/// Published calibration-target footprint, meters.
inline constexpr double kSlicyWidthM = 2.445;
inline constexpr double kSlicyLengthM = 2.75;

struct SlicyValidationOptions {
    std::vector<double> elevations_deg{15.0, 30.0};
    std::vector<double> rotations_deg{0, 45, 90, 135, 180, 225, 270, 315};
    double ground_distance_m = 1000.0;
    double dynamic_range_db = 40.0;
    WaveformSpec waveform;
    RaySpec ray;
    int workers = 1;
    std::optional<std::filesystem::path> png_directory;  // renders are skipped when unset
};

struct SlicyAspect {
    double elevation_deg = 0.0;
    double rotation_deg = 0.0;
    std::size_t returns = 0;
    std::size_t multi_bounce_returns = 0;
    std::size_t returns_checked = 0;
    std::size_t shadow_violations = 0;
    double energy_db = 0.0;
    std::string png;
};

struct SlicyReport {
    double footprint_width_m = 0.0;
    double footprint_length_m = 0.0;
    bool footprint_within_10pct = false;
    std::vector<SlicyAspect> aspects;
    bool multi_bounce_at_cardinals = false;  // (a)
    bool shadowed_facets_silent = false;     // (b)
    bool aspect_dependence = false;          // (c)
    double min_energy_spread_db = 0.0;

    bool passed() const { return multi_bounce_at_cardinals && shadowed_facets_silent && aspect_dependence; }
    std::string to_json() const;
};

/// Counts returns whose last bounce point lacks a clear line to the radar,
/// using a linear scan over every triangle (independent of the BVH). Zero means
/// no return leaks out of shadow.
std::size_t count_shadow_violations(const TriangleMesh& mesh, const RadarPose& pose,
                                    const std::vector<ScatterReturn>& returns);

/// Images the target over every (elevation, rotation) pair and evaluates the
/// three checks: (a) multi-bounce returns exist at the cardinal rotations,
/// (b) no return comes from a shadowed point, (c) image energy changes by more
/// than 3 dB across rotations at each elevation. `mesh` should be centered.
SlicyReport validate_slicy(const TriangleMesh& mesh, const SlicyValidationOptions& options);

}  // namespace isar
