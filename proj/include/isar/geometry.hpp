#pragma once

#include <vector>

#include "isar/vec3.hpp"

namespace isar {

/// Radar position relative to the target rotation center.
struct RadarPose {
    double azimuth_deg = 0.0;      // [0, 360), counter-clockwise from +x
    double elevation_deg = 0.0;    // [0, 90)
    double slant_range_m = 1000.0;

    /// Unit vector pointing from the target toward the radar.
    Vec3 line_of_sight() const;
};

struct SlantGeometry {
    double height_m = 0.0;
    double slant_range_m = 0.0;
};

/// Target height above the radar's ground plane and the direct radar-to-target
/// distance for a radar at `ground_distance_m` looking up at `elevation_deg`.
SlantGeometry slant_geometry(double ground_distance_m, double elevation_deg);

/// Builds a validated pose; azimuth is wrapped into [0, 360).
RadarPose make_pose(double azimuth_deg, double elevation_deg, double ground_distance_m);

double normalize_azimuth(double azimuth_deg);

/// Multiple mono-static array: R radars spaced floor(360 / R) degrees apart.
struct ArrayConfig {
    int num_radars = 1;
    std::vector<double> elevations_deg{15.0, 30.0};
    double ground_distance_m = 1000.0;

    int spacing_deg() const { return 360 / num_radars; }
    /// Throws isar::Error on any broken invariant.
    void validate() const;
};

/// Azimuths of the R radars for one array placement, ordered by radar index.
std::vector<double> radar_azimuths(const ArrayConfig& config, int offset_deg);

/// All array placements: 0 .. spacing_deg - 1.
std::vector<int> enumerate_offsets(const ArrayConfig& config);

}  // namespace isar
