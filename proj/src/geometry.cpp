#include "isar/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "isar/error.hpp"

namespace isar {

namespace {
[[noreturn]] void fail(const std::string& message) { throw Error("geometry", message); }
}  // namespace

Vec3 RadarPose::line_of_sight() const {
    const double az = deg_to_rad(azimuth_deg);
    const double el = deg_to_rad(elevation_deg);
    return {std::cos(el) * std::cos(az), std::cos(el) * std::sin(az), std::sin(el)};
}

SlantGeometry slant_geometry(double ground_distance_m, double elevation_deg) {
    if (!(ground_distance_m > 0.0) || !std::isfinite(ground_distance_m)) {
        fail("ground distance must be positive, got " + std::to_string(ground_distance_m));
    }
    if (!(elevation_deg >= 0.0 && elevation_deg < 90.0)) {
        fail("elevation must lie in [0, 90) degrees, got " + std::to_string(elevation_deg));
    }
    const double height = ground_distance_m * std::tan(deg_to_rad(elevation_deg));
    return {height, std::hypot(ground_distance_m, height)};
}

double normalize_azimuth(double azimuth_deg) {
    double a = std::fmod(azimuth_deg, 360.0);
    if (a < 0.0) a += 360.0;
    return a >= 360.0 ? 0.0 : a;
}

RadarPose make_pose(double azimuth_deg, double elevation_deg, double ground_distance_m) {
    if (!std::isfinite(azimuth_deg)) fail("azimuth must be finite");
    const SlantGeometry g = slant_geometry(ground_distance_m, elevation_deg);
    return {normalize_azimuth(azimuth_deg), elevation_deg, g.slant_range_m};
}

void ArrayConfig::validate() const {
    if (num_radars < 1 || num_radars > 360) fail("radar count must lie in [1, 360], got " + std::to_string(num_radars));
    if (elevations_deg.empty()) fail("at least one elevation is required");
    for (std::size_t i = 0; i < elevations_deg.size(); ++i) {
        const double e = elevations_deg[i];
        if (!(e >= 0.0 && e < 90.0)) fail("elevation must lie in [0, 90) degrees, got " + std::to_string(e));
        for (std::size_t j = 0; j < i; ++j) {
            if (elevations_deg[j] == e) fail("elevations must be distinct, " + std::to_string(e) + " repeats");
        }
    }
    if (!(ground_distance_m > 0.0) || !std::isfinite(ground_distance_m)) fail("ground distance must be positive");
}

std::vector<double> radar_azimuths(const ArrayConfig& config, int offset_deg) {
    config.validate();
    const int spacing = config.spacing_deg();
    if (offset_deg < 0 || offset_deg >= spacing) {
        fail("offset must be >= 0 and < " + std::to_string(spacing) + " for " + std::to_string(config.num_radars) +
             " radars, got " + std::to_string(offset_deg));
    }
    std::vector<double> out;
    out.reserve(static_cast<std::size_t>(config.num_radars));
    for (int k = 0; k < config.num_radars; ++k) out.push_back(static_cast<double>((offset_deg + k * spacing) % 360));
    return out;
}

std::vector<int> enumerate_offsets(const ArrayConfig& config) {
    config.validate();
    std::vector<int> out(static_cast<std::size_t>(config.spacing_deg()));
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = static_cast<int>(i);
    return out;
}

}  // namespace isar
