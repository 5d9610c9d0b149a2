#include <gtest/gtest.h>

#include <cmath>
#include <set>

#include "isar/error.hpp"
#include "isar/geometry.hpp"

using namespace isar;

TEST(SlantGeometry, ZeroElevation) {
    const auto g = slant_geometry(1000.0, 0.0);
    EXPECT_DOUBLE_EQ(g.height_m, 0.0);
    EXPECT_DOUBLE_EQ(g.slant_range_m, 1000.0);
}

TEST(SlantGeometry, ClosedFormValues) {
    const auto g45 = slant_geometry(1000.0, 45.0);
    EXPECT_NEAR(g45.height_m, 1000.0, 1e-9);
    EXPECT_NEAR(g45.slant_range_m, 1414.2136, 1e-4);
    const auto g30 = slant_geometry(1000.0, 30.0);
    EXPECT_NEAR(g30.height_m, 577.3503, 1e-4);
    EXPECT_NEAR(g30.slant_range_m, 1154.7005, 1e-4);
    // Same quantities through the law of the right triangle.
    EXPECT_NEAR(g30.slant_range_m, 1000.0 / std::cos(M_PI / 6.0), 1e-9);
}

TEST(SlantGeometry, RejectsBadInputs) {
    EXPECT_THROW(slant_geometry(1000.0, 90.0), Error);
    EXPECT_THROW(slant_geometry(1000.0, -1.0), Error);
    EXPECT_THROW(slant_geometry(0.0, 10.0), Error);
    EXPECT_THROW(slant_geometry(1000.0, NAN), Error);
}

TEST(SlantGeometry, MonotoneInElevation) {
    SlantGeometry previous = slant_geometry(750.0, 0.0);
    for (int tenth = 1; tenth < 895; ++tenth) {
        const auto g = slant_geometry(750.0, tenth / 10.0);
        EXPECT_GT(g.height_m, previous.height_m);
        EXPECT_GT(g.slant_range_m, previous.slant_range_m);
        EXPECT_GE(g.slant_range_m, 750.0);
        previous = g;
    }
}

TEST(RadarPose, LineOfSightIsUnitAndPointsAtRadar) {
    const RadarPose pose = make_pose(30.0, 15.0, 1000.0);
    const Vec3 u = pose.line_of_sight();
    EXPECT_NEAR(norm(u), 1.0, 1e-12);
    const double c = std::cos(15.0 * M_PI / 180.0);
    EXPECT_NEAR(u.x, c * std::cos(M_PI / 6.0), 1e-12);
    EXPECT_NEAR(u.y, c * std::sin(M_PI / 6.0), 1e-12);
    EXPECT_NEAR(u.z, std::sin(15.0 * M_PI / 180.0), 1e-12);
    EXPECT_NEAR(pose.slant_range_m, slant_geometry(1000.0, 15.0).slant_range_m, 1e-12);
}

TEST(RadarPose, AzimuthNormalized) {
    EXPECT_DOUBLE_EQ(make_pose(-90.0, 0.0, 10.0).azimuth_deg, 270.0);
    EXPECT_DOUBLE_EQ(make_pose(720.0, 0.0, 10.0).azimuth_deg, 0.0);
    EXPECT_DOUBLE_EQ(normalize_azimuth(359.5), 359.5);
    const double tiny = normalize_azimuth(-1e-14);
    EXPECT_GE(tiny, 0.0);
    EXPECT_LT(tiny, 360.0);
}

TEST(RadarAzimuths, Examples) {
    ArrayConfig four;
    four.num_radars = 4;
    EXPECT_EQ(radar_azimuths(four, 0), (std::vector<double>{0, 90, 180, 270}));
    ArrayConfig one;
    EXPECT_EQ(radar_azimuths(one, 0), (std::vector<double>{0}));
    ArrayConfig three;
    three.num_radars = 3;
    EXPECT_EQ(radar_azimuths(three, 10), (std::vector<double>{10, 130, 250}));
}

TEST(RadarAzimuths, OffsetBoundNamedInError) {
    ArrayConfig four;
    four.num_radars = 4;
    try {
        radar_azimuths(four, 90);
        FAIL() << "expected an error";
    } catch (const Error& e) {
        EXPECT_EQ(e.module(), "geometry");
        EXPECT_NE(std::string(e.what()).find("< 90"), std::string::npos) << e.what();
    }
    EXPECT_THROW(radar_azimuths(four, -1), Error);
}

TEST(RadarAzimuths, PairwiseDistinctAndOrdered) {
    for (int r = 1; r <= 360; ++r) {
        ArrayConfig config;
        config.num_radars = r;
        const int spacing = 360 / r;
        for (int offset : {0, spacing / 2, spacing - 1}) {
            const auto az = radar_azimuths(config, offset);
            ASSERT_EQ(az.size(), static_cast<std::size_t>(r));
            EXPECT_EQ(std::set<double>(az.begin(), az.end()).size(), az.size());
            for (int k = 0; k < r; ++k) {
                EXPECT_EQ(az[static_cast<std::size_t>(k)], std::fmod(offset + k * spacing, 360.0));
                EXPECT_LT(az[static_cast<std::size_t>(k)], 360.0);
            }
        }
    }
}

TEST(EnumerateOffsets, Counts) {
    ArrayConfig config;
    config.num_radars = 4;
    EXPECT_EQ(enumerate_offsets(config).size(), 90u);
    EXPECT_EQ(enumerate_offsets(config).size() * config.elevations_deg.size(), 180u);
    config.num_radars = 1;
    EXPECT_EQ(enumerate_offsets(config).size() * config.elevations_deg.size(), 720u);
    config.num_radars = 5;
    EXPECT_EQ(enumerate_offsets(config).size(), 72u);
}

TEST(EnumerateOffsets, CoverageBound) {
    for (int r = 1; r <= 360; ++r) {
        ArrayConfig config;
        config.num_radars = r;
        const auto offsets = enumerate_offsets(config);
        EXPECT_LE(offsets.size() * static_cast<std::size_t>(r), 360u);
        if (360 % r == 0) {
            EXPECT_EQ(offsets.size() * static_cast<std::size_t>(r), 360u);
        }
        for (std::size_t i = 0; i < offsets.size(); ++i) EXPECT_EQ(offsets[i], static_cast<int>(i));
    }
}

TEST(ArrayConfig, Validation) {
    ArrayConfig config;
    EXPECT_NO_THROW(config.validate());
    config.num_radars = 0;
    EXPECT_THROW(config.validate(), Error);
    config.num_radars = 361;
    EXPECT_THROW(config.validate(), Error);
    config.num_radars = 2;
    config.elevations_deg = {15.0, 15.0};
    EXPECT_THROW(config.validate(), Error);
    config.elevations_deg = {15.0};
    config.ground_distance_m = -5.0;
    EXPECT_THROW(config.validate(), Error);
}
