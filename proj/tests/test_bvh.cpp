#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <optional>
#include <random>

#include "isar/bvh.hpp"
#include "isar/mesh.hpp"
#include "test_support.hpp"

using namespace isar;

namespace {

struct OracleHit {
    std::uint32_t triangle;
    double distance;
};

// Plane intersection followed by an edge-sign inside test; deliberately a
// different algorithm from the library's.
std::optional<double> plane_edge_hit(const Ray& ray, const Vec3& a, const Vec3& b, const Vec3& c) {
    const Vec3 n = cross(b - a, c - a);
    const double denom = dot(n, ray.direction);
    if (denom == 0.0) return std::nullopt;
    const double t = dot(n, a - ray.origin) / denom;
    if (!(t > 0.0)) return std::nullopt;
    const Vec3 p = ray.origin + ray.direction * t;
    const double e0 = dot(cross(b - a, p - a), n);
    const double e1 = dot(cross(c - b, p - b), n);
    const double e2 = dot(cross(a - c, p - c), n);
    if (e0 < 0.0 || e1 < 0.0 || e2 < 0.0) return std::nullopt;
    return t;
}

std::optional<OracleHit> brute_force(const TriangleMesh& mesh, const Ray& ray) {
    std::optional<OracleHit> best;
    for (std::size_t i = 0; i < mesh.triangle_count(); ++i) {
        const auto [a, b, c] = mesh.corners(i);
        const auto t = plane_edge_hit(ray, a, b, c);
        if (t && (!best || *t < best->distance)) best = OracleHit{static_cast<std::uint32_t>(i), *t};
    }
    return best;
}

TriangleMesh random_soup(std::mt19937_64& rng, int triangles) {
    std::uniform_real_distribution<double> center(-5.0, 5.0);
    std::uniform_real_distribution<double> spread(-1.5, 1.5);
    std::vector<Vec3> vertices;
    std::vector<Triangle> tris;
    for (int i = 0; i < triangles; ++i) {
        const Vec3 c{center(rng), center(rng), center(rng)};
        const auto base = static_cast<std::uint32_t>(vertices.size());
        for (int k = 0; k < 3; ++k) vertices.push_back(c + Vec3{spread(rng), spread(rng), spread(rng)});
        tris.push_back({base, base + 1, base + 2});
    }
    return TriangleMesh::from_triangles(vertices, tris);
}

Ray random_ray(std::mt19937_64& rng, const TriangleMesh& mesh) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    Vec3 origin{u(rng) * 12, u(rng) * 12, u(rng) * 12};
    // Aim most rays at a random triangle so hits are common.
    std::uniform_int_distribution<std::size_t> pick(0, mesh.triangle_count() - 1);
    const auto [a, b, c] = mesh.corners(pick(rng));
    Vec3 target = (a + b + c) * (1.0 / 3.0) + Vec3{u(rng), u(rng), u(rng)} * 0.5;
    if (u(rng) > 0.6) target = Vec3{u(rng), u(rng), u(rng)} * 20.0;
    return {origin, normalized(target - origin)};
}

}  // namespace

TEST(Bvh, SingleTriangleThroughCentroid) {
    const auto mesh = TriangleMesh::from_triangles({{0, 0, 0}, {1, 0, 0}, {0, 1, 0}}, {{0, 1, 2}});
    const Bvh bvh(mesh);
    const Ray ray{{1.0 / 3, 1.0 / 3, 5.0}, {0, 0, -1}};
    const auto hit = bvh.nearest_hit(ray);
    ASSERT_TRUE(hit);
    EXPECT_EQ(hit->triangle, 0u);
    EXPECT_NEAR(hit->distance, 5.0, 1e-12);
    const auto oracle = brute_force(mesh, ray);
    ASSERT_TRUE(oracle);
    EXPECT_NEAR(oracle->distance, hit->distance, 1e-12);
}

TEST(Bvh, TwoSidedHits) {
    const auto mesh = TriangleMesh::from_triangles({{0, 0, 0}, {1, 0, 0}, {0, 1, 0}}, {{0, 1, 2}});
    const Bvh bvh(mesh);
    EXPECT_TRUE(bvh.nearest_hit({{0.2, 0.2, -3.0}, {0, 0, 1}}));
}

TEST(Bvh, CubeAxisAlignedRay) {
    const auto mesh = load_stl(testing_support::binary_stl(testing_support::cube_facets()), {1.0, false}).mesh;
    const Bvh bvh(mesh);
    const Ray ray{{0.3, 0.6, 10.0}, {0, 0, -1}};
    const auto hit = bvh.nearest_hit(ray);
    const auto oracle = brute_force(mesh, ray);
    ASSERT_TRUE(hit && oracle);
    EXPECT_EQ(hit->triangle, oracle->triangle);
    EXPECT_NEAR(hit->distance, 9.0, 1e-9);
    EXPECT_NEAR(hit->distance, oracle->distance, 1e-9);
    EXPECT_GT(mesh.normals()[hit->triangle].z, 0.5);  // the top face
}

TEST(Bvh, MissingBoundingBoxHitsNothing) {
    const auto mesh = load_stl(testing_support::binary_stl(testing_support::cube_facets()), {1.0, false}).mesh;
    const Bvh bvh(mesh);
    const Ray ray{{5, 5, 5}, {0, 0, 1}};
    EXPECT_FALSE(bvh.nearest_hit(ray));
    EXPECT_FALSE(bvh.occluded(ray));
}

TEST(Bvh, RespectsDistanceWindow) {
    const auto mesh = load_stl(testing_support::binary_stl(testing_support::cube_facets()), {1.0, false}).mesh;
    const Bvh bvh(mesh);
    const Ray ray{{0.5, 0.5, 10.0}, {0, 0, -1}};
    const auto far = bvh.nearest_hit(ray, 9.5);
    ASSERT_TRUE(far);
    EXPECT_NEAR(far->distance, 10.0, 1e-9);  // the bottom face
    EXPECT_FALSE(bvh.nearest_hit(ray, 0.0, 8.0));
    EXPECT_FALSE(bvh.occluded(ray, 0.0, 8.0));
    EXPECT_TRUE(bvh.occluded(ray, 0.0, 9.5));
}

TEST(Bvh, MatchesBruteForceOnRandomMeshes) {
    std::mt19937_64 rng(99);
    std::size_t hits = 0;
    for (int m = 0; m < 10; ++m) {
        const auto mesh = random_soup(rng, 20 + 18 * m);
        const Bvh bvh(mesh);
        for (int r = 0; r < 100; ++r) {
            const Ray ray = random_ray(rng, mesh);
            const auto got = bvh.nearest_hit(ray);
            const auto want = brute_force(mesh, ray);
            ASSERT_EQ(got.has_value(), want.has_value()) << "mesh " << m << " ray " << r;
            EXPECT_EQ(bvh.occluded(ray), want.has_value());
            if (!want) continue;
            ++hits;
            EXPECT_EQ(got->triangle, want->triangle) << "mesh " << m << " ray " << r;
            EXPECT_NEAR(got->distance, want->distance, 1e-9);
        }
    }
    EXPECT_GT(hits, 400u);
}

TEST(Bvh, StructureIsNontrivialForLargeMeshes) {
    std::mt19937_64 rng(5);
    const auto mesh = random_soup(rng, 500);
    const Bvh bvh(mesh);
    EXPECT_GT(bvh.node_count(), 100u);
}

TEST(IntersectTriangle, EdgeCases) {
    const Vec3 a{0, 0, 0}, b{1, 0, 0}, c{0, 1, 0};
    const double inf = std::numeric_limits<double>::infinity();
    EXPECT_FALSE(intersect_triangle({{0.2, 0.2, 1}, {1, 0, 0}}, a, b, c, 0.0, inf));  // parallel
    EXPECT_FALSE(intersect_triangle({{0.2, 0.2, 1}, {0, 0, 1}}, a, b, c, 0.0, inf));  // pointing away
    EXPECT_FALSE(intersect_triangle({{0.9, 0.9, 1}, {0, 0, -1}}, a, b, c, 0.0, inf)); // outside
    const auto t = intersect_triangle({{0.2, 0.2, 2}, {0, 0, -2}}, a, b, c, 0.0, inf);
    ASSERT_TRUE(t);
    EXPECT_NEAR(*t, 1.0, 1e-12);  // in multiples of the unnormalized direction
}
