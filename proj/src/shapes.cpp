#include "isar/shapes.hpp"

#include <cmath>
#include <map>

#include "isar/error.hpp"

namespace isar::shapes {

std::uint32_t MeshBuilder::add(const Vec3& v) {
    vertices_.push_back(v);
    return static_cast<std::uint32_t>(vertices_.size() - 1);
}

void MeshBuilder::triangle(const Vec3& a, const Vec3& b, const Vec3& c) {
    triangles_.push_back({add(a), add(b), add(c)});
}

void MeshBuilder::quad_grid(const Vec3& origin, const Vec3& edge_u, const Vec3& edge_v, int nu, int nv) {
    auto at = [&](int i, int j) {
        return origin + edge_u * (static_cast<double>(i) / nu) + edge_v * (static_cast<double>(j) / nv);
    };
    for (int i = 0; i < nu; ++i) {
        for (int j = 0; j < nv; ++j) {
            const Vec3 p0 = at(i, j);
            const Vec3 p1 = at(i + 1, j);
            const Vec3 p2 = at(i + 1, j + 1);
            const Vec3 p3 = at(i, j + 1);
            triangle(p0, p1, p2);
            triangle(p0, p2, p3);
        }
    }
}

namespace {
// Ring vertices sit half a segment off the axes so facet normals point along
// 0, 360/S, 2*360/S, ... degrees.
Vec3 ring_point(const Vec3& c, double radius, int i, int segments, double z) {
    const double a = (static_cast<double>(i) - 0.5) * 2.0 * kPi / segments;
    return {c.x + radius * std::cos(a), c.y + radius * std::sin(a), z};
}
}  // namespace

void MeshBuilder::cylinder_side(const Vec3& base, double radius, double height, int segments, int stacks,
                                bool outward) {
    for (int i = 0; i < segments; ++i) {
        for (int s = 0; s < stacks; ++s) {
            const double z0 = base.z + height * s / stacks;
            const double z1 = base.z + height * (s + 1) / stacks;
            const Vec3 p0 = ring_point(base, radius, i, segments, z0);
            const Vec3 p1 = ring_point(base, radius, i + 1, segments, z0);
            const Vec3 p2 = ring_point(base, radius, i + 1, segments, z1);
            const Vec3 p3 = ring_point(base, radius, i, segments, z1);
            if (outward) {
                triangle(p0, p1, p2);
                triangle(p0, p2, p3);
            } else {
                triangle(p0, p2, p1);
                triangle(p0, p3, p2);
            }
        }
    }
}

void MeshBuilder::disk(const Vec3& center, double radius, int segments, bool up) {
    for (int i = 0; i < segments; ++i) {
        const Vec3 a = ring_point(center, radius, i, segments, center.z);
        const Vec3 b = ring_point(center, radius, i + 1, segments, center.z);
        if (up) {
            triangle(center, a, b);
        } else {
            triangle(center, b, a);
        }
    }
}

void MeshBuilder::annulus(const Vec3& center, double inner, double outer, int segments, bool up) {
    for (int i = 0; i < segments; ++i) {
        const Vec3 a = ring_point(center, inner, i, segments, center.z);
        const Vec3 b = ring_point(center, outer, i, segments, center.z);
        const Vec3 c = ring_point(center, outer, i + 1, segments, center.z);
        const Vec3 d = ring_point(center, inner, i + 1, segments, center.z);
        if (up) {
            triangle(a, b, c);
            triangle(a, c, d);
        } else {
            triangle(a, c, b);
            triangle(a, d, c);
        }
    }
}

void MeshBuilder::box(const Vec3& lo, const Vec3& hi, int cells) {
    const Vec3 d = hi - lo;
    const Vec3 ex{d.x, 0, 0};
    const Vec3 ey{0, d.y, 0};
    const Vec3 ez{0, 0, d.z};
    quad_grid(lo, ey, ex, cells, cells);                  // -z
    quad_grid(lo + ez, ex, ey, cells, cells);             // +z
    quad_grid(lo, ex, ez, cells, cells);                  // -y
    quad_grid(lo + ey, ez, ex, cells, cells);             // +y
    quad_grid(lo, ez, ey, cells, cells);                  // -x
    quad_grid(lo + ex, ey, ez, cells, cells);             // +x
}

void MeshBuilder::ellipsoid(const Vec3& center, const Vec3& radii, int slices, int stacks) {
    auto at = [&](int j, int i) {
        const double phi = kPi * j / stacks;
        const double theta = 2.0 * kPi * i / slices;
        return Vec3{center.x + radii.x * std::sin(phi) * std::cos(theta),
                    center.y + radii.y * std::sin(phi) * std::sin(theta), center.z + radii.z * std::cos(phi)};
    };
    for (int j = 0; j < stacks; ++j) {
        for (int i = 0; i < slices; ++i) {
            const Vec3 a = at(j, i);
            const Vec3 b = at(j + 1, i);
            const Vec3 c = at(j + 1, i + 1);
            const Vec3 d = at(j, i + 1);
            if (j > 0) triangle(a, b, d);
            if (j + 1 < stacks) triangle(b, c, d);
        }
    }
}

TriangleMesh MeshBuilder::build() const { return TriangleMesh::from_triangles(vertices_, triangles_); }

TriangleMesh plate(double size, int cells) {
    MeshBuilder b;
    b.quad_grid({0, -size / 2, -size / 2}, {0, size, 0}, {0, 0, size}, cells, cells);
    return b.build();
}

TriangleMesh dihedral(double size, int cells) {
    MeshBuilder b;
    b.quad_grid({0, 0, 0}, {0, 0, size}, {size, 0, 0}, cells, cells);  // y = 0 plane, normal +y
    b.quad_grid({0, 0, 0}, {0, size, 0}, {0, 0, size}, cells, cells);  // x = 0 plane, normal +x
    return b.build();
}

TriangleMesh trihedral(double size, int cells) {
    MeshBuilder b;
    b.quad_grid({0, 0, 0}, {size, 0, 0}, {0, size, 0}, cells, cells);  // z = 0, normal +z
    b.quad_grid({0, 0, 0}, {0, 0, size}, {size, 0, 0}, cells, cells);  // y = 0, normal +y
    b.quad_grid({0, 0, 0}, {0, size, 0}, {0, 0, size}, cells, cells);  // x = 0, normal +x
    return b.build();
}

TriangleMesh slicy() {
    constexpr double W = 2.445;   // x extent
    constexpr double L = 2.75;    // y extent
    constexpr double H = 0.765;   // block height
    constexpr double h = H / 2;   // stepped-down quadrant
    constexpr int kSegments = 64;

    MeshBuilder b;
    // Block with the +x/+y quadrant lowered.
    b.quad_grid({0, 0, 0}, {0, L, 0}, {W, 0, 0}, 14, 16);                   // bottom
    b.quad_grid({0, 0, H}, {W / 2, 0, 0}, {0, L / 2, 0}, 16, 16);           // tops
    b.quad_grid({W / 2, 0, H}, {W / 2, 0, 0}, {0, L / 2, 0}, 16, 16);
    b.quad_grid({0, L / 2, H}, {W / 2, 0, 0}, {0, L / 2, 0}, 16, 16);
    b.quad_grid({W / 2, L / 2, h}, {W / 2, 0, 0}, {0, L / 2, 0}, 16, 16);   // lowered top
    b.quad_grid({0, 0, 0}, {0, 0, H}, {0, L, 0}, 8, 32);                    // x = 0
    b.quad_grid({0, 0, 0}, {W, 0, 0}, {0, 0, H}, 32, 8);                    // y = 0
    b.quad_grid({W, 0, 0}, {0, L / 2, 0}, {0, 0, H}, 16, 8);                // x = W
    b.quad_grid({W, L / 2, 0}, {0, L / 2, 0}, {0, 0, h}, 16, 4);
    b.quad_grid({0, L, 0}, {0, 0, H}, {W / 2, 0, 0}, 8, 16);                // y = L
    b.quad_grid({W / 2, L, 0}, {0, 0, h}, {W / 2, 0, 0}, 4, 16);
    b.quad_grid({W / 2, L / 2, h}, {0, L / 2, 0}, {0, 0, H - h}, 16, 4);    // step walls
    b.quad_grid({W / 2, L / 2, h}, {0, 0, H - h}, {W / 2, 0, 0}, 4, 16);

    // Tall solid cylinder.
    const Vec3 tall{W / 4, L / 4, H};
    b.cylinder_side(tall, 0.3, 0.915, kSegments, 4);
    b.disk({tall.x, tall.y, H + 0.915}, 0.3, kSegments);

    // Top hat: brim plus crown.
    const Vec3 hat{W / 4, 3 * L / 4, H};
    b.cylinder_side(hat, 0.4, 0.05, kSegments, 1);
    b.annulus({hat.x, hat.y, H + 0.05}, 0.2, 0.4, kSegments);
    b.cylinder_side({hat.x, hat.y, H + 0.05}, 0.2, 0.3, kSegments, 2);
    b.disk({hat.x, hat.y, H + 0.35}, 0.2, kSegments);

    // Hollow cylinder with a raised cavity floor.
    const Vec3 hollow{3 * W / 4, L / 4, H};
    b.cylinder_side(hollow, 0.3, 0.5, kSegments, 2);
    b.cylinder_side(hollow, 0.22, 0.5, kSegments, 2, false);
    b.annulus({hollow.x, hollow.y, H + 0.5}, 0.22, 0.3, kSegments);
    b.disk({hollow.x, hollow.y, H + 0.1}, 0.22, kSegments);

    return b.build();
}

namespace {

struct AircraftParams {
    double length;
    double radius;
    double span;
    double root_chord;
    double sweep;        // leading-edge x offset of the tip relative to the root
    double tail_height;
    bool twin_tails;
    bool canards;
};

const std::map<std::string, AircraftParams>& aircraft_table() {
    static const std::map<std::string, AircraftParams> table{
        {"F15", {11.6, 0.75, 7.8, 4.2, 2.6, 3.4, true, false}},
        {"F16", {9.0, 0.62, 5.6, 3.4, 2.0, 3.0, false, false}},
        {"J11", {13.0, 0.78, 8.8, 4.6, 3.0, 3.6, true, false}},
        {"J15", {13.0, 0.80, 8.8, 4.8, 3.0, 3.5, true, true}},
        {"MIG29", {10.4, 0.70, 6.8, 4.0, 2.8, 3.1, true, false}},
        {"MIG35", {10.6, 0.72, 7.2, 4.1, 2.8, 3.2, true, false}},
        {"EF2000", {9.6, 0.66, 6.6, 4.6, 3.6, 3.2, false, true}},
    };
    return table;
}

/// Flat two-sided planform quad: root (x0..x0+root) at y=0 to tip at y=span.
void wing(MeshBuilder& b, double x0, double root, double tip, double sweep, double span, double z, double side) {
    const Vec3 r0{x0, 0, z};
    const Vec3 r1{x0 + root, 0, z};
    const Vec3 t0{x0 + sweep, side * span, z};
    const Vec3 t1{x0 + sweep + tip, side * span, z};
    b.triangle(r0, r1, t1);
    b.triangle(r0, t1, t0);
}

void fin(MeshBuilder& b, double x0, double root, double height, double y, double lean) {
    const Vec3 r0{x0, y, 0};
    const Vec3 r1{x0 + root, y, 0};
    const Vec3 t0{x0 + 0.6 * root, y + lean, height};
    const Vec3 t1{x0 + root, y + lean, height};
    b.triangle(r0, r1, t1);
    b.triangle(r0, t1, t0);
}

}  // namespace

TriangleMesh surrogate_aircraft(const std::string& class_name) {
    const auto it = aircraft_table().find(class_name);
    if (it == aircraft_table().end()) throw Error("shapes", "no surrogate geometry for '" + class_name + "'");
    const AircraftParams& p = it->second;

    MeshBuilder b;
    b.ellipsoid({0, 0, 0}, {p.length / 2, p.radius, p.radius * 0.85}, 96, 48);
    const double half = p.span / 2;
    const double wing_x = -0.15 * p.length;

    // Slab-sided intake trunk with wing-root gloves. Glove faces, trunk sides,
    // and the wing top meet in concave corners that retro-reflect over wide
    // aspect ranges, as intakes and wing roots do on real airframes.
    const double trunk_w = 1.05 * p.radius;
    const double trunk_h = 0.6 * p.root_chord / 4.2;
    b.box({wing_x - 0.3, -trunk_w, -0.5 * p.radius}, {wing_x + p.root_chord + 0.6, trunk_w, trunk_h});
    const double glove_w = 0.12 * p.span;
    for (double side : {1.0, -1.0}) {
        const double y0 = side > 0 ? trunk_w : -trunk_w - glove_w;
        b.box({wing_x + 0.3 * p.root_chord, y0, 0.0}, {wing_x + 0.65 * p.root_chord, y0 + glove_w, 0.8 * trunk_h});
    }
    for (double side : {1.0, -1.0}) {
        wing(b, wing_x, p.root_chord, 0.25 * p.root_chord, p.sweep, half, 0.0, side);
        wing(b, -0.45 * p.length, 0.35 * p.root_chord, 0.12 * p.root_chord, 0.4 * p.sweep, 0.4 * half, 0.0, side);
        if (p.canards) wing(b, 0.22 * p.length, 0.3 * p.root_chord, 0.1 * p.root_chord, 0.3 * p.sweep, 0.35 * half, 0.1, side);
    }
    const double fin_x = -0.48 * p.length;
    if (p.twin_tails) {
        fin(b, fin_x, 0.3 * p.length, p.tail_height * 0.6, 0.55 * p.radius, 0.35);
        fin(b, fin_x, 0.3 * p.length, p.tail_height * 0.6, -0.55 * p.radius, -0.35);
    } else {
        fin(b, fin_x, 0.32 * p.length, p.tail_height * 0.65, 0.0, 0.0);
    }
    return b.build();
}

}  // namespace isar::shapes
