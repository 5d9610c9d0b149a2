#include "isar/mesh.hpp"

#include <algorithm>
#include <bit>
#include <cctype>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <limits>
#include <map>
#include <sstream>

#include "isar/error.hpp"

namespace isar {

namespace {

constexpr std::size_t kStlHeaderBytes = 80;
constexpr std::size_t kStlRecordBytes = 50;

[[noreturn]] void fail(const std::string& message) { throw Error("mesh", message); }

Vec3 winding_normal(const Vec3& a, const Vec3& b, const Vec3& c) { return cross(b - a, c - a); }

std::uint32_t read_u32(const std::uint8_t* p) {
    return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
           (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

float read_f32(const std::uint8_t* p) { return std::bit_cast<float>(read_u32(p)); }

void write_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

void write_f32(std::vector<std::uint8_t>& out, float v) { write_u32(out, std::bit_cast<std::uint32_t>(v)); }

/// Collects facet corners and merges bit-identical coordinates.
class VertexPool {
public:
    std::uint32_t index_of(const Vec3& v) {
        const Key key{v.x, v.y, v.z};
        auto [it, inserted] = lookup_.try_emplace(key, static_cast<std::uint32_t>(vertices_.size()));
        if (inserted) vertices_.push_back(v);
        return it->second;
    }
    std::vector<Vec3> take() { return std::move(vertices_); }

private:
    using Key = std::array<double, 3>;
    std::map<Key, std::uint32_t> lookup_;
    std::vector<Vec3> vertices_;
};

struct ParsedFacets {
    std::vector<Vec3> vertices;
    std::vector<Triangle> triangles;
    std::vector<Vec3> normals;
};

ParsedFacets parse_binary(std::span<const std::uint8_t> bytes) {
    if (bytes.size() < kStlHeaderBytes + 4) {
        fail("truncated file: " + std::to_string(bytes.size()) + " bytes is shorter than the 84-byte binary STL header");
    }
    const std::uint32_t count = read_u32(bytes.data() + kStlHeaderBytes);
    const std::size_t remaining = bytes.size() - kStlHeaderBytes - 4;
    const std::size_t needed = static_cast<std::size_t>(count) * kStlRecordBytes;
    if (needed > remaining) {
        fail("truncated file: header declares " + std::to_string(count) + " triangles (" + std::to_string(needed) +
             " bytes) but only " + std::to_string(remaining) + " bytes remain");
    }
    if (needed < remaining) {
        fail("triangle count mismatch: header declares " + std::to_string(count) + " triangles but the body holds " +
             std::to_string(remaining) + " bytes");
    }
    ParsedFacets out;
    out.triangles.reserve(count);
    out.normals.reserve(count);
    VertexPool pool;
    const std::uint8_t* rec = bytes.data() + kStlHeaderBytes + 4;
    for (std::uint32_t i = 0; i < count; ++i, rec += kStlRecordBytes) {
        auto vec = [&](int slot) {
            const std::uint8_t* p = rec + 12 * slot;
            return Vec3{read_f32(p), read_f32(p + 4), read_f32(p + 8)};
        };
        out.normals.push_back(vec(0));
        out.triangles.push_back({pool.index_of(vec(1)), pool.index_of(vec(2)), pool.index_of(vec(3))});
    }
    out.vertices = pool.take();
    return out;
}

double parse_number(std::istringstream& in, const char* what) {
    std::string token;
    if (!(in >> token)) fail(std::string("truncated file: missing ") + what + " in ASCII STL");
    try {
        std::size_t used = 0;
        const double value = std::stod(token, &used);
        if (used != token.size()) throw std::invalid_argument(token);
        return value;
    } catch (const std::exception&) {
        fail("malformed ASCII STL: expected a number for " + std::string(what) + ", got '" + token + "'");
    }
}

void expect_token(std::istringstream& in, const char* expected) {
    std::string token;
    if (!(in >> token)) fail(std::string("truncated file: expected '") + expected + "' in ASCII STL");
    if (token != expected) fail(std::string("malformed ASCII STL: expected '") + expected + "', got '" + token + "'");
}

ParsedFacets parse_ascii(std::span<const std::uint8_t> bytes) {
    std::istringstream in(std::string(bytes.begin(), bytes.end()));
    std::string token;
    in >> token;  // "solid"
    std::string line;
    std::getline(in, line);  // solid name

    ParsedFacets out;
    VertexPool pool;
    bool closed = false;
    while (in >> token) {
        if (token == "endsolid") {
            closed = true;
            break;
        }
        if (token != "facet") fail("malformed ASCII STL: expected 'facet', got '" + token + "'");
        expect_token(in, "normal");
        Vec3 n;
        n.x = parse_number(in, "normal");
        n.y = parse_number(in, "normal");
        n.z = parse_number(in, "normal");
        expect_token(in, "outer");
        expect_token(in, "loop");
        Triangle tri{};
        for (auto& index : tri) {
            expect_token(in, "vertex");
            Vec3 v;
            v.x = parse_number(in, "vertex");
            v.y = parse_number(in, "vertex");
            v.z = parse_number(in, "vertex");
            index = pool.index_of(v);
        }
        expect_token(in, "endloop");
        expect_token(in, "endfacet");
        out.triangles.push_back(tri);
        out.normals.push_back(n);
    }
    if (!closed) fail("truncated file: ASCII STL ends without 'endsolid'");
    out.vertices = pool.take();
    return out;
}

bool looks_ascii(std::span<const std::uint8_t> bytes) {
    std::size_t i = 0;
    while (i < bytes.size() && std::isspace(bytes[i])) ++i;
    return bytes.size() - i >= 5 && std::memcmp(bytes.data() + i, "solid", 5) == 0;
}

bool exact_binary_size(std::span<const std::uint8_t> bytes) {
    if (bytes.size() < kStlHeaderBytes + 4) return false;
    const std::uint64_t count = read_u32(bytes.data() + kStlHeaderBytes);
    return kStlHeaderBytes + 4 + count * kStlRecordBytes == bytes.size();
}

}  // namespace

TriangleMesh TriangleMesh::from_triangles(std::vector<Vec3> vertices, const std::vector<Triangle>& triangles) {
    return from_facets(std::move(vertices), triangles, {});
}

TriangleMesh TriangleMesh::from_facets(std::vector<Vec3> vertices, const std::vector<Triangle>& triangles,
                                       const std::vector<Vec3>& facet_normals, std::size_t* dropped,
                                       std::size_t* recomputed) {
    for (const auto& v : vertices) {
        if (!is_finite(v)) fail("non-finite vertex coordinate");
    }
    TriangleMesh mesh;
    std::size_t n_dropped = 0;
    std::size_t n_recomputed = 0;
    mesh.triangles_.reserve(triangles.size());
    mesh.normals_.reserve(triangles.size());
    for (std::size_t i = 0; i < triangles.size(); ++i) {
        const Triangle& t = triangles[i];
        for (auto idx : t) {
            if (idx >= vertices.size()) {
                fail("triangle " + std::to_string(i) + " references vertex " + std::to_string(idx) + " of " +
                     std::to_string(vertices.size()));
            }
        }
        const Vec3 w = winding_normal(vertices[t[0]], vertices[t[1]], vertices[t[2]]);
        const double twice_area = norm(w);
        if (!(0.5 * twice_area > kMinTriangleArea)) {
            ++n_dropped;
            continue;
        }
        const Vec3 geometric = w * (1.0 / twice_area);
        Vec3 normal = geometric;
        if (i < facet_normals.size()) {
            const Vec3& supplied = facet_normals[i];
            const double len = norm(supplied);
            if (is_finite(supplied) && len > 0.0 && dot(supplied, geometric) > 0.0) {
                normal = supplied * (1.0 / len);
            } else {
                ++n_recomputed;
            }
        }
        mesh.triangles_.push_back(t);
        mesh.normals_.push_back(normal);
    }
    if (mesh.triangles_.empty()) {
        fail(triangles.empty() ? "mesh has no triangles"
                               : "all " + std::to_string(triangles.size()) + " triangles are degenerate");
    }
    mesh.vertices_ = std::move(vertices);
    if (dropped) *dropped = n_dropped;
    if (recomputed) *recomputed = n_recomputed;
    return mesh;
}

std::array<Vec3, 3> TriangleMesh::corners(std::size_t tri) const {
    const Triangle& t = triangles_[tri];
    return {vertices_[t[0]], vertices_[t[1]], vertices_[t[2]]};
}

double TriangleMesh::triangle_area(std::size_t tri) const {
    const auto [a, b, c] = corners(tri);
    return 0.5 * norm(winding_normal(a, b, c));
}

double TriangleMesh::surface_area() const {
    double total = 0.0;
    for (std::size_t i = 0; i < triangles_.size(); ++i) total += triangle_area(i);
    return total;
}

Vec3 TriangleMesh::centroid() const {
    Vec3 weighted;
    double total = 0.0;
    for (std::size_t i = 0; i < triangles_.size(); ++i) {
        const auto [a, b, c] = corners(i);
        const double area = triangle_area(i);
        weighted += (a + b + c) * (area / 3.0);
        total += area;
    }
    return weighted * (1.0 / total);
}

Vec3 TriangleMesh::bounds_min() const {
    Vec3 lo{std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity(),
            std::numeric_limits<double>::infinity()};
    for (const auto& t : triangles_) {
        for (auto idx : t) {
            const Vec3& v = vertices_[idx];
            lo = {std::min(lo.x, v.x), std::min(lo.y, v.y), std::min(lo.z, v.z)};
        }
    }
    return lo;
}

Vec3 TriangleMesh::bounds_max() const {
    Vec3 hi{-std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity(),
            -std::numeric_limits<double>::infinity()};
    for (const auto& t : triangles_) {
        for (auto idx : t) {
            const Vec3& v = vertices_[idx];
            hi = {std::max(hi.x, v.x), std::max(hi.y, v.y), std::max(hi.z, v.z)};
        }
    }
    return hi;
}

double TriangleMesh::bounding_radius() const {
    const Vec3 c = centroid();
    double r = 0.0;
    for (const auto& t : triangles_) {
        for (auto idx : t) r = std::max(r, norm(vertices_[idx] - c));
    }
    return r;
}

StlLoadResult load_stl(std::span<const std::uint8_t> bytes, const StlLoadOptions& options) {
    if (!(options.scale > 0.0) || !std::isfinite(options.scale)) fail("scale must be a positive finite number");
    StlLoadResult result;
    ParsedFacets facets;
    if (!exact_binary_size(bytes) && looks_ascii(bytes)) {
        facets = parse_ascii(bytes);
    } else {
        facets = parse_binary(bytes);
        result.binary = true;
    }
    if (options.scale != 1.0) {
        for (auto& v : facets.vertices) v *= options.scale;
    }
    result.mesh = TriangleMesh::from_facets(std::move(facets.vertices), facets.triangles, facets.normals,
                                            &result.dropped_degenerate, &result.normals_recomputed);
    if (options.center) result.mesh = translate_mesh(result.mesh, -result.mesh.centroid());
    return result;
}

StlLoadResult load_stl_file(const std::string& path, const StlLoadOptions& options) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail("cannot open '" + path + "'");
    std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return load_stl(bytes, options);
}

std::vector<std::uint8_t> serialize_stl_binary(const TriangleMesh& mesh) {
    std::vector<std::uint8_t> out;
    out.reserve(kStlHeaderBytes + 4 + mesh.triangle_count() * kStlRecordBytes);
    std::string header = "binary STL written by isar";
    header.resize(kStlHeaderBytes, ' ');
    out.insert(out.end(), header.begin(), header.end());
    write_u32(out, static_cast<std::uint32_t>(mesh.triangle_count()));
    for (std::size_t i = 0; i < mesh.triangle_count(); ++i) {
        auto put = [&](const Vec3& v) {
            write_f32(out, static_cast<float>(v.x));
            write_f32(out, static_cast<float>(v.y));
            write_f32(out, static_cast<float>(v.z));
        };
        put(mesh.normals()[i]);
        for (const auto& c : mesh.corners(i)) put(c);
        out.push_back(0);
        out.push_back(0);
    }
    return out;
}

void save_stl_file(const TriangleMesh& mesh, const std::string& path) {
    const auto bytes = serialize_stl_binary(mesh);
    std::ofstream out(path, std::ios::binary);
    if (!out) fail("cannot write '" + path + "'");
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out) fail("write failed for '" + path + "'");
}

TriangleMesh rotate_mesh(const TriangleMesh& mesh, double yaw_deg) {
    const Vec3 c = mesh.centroid();
    const double cs = std::cos(deg_to_rad(yaw_deg));
    const double sn = std::sin(deg_to_rad(yaw_deg));
    auto turn = [&](const Vec3& v) { return Vec3{cs * v.x - sn * v.y, sn * v.x + cs * v.y, v.z}; };

    std::vector<Vec3> vertices;
    vertices.reserve(mesh.vertices().size());
    for (const auto& v : mesh.vertices()) {
        const Vec3 r = turn(Vec3{v.x - c.x, v.y - c.y, v.z});
        vertices.push_back({r.x + c.x, r.y + c.y, r.z});
    }
    std::vector<Vec3> normals;
    normals.reserve(mesh.normals().size());
    for (const auto& n : mesh.normals()) normals.push_back(turn(n));
    return TriangleMesh::from_facets(std::move(vertices), mesh.triangles(), normals);
}

TriangleMesh translate_mesh(const TriangleMesh& mesh, const Vec3& offset) {
    std::vector<Vec3> vertices = mesh.vertices();
    for (auto& v : vertices) v += offset;
    return TriangleMesh::from_facets(std::move(vertices), mesh.triangles(), mesh.normals());
}

TriangleMesh scale_mesh(const TriangleMesh& mesh, double factor) {
    if (!(factor > 0.0) || !std::isfinite(factor)) fail("scale must be a positive finite number");
    std::vector<Vec3> vertices = mesh.vertices();
    for (auto& v : vertices) v *= factor;
    return TriangleMesh::from_facets(std::move(vertices), mesh.triangles(), mesh.normals());
}

TriangleMesh merge_meshes(std::span<const TriangleMesh> parts) {
    std::vector<Vec3> vertices;
    std::vector<Triangle> triangles;
    std::vector<Vec3> normals;
    for (const auto& part : parts) {
        const auto base = static_cast<std::uint32_t>(vertices.size());
        vertices.insert(vertices.end(), part.vertices().begin(), part.vertices().end());
        for (const auto& t : part.triangles()) triangles.push_back({t[0] + base, t[1] + base, t[2] + base});
        normals.insert(normals.end(), part.normals().begin(), part.normals().end());
    }
    return TriangleMesh::from_facets(std::move(vertices), triangles, normals);
}

}  // namespace isar
