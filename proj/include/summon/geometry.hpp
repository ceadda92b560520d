// Copyright 2026 The summon-cpp Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

// Meshes, point clouds and planar rigid transforms. Up axis is +z and all
// lengths are meters.

#include "summon/common.hpp"
#include "summon/rng.hpp"

#include <algorithm>
#include <array>
#include <filesystem>
#include <fstream>
#include <map>
#include <numbers>
#include <sstream>
#include <vector>

namespace summon {

using Face = std::array<std::uint32_t, 3>;

struct TriMesh {
    std::vector<Vec3> vertices;
    std::vector<Face> faces;

    Aabb bounds() const {
        Aabb b;
        for (const auto& v : vertices) b.extend(v);
        return b;
    }

    double face_area(std::size_t f) const {
        const auto& [a, b, c] = faces[f];
        return 0.5 * (vertices[b] - vertices[a]).cross(vertices[c] - vertices[a]).norm();
    }

    double area() const {
        double total = 0.0;
        for (std::size_t f = 0; f < faces.size(); ++f) total += face_area(f);
        return total;
    }

    /// Throws if a face index is out of range or a coordinate is non-finite.
    void validate() const {
        for (std::size_t i = 0; i < vertices.size(); ++i)
            if (!all_finite(vertices[i]))
                throw Error("mesh vertex " + std::to_string(i) + " is not finite");
        for (std::size_t f = 0; f < faces.size(); ++f)
            for (auto idx : faces[f])
                if (idx >= vertices.size())
                    throw Error("mesh face " + std::to_string(f) + " references vertex " +
                                std::to_string(idx) + " of " + std::to_string(vertices.size()));
    }

    /// Appends another mesh, re-indexing its faces.
    void append(const TriMesh& other) {
        const auto base = static_cast<std::uint32_t>(vertices.size());
        vertices.insert(vertices.end(), other.vertices.begin(), other.vertices.end());
        for (const auto& f : other.faces) faces.push_back({f[0] + base, f[1] + base, f[2] + base});
    }
};

/// Points with an optional per-point class id payload.
struct PointCloud {
    std::vector<Vec3> points;
    std::vector<int> labels;  // empty, or one entry per point

    std::size_t size() const { return points.size(); }
    bool empty() const { return points.empty(); }

    Aabb bounds() const {
        Aabb b;
        for (const auto& p : points) b.extend(p);
        return b;
    }
};

inline double normalize_angle(double a) {
    constexpr double two_pi = 2.0 * std::numbers::pi;
    a = std::fmod(a, two_pi);
    if (a < 0.0) a += two_pi;
    if (a >= two_pi) a = 0.0;
    return a;
}

/// Yaw about +z (applied about a pivot) followed by a translation. These are
/// the four degrees of freedom an object has when resting on a floor.
class PlanarTransform {
public:
    PlanarTransform() = default;
    PlanarTransform(const Vec3& translation, double yaw)
        : translation_(translation), yaw_(normalize_angle(yaw)) {
        if (!all_finite(translation) || !std::isfinite(yaw))
            throw Error("PlanarTransform: non-finite component");
    }

    const Vec3& translation() const { return translation_; }
    double yaw() const { return yaw_; }

    PlanarTransform with_translation(const Vec3& t) const { return {t, yaw_}; }
    PlanarTransform with_z(double z) const {
        return {Vec3(translation_.x(), translation_.y(), z), yaw_};
    }

    bool is_identity() const { return yaw_ == 0.0 && translation_.isZero(0.0); }

    Vec3 apply(const Vec3& p, const Vec3& pivot) const {
        const double c = std::cos(yaw_), s = std::sin(yaw_);
        const Vec3 d = p - pivot;
        return Vec3(c * d.x() - s * d.y(), s * d.x() + c * d.y(), d.z()) + pivot + translation_;
    }

    /// Inverse mapping of apply() for the same pivot.
    Vec3 unapply(const Vec3& q, const Vec3& pivot) const {
        const double c = std::cos(yaw_), s = std::sin(yaw_);
        const Vec3 d = q - translation_ - pivot;
        return Vec3(c * d.x() + s * d.y(), -s * d.x() + c * d.y(), d.z()) + pivot;
    }

    bool operator==(const PlanarTransform&) const = default;

private:
    Vec3 translation_ = Vec3::Zero();
    double yaw_ = 0.0;
};

/// Transform equal to applying `first` then `second` about the same pivot.
inline PlanarTransform compose(const PlanarTransform& first, const PlanarTransform& second) {
    const double c = std::cos(second.yaw()), s = std::sin(second.yaw());
    const Vec3& t1 = first.translation();
    const Vec3 rotated(c * t1.x() - s * t1.y(), s * t1.x() + c * t1.y(), t1.z());
    return {rotated + second.translation(), first.yaw() + second.yaw()};
}

inline std::vector<Vec3> apply(const PlanarTransform& xf, std::span<const Vec3> pts,
                               const Vec3& pivot) {
    std::vector<Vec3> out;
    out.reserve(pts.size());
    for (const auto& p : pts) out.push_back(xf.apply(p, pivot));
    return out;
}

inline PointCloud apply(const PlanarTransform& xf, const PointCloud& cloud, const Vec3& pivot) {
    if (xf.is_identity()) return cloud;
    PointCloud out;
    out.points = apply(xf, cloud.points, pivot);
    out.labels = cloud.labels;
    return out;
}

inline PointCloud apply(const PlanarTransform& xf, const PointCloud& cloud) {
    return apply(xf, cloud, cloud.bounds().center());
}

inline TriMesh apply(const PlanarTransform& xf, const TriMesh& mesh, const Vec3& pivot) {
    if (xf.is_identity()) return mesh;
    TriMesh out;
    out.vertices = apply(xf, mesh.vertices, pivot);
    out.faces = mesh.faces;
    return out;
}

inline TriMesh apply(const PlanarTransform& xf, const TriMesh& mesh) {
    return apply(xf, mesh, mesh.bounds().center());
}

// ---------------------------------------------------------------------------
// OBJ subset I/O

namespace detail {

inline std::uint32_t parse_obj_index(const std::string& token, std::size_t n_vertices,
                                     std::size_t line_no) {
    const std::string head = token.substr(0, token.find('/'));
    long long idx = 0;
    try {
        std::size_t used = 0;
        idx = std::stoll(head, &used);
        if (used != head.size()) throw std::invalid_argument(head);
    } catch (const std::exception&) {
        throw Error("line " + std::to_string(line_no) + ": bad face index '" + token + "'");
    }
    if (idx < 0) idx += static_cast<long long>(n_vertices) + 1;
    if (idx < 1 || idx > static_cast<long long>(n_vertices))
        throw Error("line " + std::to_string(line_no) + ": face index " + head +
                    " out of range (" + std::to_string(n_vertices) + " vertices)");
    return static_cast<std::uint32_t>(idx - 1);
}

}  // namespace detail

/// Parses v/f records; polygons are fan-triangulated. Other records and
/// `#` comments are ignored. Errors carry the offending line number.
inline TriMesh parse_obj(std::istream& in) {
    TriMesh mesh;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
        std::istringstream ss(line);
        std::string tag;
        if (!(ss >> tag)) continue;
        if (tag == "v") {
            std::array<std::string, 3> tok;
            if (!(ss >> tok[0] >> tok[1] >> tok[2]))
                throw Error("line " + std::to_string(line_no) + ": vertex needs 3 coordinates");
            Vec3 p;
            for (int k = 0; k < 3; ++k) {
                try {
                    p[k] = std::stod(tok[k]);
                } catch (const std::exception&) {
                    throw Error("line " + std::to_string(line_no) + ": bad coordinate '" +
                                tok[k] + "'");
                }
            }
            if (!all_finite(p))
                throw Error("line " + std::to_string(line_no) + ": non-finite coordinate");
            mesh.vertices.push_back(p);
        } else if (tag == "f") {
            std::vector<std::uint32_t> poly;
            std::string tok;
            while (ss >> tok) poly.push_back(detail::parse_obj_index(tok, mesh.vertices.size(), line_no));
            if (poly.size() < 3)
                throw Error("line " + std::to_string(line_no) + ": face needs at least 3 vertices");
            for (std::size_t k = 1; k + 1 < poly.size(); ++k)
                mesh.faces.push_back({poly[0], poly[k], poly[k + 1]});
        }
    }
    return mesh;
}

inline TriMesh load_mesh(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open mesh file: " + path.string());
    try {
        return parse_obj(in);
    } catch (const Error& e) {
        throw Error(path.string() + ": " + e.what());
    }
}

inline void write_obj(std::ostream& out, const TriMesh& mesh) {
    out.precision(17);
    for (const auto& v : mesh.vertices) out << "v " << v.x() << ' ' << v.y() << ' ' << v.z() << '\n';
    for (const auto& f : mesh.faces) out << "f " << f[0] + 1 << ' ' << f[1] + 1 << ' ' << f[2] + 1 << '\n';
}

inline void save_mesh(const std::filesystem::path& path, const TriMesh& mesh) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write mesh file: " + path.string());
    write_obj(out, mesh);
}

// ---------------------------------------------------------------------------
// Surface sampling

/// Area-weighted triangle choice, uniform barycentric position within it.
inline PointCloud sample_surface(const TriMesh& mesh, std::size_t n, std::uint64_t seed) {
    if (n == 0) throw Error("sample_surface: n must be >= 1");
    std::vector<double> cdf(mesh.faces.size());
    double total = 0.0;
    for (std::size_t f = 0; f < mesh.faces.size(); ++f) {
        total += mesh.face_area(f);
        cdf[f] = total;
    }
    if (!(total > 0.0)) throw Error("sample_surface: mesh has zero total area");

    Rng rng(seed);
    PointCloud cloud;
    cloud.points.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double u = rng.uniform() * total;
        auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
        std::size_t f = std::min<std::size_t>(it - cdf.begin(), cdf.size() - 1);
        // Skip zero-area faces that upper_bound can land on at equal cdf values.
        while (mesh.face_area(f) == 0.0 && f + 1 < cdf.size()) ++f;
        double r1 = rng.uniform(), r2 = rng.uniform();
        if (r1 + r2 > 1.0) {
            r1 = 1.0 - r1;
            r2 = 1.0 - r2;
        }
        const auto& [a, b, c] = mesh.faces[f];
        const Vec3& A = mesh.vertices[a];
        cloud.points.push_back(A + r1 * (mesh.vertices[b] - A) + r2 * (mesh.vertices[c] - A));
    }
    return cloud;
}

inline constexpr std::size_t kMinSampleCount = 64;

/// Sample count proportional to bounding-box surface area, so losses have a
/// comparable scale across objects of different size.
inline std::size_t point_count_for(const Vec3& extents, double density,
                                   std::size_t min_count = kMinSampleCount) {
    const double area =
        2.0 * (extents.x() * extents.y() + extents.y() * extents.z() + extents.x() * extents.z());
    const auto n = static_cast<std::size_t>(std::llround(density * area));
    return std::max(min_count, n);
}

// ---------------------------------------------------------------------------
// Primitive builders

/// Merges bitwise-identical vertex positions and drops faces that collapse.
inline TriMesh weld_vertices(const TriMesh& mesh) {
    std::map<std::array<double, 3>, std::uint32_t> index;
    std::vector<std::uint32_t> remap(mesh.vertices.size());
    TriMesh out;
    for (std::size_t i = 0; i < mesh.vertices.size(); ++i) {
        const auto& v = mesh.vertices[i];
        auto [it, inserted] = index.try_emplace({v.x(), v.y(), v.z()},
                                                static_cast<std::uint32_t>(out.vertices.size()));
        if (inserted) out.vertices.push_back(v);
        remap[i] = it->second;
    }
    for (const auto& f : mesh.faces) {
        const Face g{remap[f[0]], remap[f[1]], remap[f[2]]};
        if (g[0] != g[1] && g[1] != g[2] && g[0] != g[2]) out.faces.push_back(g);
    }
    return out;
}

/// Closed box with each face split into a grid of `cells_*` quads. Winding is
/// outward-facing.
inline TriMesh make_box(const Vec3& lo, const Vec3& hi, int cells_x = 1, int cells_y = 1,
                        int cells_z = 1) {
    TriMesh mesh;
    const std::array<int, 3> cells{std::max(cells_x, 1), std::max(cells_y, 1), std::max(cells_z, 1)};
    auto lerp_coord = [&](int axis, int i, int n) {
        if (i == n) return hi[axis];
        return lo[axis] + (hi[axis] - lo[axis]) * i / n;
    };
    // Each face: fixed axis k at side (lo/hi), spanning axes u, v.
    auto add_face = [&](int k, bool high, int u, int v) {
        const int nu = cells[u], nv = cells[v];
        const auto base = static_cast<std::uint32_t>(mesh.vertices.size());
        for (int j = 0; j <= nv; ++j)
            for (int i = 0; i <= nu; ++i) {
                Vec3 p;
                p[k] = high ? hi[k] : lo[k];
                p[u] = lerp_coord(u, i, nu);
                p[v] = lerp_coord(v, j, nv);
                mesh.vertices.push_back(p);
            }
        auto id = [&](int i, int j) { return base + static_cast<std::uint32_t>(j * (nu + 1) + i); };
        // (u, v, k) right-handed => u x v = +k; flip for the low side.
        for (int j = 0; j < nv; ++j)
            for (int i = 0; i < nu; ++i) {
                const auto a = id(i, j), b = id(i + 1, j), c = id(i + 1, j + 1), d = id(i, j + 1);
                if (high) {
                    mesh.faces.push_back({a, b, c});
                    mesh.faces.push_back({a, c, d});
                } else {
                    mesh.faces.push_back({a, c, b});
                    mesh.faces.push_back({a, d, c});
                }
            }
    };
    add_face(0, false, 1, 2);
    add_face(0, true, 1, 2);
    add_face(1, false, 2, 0);
    add_face(1, true, 2, 0);
    add_face(2, false, 0, 1);
    add_face(2, true, 0, 1);
    return weld_vertices(mesh);
}

}  // namespace summon
