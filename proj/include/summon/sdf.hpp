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

// Dense signed distance grids over triangle meshes.
//
// Magnitude is the exact distance to the nearest triangle at each lattice
// node. The sign comes from the generalized winding number of the merged
// input, which stays well defined when many self-intersecting body meshes
// are stacked on top of each other.

#include "summon/geometry.hpp"
#include "summon/spatial.hpp"

#include <numeric>

namespace summon {

// ---------------------------------------------------------------------------
// Point/triangle primitives

/// Closest point on triangle abc to p (Ericson, Real-Time Collision Detection 5.1.5).
inline Vec3 closest_point_on_triangle(const Vec3& p, const Vec3& a, const Vec3& b, const Vec3& c) {
    const Vec3 ab = b - a, ac = c - a, ap = p - a;
    const double d1 = ab.dot(ap), d2 = ac.dot(ap);
    if (d1 <= 0.0 && d2 <= 0.0) return a;
    const Vec3 bp = p - b;
    const double d3 = ab.dot(bp), d4 = ac.dot(bp);
    if (d3 >= 0.0 && d4 <= d3) return b;
    const double vc = d1 * d4 - d3 * d2;
    if (vc <= 0.0 && d1 >= 0.0 && d3 <= 0.0) return a + (d1 / (d1 - d3)) * ab;
    const Vec3 cp = p - c;
    const double d5 = ab.dot(cp), d6 = ac.dot(cp);
    if (d6 >= 0.0 && d5 <= d6) return c;
    const double vb = d5 * d2 - d1 * d6;
    if (vb <= 0.0 && d2 >= 0.0 && d6 <= 0.0) return a + (d2 / (d2 - d6)) * ac;
    const double va = d3 * d6 - d5 * d4;
    if (va <= 0.0 && (d4 - d3) >= 0.0 && (d5 - d6) >= 0.0)
        return b + ((d4 - d3) / ((d4 - d3) + (d5 - d6))) * (c - b);
    const double denom = 1.0 / (va + vb + vc);
    return a + ab * (vb * denom) + ac * (vc * denom);
}

/// Signed solid angle of triangle abc seen from p, divided by 4π.
inline double triangle_winding(const Vec3& p, const Vec3& a, const Vec3& b, const Vec3& c) {
    const Vec3 x = a - p, y = b - p, z = c - p;
    const double lx = x.norm(), ly = y.norm(), lz = z.norm();
    const double det = x.dot(y.cross(z));
    const double den = lx * ly * lz + x.dot(y) * lz + y.dot(z) * lx + z.dot(x) * ly;
    return std::atan2(det, den) / (2.0 * std::numbers::pi);
}

// ---------------------------------------------------------------------------
// Triangle soup with a bounding volume hierarchy for nearest queries and
// per-component winding evaluation.

class TriangleSet {
public:
    explicit TriangleSet(std::span<const TriMesh> meshes) {
        for (const auto& m : meshes) {
            m.validate();
            const auto base = static_cast<std::uint32_t>(vertices_.size());
            vertices_.insert(vertices_.end(), m.vertices.begin(), m.vertices.end());
            for (const auto& f : m.faces)
                if (m.face_area(&f - m.faces.data()) > 0.0)
                    faces_.push_back({f[0] + base, f[1] + base, f[2] + base});
        }
        if (faces_.empty()) throw Error("TriangleSet: no triangles with positive area");
        build_components();
        build_bvh();
    }

    std::size_t triangle_count() const { return faces_.size(); }
    Aabb bounds() const { return nodes_.front().box; }

    double distance(const Vec3& p) const {
        double best = std::numeric_limits<double>::infinity();
        nearest_recursive(0, p, best);
        return std::sqrt(best);
    }

    /// Generalized winding number of the merged input at p. Closed components
    /// whose bounding box excludes p contribute exactly zero and are skipped.
    double winding(const Vec3& p) const {
        double w = 0.0;
        for (const auto& comp : components_) {
            if (comp.closed && !comp.box.contains(p)) continue;
            for (auto f : comp.faces) {
                const auto& t = faces_[f];
                w += triangle_winding(p, vertices_[t[0]], vertices_[t[1]], vertices_[t[2]]);
            }
        }
        return w;
    }

    double signed_distance(const Vec3& p) const {
        const double d = distance(p);
        return winding(p) >= 0.5 ? -d : d;
    }

private:
    struct Node {
        Aabb box;
        std::uint32_t left = 0, right = 0;  // children when count == 0
        std::uint32_t first = 0, count = 0;  // leaf range into order_
    };

    struct Component {
        std::vector<std::uint32_t> faces;
        Aabb box;
        bool closed = false;
    };

    Aabb tri_box(std::uint32_t f) const {
        Aabb b;
        for (auto v : faces_[f]) b.extend(vertices_[v]);
        return b;
    }

    void build_components() {
        std::vector<std::uint32_t> parent(vertices_.size());
        std::iota(parent.begin(), parent.end(), 0u);
        auto find = [&](std::uint32_t x) {
            while (parent[x] != x) x = parent[x] = parent[parent[x]];
            return x;
        };
        for (const auto& f : faces_) {
            const auto a = find(f[0]);
            parent[find(f[1])] = a;
            parent[find(f[2])] = a;
        }
        std::map<std::uint32_t, std::size_t> slot;
        for (std::uint32_t f = 0; f < faces_.size(); ++f) {
            auto [it, inserted] = slot.try_emplace(find(faces_[f][0]), components_.size());
            if (inserted) components_.emplace_back();
            auto& comp = components_[it->second];
            comp.faces.push_back(f);
            comp.box.extend(tri_box(f));
        }
        // Closed iff every directed edge is matched by its reverse exactly once.
        for (auto& comp : components_) {
            std::map<std::pair<std::uint32_t, std::uint32_t>, int> edges;
            for (auto f : comp.faces) {
                const auto& t = faces_[f];
                for (int k = 0; k < 3; ++k) ++edges[{t[k], t[(k + 1) % 3]}];
            }
            comp.closed = std::all_of(edges.begin(), edges.end(), [&](const auto& e) {
                auto rev = edges.find({e.first.second, e.first.first});
                return e.second == 1 && rev != edges.end() && rev->second == 1;
            });
        }
    }

    void build_bvh() {
        order_.resize(faces_.size());
        std::iota(order_.begin(), order_.end(), 0u);
        centroids_.resize(faces_.size());
        for (std::uint32_t f = 0; f < faces_.size(); ++f) centroids_[f] = tri_box(f).center();
        nodes_.reserve(2 * faces_.size());
        build_node(0, static_cast<std::uint32_t>(faces_.size()));
    }

    std::uint32_t build_node(std::uint32_t first, std::uint32_t count) {
        const auto id = static_cast<std::uint32_t>(nodes_.size());
        nodes_.emplace_back();
        Aabb box, cbox;
        for (std::uint32_t i = first; i < first + count; ++i) {
            box.extend(tri_box(order_[i]));
            cbox.extend(centroids_[order_[i]]);
        }
        nodes_[id].box = box;
        if (count <= 4) {
            nodes_[id].first = first;
            nodes_[id].count = count;
            return id;
        }
        int axis = 0;
        cbox.extents().maxCoeff(&axis);
        const auto mid = first + count / 2;
        std::nth_element(order_.begin() + first, order_.begin() + mid, order_.begin() + first + count,
                         [&](std::uint32_t a, std::uint32_t b) {
                             if (centroids_[a][axis] != centroids_[b][axis])
                                 return centroids_[a][axis] < centroids_[b][axis];
                             return a < b;
                         });
        const auto left = build_node(first, mid - first);
        const auto right = build_node(mid, first + count - mid);
        nodes_[id].left = left;
        nodes_[id].right = right;
        return id;
    }

    void nearest_recursive(std::uint32_t id, const Vec3& p, double& best_sq) const {
        const Node& n = nodes_[id];
        if (n.count > 0) {
            for (std::uint32_t i = n.first; i < n.first + n.count; ++i) {
                const auto& t = faces_[order_[i]];
                const Vec3 q = closest_point_on_triangle(p, vertices_[t[0]], vertices_[t[1]], vertices_[t[2]]);
                best_sq = std::min(best_sq, (p - q).squaredNorm());
            }
            return;
        }
        const double dl = nodes_[n.left].box.squared_distance(p);
        const double dr = nodes_[n.right].box.squared_distance(p);
        const auto [near, far, dn, df] =
            dl <= dr ? std::tuple{n.left, n.right, dl, dr} : std::tuple{n.right, n.left, dr, dl};
        if (dn < best_sq) nearest_recursive(near, p, best_sq);
        if (df < best_sq) nearest_recursive(far, p, best_sq);
    }

    std::vector<Vec3> vertices_;
    std::vector<Face> faces_;
    std::vector<Component> components_;
    std::vector<Node> nodes_;
    std::vector<std::uint32_t> order_;
    std::vector<Vec3> centroids_;
};

// ---------------------------------------------------------------------------
// SdfGrid

struct SdfOptions {
    double cell_size = 0.05;
    double padding = 0.15;
    std::size_t max_cells = 200'000'000;
};

class SdfGrid {
public:
    SdfGrid() = default;
    SdfGrid(const Vec3& origin, double cell_size, std::array<int, 3> dims, std::vector<double> values)
        : origin_(origin), cell_(cell_size), dims_(dims), values_(std::move(values)) {
        if (!(cell_size > 0.0)) throw Error("SdfGrid: cell_size must be positive");
        if (dims[0] < 1 || dims[1] < 1 || dims[2] < 1) throw Error("SdfGrid: dims must be positive");
        if (values_.size() != static_cast<std::size_t>(dims[0]) * dims[1] * dims[2])
            throw Error("SdfGrid: value count does not match dims");
    }

    const Vec3& origin() const { return origin_; }
    double cell_size() const { return cell_; }
    const std::array<int, 3>& dims() const { return dims_; }
    std::span<const double> values() const { return values_; }

    Vec3 upper() const {
        return origin_ + cell_ * Vec3(dims_[0] - 1, dims_[1] - 1, dims_[2] - 1);
    }
    Aabb box() const { return {origin_, upper()}; }

    double at(int i, int j, int k) const {
        return values_[(static_cast<std::size_t>(k) * dims_[1] + j) * dims_[0] + i];
    }
    Vec3 node(int i, int j, int k) const { return origin_ + cell_ * Vec3(i, j, k); }

    /// Trilinear interpolation inside the lattice. Outside, the value at the
    /// clamped point plus the distance to the lattice box.
    double query(const Vec3& p) const {
        const Aabb b = box();
        const Vec3 q = p.cwiseMax(b.lo).cwiseMin(b.hi);
        const double outside = (p - q).norm();
        std::array<int, 3> cell;
        Vec3 t;
        for (int a = 0; a < 3; ++a) {
            double u = (q[a] - origin_[a]) / cell_;
            // Snap rounding noise so lattice nodes return their stored value.
            if (const double r = std::round(u); std::abs(u - r) < 1e-9) u = r;
            const int hi_cell = std::max(dims_[a] - 2, 0);
            int c = static_cast<int>(std::floor(u));
            c = std::clamp(c, 0, hi_cell);
            cell[a] = c;
            t[a] = dims_[a] == 1 ? 0.0 : std::clamp(u - c, 0.0, 1.0);
        }
        return interpolate_in_cell(cell, t) + outside;
    }

    /// Trilinear blend of the 8 nodes of `cell` at local coordinates t in [0,1]^3.
    double interpolate_in_cell(const std::array<int, 3>& cell, const Vec3& t) const {
        auto v = [&](int di, int dj, int dk) {
            return (at(std::min(cell[0] + di, dims_[0] - 1),
                                          std::min(cell[1] + dj, dims_[1] - 1),
                                          std::min(cell[2] + dk, dims_[2] - 1)));
        };
        // (1-t)a + t b keeps the endpoints exact so shared cell faces agree.
        auto lerp = [](double a, double b, double s) { return (1.0 - s) * a + s * b; };
        const double c00 = lerp(v(0, 0, 0), v(1, 0, 0), t.x());
        const double c10 = lerp(v(0, 1, 0), v(1, 1, 0), t.x());
        const double c01 = lerp(v(0, 0, 1), v(1, 0, 1), t.x());
        const double c11 = lerp(v(0, 1, 1), v(1, 1, 1), t.x());
        return lerp(lerp(c00, c10, t.y()), lerp(c01, c11, t.y()), t.z());
    }

private:
    Vec3 origin_ = Vec3::Zero();
    double cell_ = 1.0;
    std::array<int, 3> dims_{1, 1, 1};
    std::vector<double> values_{0.0};
};

inline double query_sdf(const SdfGrid& grid, const Vec3& p) { return grid.query(p); }

/// Samples the signed distance of the merged meshes on a lattice covering
/// their joint bounding box inflated by `padding`.
inline SdfGrid build_sdf(std::span<const TriMesh> meshes, const SdfOptions& opt = {}) {
    if (!(opt.cell_size > 0.0)) throw Error("build_sdf: cell_size must be positive");
    if (opt.padding < opt.cell_size) throw Error("build_sdf: padding must be >= cell_size");
    if (meshes.empty()) throw Error("build_sdf: empty mesh list");
    const TriangleSet tris(meshes);
    const Aabb box = tris.bounds().inflated(opt.padding);
    std::array<int, 3> dims;
    double cells = 1.0;
    for (int a = 0; a < 3; ++a) {
        const double n = std::ceil(box.extents()[a] / opt.cell_size) + 1.0;
        cells *= n;
        if (cells > static_cast<double>(opt.max_cells))
            throw Error("build_sdf: grid exceeds cell budget of " + std::to_string(opt.max_cells) +
                        " (cell_size too small?)");
        dims[a] = static_cast<int>(n);
    }
    std::vector<double> values(static_cast<std::size_t>(cells));
    std::size_t idx = 0;
    for (int k = 0; k < dims[2]; ++k)
        for (int j = 0; j < dims[1]; ++j)
            for (int i = 0; i < dims[0]; ++i) {
                const Vec3 p = box.lo + opt.cell_size * Vec3(i, j, k);
                values[idx++] = tris.signed_distance(p);
            }
    return SdfGrid(box.lo, opt.cell_size, dims, std::move(values));
}

inline SdfGrid build_sdf(const TriMesh& mesh, const SdfOptions& opt = {}) {
    return build_sdf(std::span<const TriMesh>(&mesh, 1), opt);
}

/// Signed distance to a union of balls of `radius` around `points`. Used for
/// bodies that come without connectivity.
inline SdfGrid build_point_sdf(std::span<const Vec3> points, double radius,
                               const SdfOptions& opt = {}) {
    if (points.empty()) throw Error("build_point_sdf: empty point set");
    if (!(radius > 0.0)) throw Error("build_point_sdf: radius must be positive");
    if (opt.padding < opt.cell_size) throw Error("build_point_sdf: padding must be >= cell_size");
    const KdTree tree(points);
    Aabb box;
    for (const auto& p : points) box.extend(p);
    box = box.inflated(radius + opt.padding);
    std::array<int, 3> dims;
    double cells = 1.0;
    for (int a = 0; a < 3; ++a) {
        const double n = std::ceil(box.extents()[a] / opt.cell_size) + 1.0;
        cells *= n;
        if (cells > static_cast<double>(opt.max_cells))
            throw Error("build_point_sdf: grid exceeds cell budget");
        dims[a] = static_cast<int>(n);
    }
    std::vector<double> values(static_cast<std::size_t>(cells));
    std::size_t idx = 0;
    for (int k = 0; k < dims[2]; ++k)
        for (int j = 0; j < dims[1]; ++j)
            for (int i = 0; i < dims[0]; ++i) {
                const Vec3 p = box.lo + opt.cell_size * Vec3(i, j, k);
                values[idx++] = std::sqrt(tree.nearest(p).second) - radius;
            }
    return SdfGrid(box.lo, opt.cell_size, dims, std::move(values));
}

}  // namespace summon
