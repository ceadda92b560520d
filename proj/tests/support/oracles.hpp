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

// Reference implementations written for clarity, not speed. Each one is an
// independent restatement of a definition, used to check the library.

#include "summon/summon.hpp"

#include <numeric>

namespace summon::oracle {

/// Mean nearest squared distance by exhaustive double loop.
inline double contact_loss(std::span<const Vec3> vc, std::span<const Vec3> vo, double lambda) {
    double sum = 0.0;
    for (const auto& c : vc) {
        double best = std::numeric_limits<double>::infinity();
        for (const auto& o : vo) best = std::min(best, (c - o).squaredNorm());
        sum += best;
    }
    return lambda * sum / static_cast<double>(vc.size());
}

/// Density clustering restated as graph components: core points linked when
/// within eps form components; components are numbered by their lowest core
/// index; a border point takes the smallest id among its core neighbors.
inline std::vector<int> dbscan(std::span<const Vec3> pts, double eps, std::size_t min_pts) {
    const std::size_t n = pts.size();
    const double r2 = eps * eps;
    auto near = [&](std::size_t i, std::size_t j) { return (pts[i] - pts[j]).squaredNorm() <= r2; };
    std::vector<bool> core(n);
    for (std::size_t i = 0; i < n; ++i) {
        std::size_t k = 0;
        for (std::size_t j = 0; j < n; ++j) k += near(i, j);
        core[i] = k >= min_pts;
    }
    std::vector<std::size_t> parent(n);
    std::iota(parent.begin(), parent.end(), std::size_t{0});
    auto root = [&](std::size_t i) {
        while (parent[i] != i) i = parent[i] = parent[parent[i]];
        return i;
    };
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            if (core[i] && core[j] && near(i, j)) {
                const auto a = root(i), b = root(j);
                parent[std::max(a, b)] = std::min(a, b);
            }
    // Roots are the lowest index of each component; number them in order.
    std::map<std::size_t, int> id;
    for (std::size_t i = 0; i < n; ++i)
        if (core[i] && !id.count(root(i))) id.emplace(root(i), static_cast<int>(id.size()));
    std::vector<int> out(n, kNoise);
    for (std::size_t i = 0; i < n; ++i) {
        if (core[i]) {
            out[i] = id.at(root(i));
            continue;
        }
        for (std::size_t j = 0; j < n; ++j)
            if (core[j] && near(i, j)) {
                const int c = id.at(root(j));
                out[i] = out[i] == kNoise ? c : std::min(out[i], c);
            }
    }
    return out;
}

/// Relabels clusters in order of first appearance so that two labelings
/// that differ only by cluster ids compare equal.
inline std::vector<int> canonical(const std::vector<int>& labels) {
    std::map<int, int> remap;
    std::vector<int> out;
    for (int l : labels) {
        if (l == kNoise) {
            out.push_back(kNoise);
            continue;
        }
        auto [it, _] = remap.try_emplace(l, static_cast<int>(remap.size()));
        out.push_back(it->second);
    }
    return out;
}

/// Triangulated sphere: a subdivided octahedron projected to the sphere.
inline TriMesh sphere(double radius, int subdivisions, const Vec3& center = Vec3::Zero()) {
    TriMesh m;
    m.vertices = {{1, 0, 0}, {-1, 0, 0}, {0, 1, 0}, {0, -1, 0}, {0, 0, 1}, {0, 0, -1}};
    m.faces = {{0, 2, 4}, {2, 1, 4}, {1, 3, 4}, {3, 0, 4}, {2, 0, 5}, {1, 2, 5}, {3, 1, 5}, {0, 3, 5}};
    for (int s = 0; s < subdivisions; ++s) {
        std::map<std::pair<std::uint32_t, std::uint32_t>, std::uint32_t> mid;
        auto midpoint = [&](std::uint32_t a, std::uint32_t b) {
            const auto key = std::minmax(a, b);
            auto it = mid.find(key);
            if (it != mid.end()) return it->second;
            m.vertices.push_back((m.vertices[a] + m.vertices[b]).normalized());
            const auto id = static_cast<std::uint32_t>(m.vertices.size() - 1);
            mid.emplace(key, id);
            return id;
        };
        std::vector<Face> next;
        for (const auto& f : m.faces) {
            const auto ab = midpoint(f[0], f[1]), bc = midpoint(f[1], f[2]), ca = midpoint(f[2], f[0]);
            next.push_back({f[0], ab, ca});
            next.push_back({ab, f[1], bc});
            next.push_back({ca, bc, f[2]});
            next.push_back({ab, bc, ca});
        }
        m.faces = std::move(next);
    }
    for (auto& v : m.vertices) v = center + radius * v;
    return m;
}

/// Random labeled point field: `blobs` Gaussian blobs, each with a dominant
/// class, with a fraction `noise` of points given a random other class.
inline ContactPointSet contaminated_field(std::uint64_t seed, std::size_t n_classes, std::size_t blobs,
                                         std::size_t per_blob, double sigma, double noise) {
    Rng rng(seed);
    ContactPointSet out;
    out.n_classes = n_classes;
    std::vector<double> hist(n_classes);
    for (std::size_t b = 0; b < blobs; ++b) {
        const Vec3 c(rng.uniform(-2, 2), rng.uniform(-2, 2), rng.uniform(0, 1));
        const int dominant = static_cast<int>(rng.index(n_classes));
        for (std::size_t i = 0; i < per_blob; ++i) {
            const Vec3 p = c + sigma * Vec3(rng.normal(), rng.normal(), rng.normal());
            int cls = dominant;
            if (rng.uniform() < noise) cls = static_cast<int>(rng.index(n_classes));
            std::fill(hist.begin(), hist.end(), 0.0);
            hist[static_cast<std::size_t>(cls)] = 1.0;
            out.push_back(p, cls, hist, 0, static_cast<std::uint32_t>(out.size()));
        }
    }
    return out;
}

/// Uniform random points in a cube of side `extent`.
inline std::vector<Vec3> random_points(Rng& rng, std::size_t n, double extent) {
    std::vector<Vec3> out(n);
    for (auto& p : out) p = Vec3(rng.uniform(0, extent), rng.uniform(0, extent), rng.uniform(0, extent));
    return out;
}

inline bool relative_close(double a, double b, double rel) {
    return std::abs(a - b) <= rel * std::max({std::abs(a), std::abs(b), 1e-300});
}

}  // namespace summon::oracle
