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

#include "summon/spatial.hpp"

#include <deque>

namespace summon {

inline constexpr int kNoise = -1;

/// Density-based clustering. A point is core when at least `min_pts` points
/// (itself included) lie within `eps`. Clusters are numbered in order of
/// their lowest-index core point; neighbors are expanded in ascending index
/// order, so a border point reachable from several clusters joins the one
/// with the smallest id.
inline std::vector<int> dbscan(std::span<const Vec3> points, double eps, std::size_t min_pts) {
    if (!(eps > 0.0)) throw Error("dbscan: eps must be positive");
    if (min_pts < 1) throw Error("dbscan: min_pts must be >= 1");
    constexpr int kUnvisited = -2;
    std::vector<int> label(points.size(), kUnvisited);
    const KdTree tree(points);
    std::vector<std::size_t> neighbors, inner;
    int next_cluster = 0;

    for (std::size_t i = 0; i < points.size(); ++i) {
        if (label[i] != kUnvisited) continue;
        tree.radius_into(points[i], eps, neighbors);
        if (neighbors.size() < min_pts) {
            label[i] = kNoise;
            continue;
        }
        const int cluster = next_cluster++;
        label[i] = cluster;
        std::deque<std::size_t> frontier;
        for (auto n : neighbors)
            if (n != i) frontier.push_back(n);
        while (!frontier.empty()) {
            const std::size_t j = frontier.front();
            frontier.pop_front();
            if (label[j] == kNoise) label[j] = cluster;  // border point
            if (label[j] != kUnvisited) continue;
            label[j] = cluster;
            tree.radius_into(points[j], eps, inner);
            if (inner.size() >= min_pts)
                for (auto n : inner)
                    if (label[n] == kUnvisited || label[n] == kNoise) frontier.push_back(n);
        }
    }
    return label;
}

}  // namespace summon
