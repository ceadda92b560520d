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

#include "summon/common.hpp"

#include <algorithm>
#include <numeric>
#include <span>
#include <vector>

namespace summon {

/// Static 3-d tree over a borrowed point array. The array must outlive the
/// tree and stay unmodified.
class KdTree {
public:
    KdTree() = default;
    explicit KdTree(std::span<const Vec3> points) : points_(points) {
        index_.resize(points.size());
        std::iota(index_.begin(), index_.end(), std::size_t{0});
        if (!points.empty()) build(0, points.size(), 0);
    }

    std::size_t size() const { return points_.size(); }

    /// Index and squared distance of the nearest point; lowest index on ties.
    std::pair<std::size_t, double> nearest(const Vec3& q) const {
        if (points_.empty()) throw Error("KdTree::nearest on empty tree");
        std::pair<std::size_t, double> best{points_.size(), std::numeric_limits<double>::infinity()};
        nearest_rec(0, points_.size(), 0, q, best);
        return best;
    }

    /// Indices of all points with |p - q| <= radius, ascending.
    std::vector<std::size_t> radius(const Vec3& q, double radius) const {
        std::vector<std::size_t> out;
        radius_into(q, radius, out);
        return out;
    }

    void radius_into(const Vec3& q, double radius, std::vector<std::size_t>& out) const {
        out.clear();
        if (!points_.empty()) radius_rec(0, points_.size(), 0, q, radius * radius, out);
        std::sort(out.begin(), out.end());
    }

private:
    // Implicit tree: the median of [lo, hi) sits at mid and splits on `axis`.
    void build(std::size_t lo, std::size_t hi, int axis) {
        if (hi - lo <= 1) return;
        const std::size_t mid = lo + (hi - lo) / 2;
        std::nth_element(index_.begin() + lo, index_.begin() + mid, index_.begin() + hi,
                         [&](std::size_t a, std::size_t b) {
                             if (points_[a][axis] != points_[b][axis])
                                 return points_[a][axis] < points_[b][axis];
                             return a < b;
                         });
        build(lo, mid, (axis + 1) % 3);
        build(mid + 1, hi, (axis + 1) % 3);
    }

    void nearest_rec(std::size_t lo, std::size_t hi, int axis, const Vec3& q,
                     std::pair<std::size_t, double>& best) const {
        if (lo >= hi) return;
        const std::size_t mid = lo + (hi - lo) / 2;
        const std::size_t id = index_[mid];
        const double d2 = (points_[id] - q).squaredNorm();
        if (d2 < best.second || (d2 == best.second && id < best.first)) best = {id, d2};
        const double delta = q[axis] - points_[id][axis];
        const int next = (axis + 1) % 3;
        if (delta <= 0.0) {
            nearest_rec(lo, mid, next, q, best);
            if (delta * delta <= best.second) nearest_rec(mid + 1, hi, next, q, best);
        } else {
            nearest_rec(mid + 1, hi, next, q, best);
            if (delta * delta <= best.second) nearest_rec(lo, mid, next, q, best);
        }
    }

    void radius_rec(std::size_t lo, std::size_t hi, int axis, const Vec3& q, double r2,
                    std::vector<std::size_t>& out) const {
        if (lo >= hi) return;
        const std::size_t mid = lo + (hi - lo) / 2;
        const std::size_t id = index_[mid];
        if ((points_[id] - q).squaredNorm() <= r2) out.push_back(id);
        const double delta = q[axis] - points_[id][axis];
        const int next = (axis + 1) % 3;
        if (delta <= 0.0 || delta * delta <= r2) radius_rec(lo, mid, next, q, r2, out);
        if (delta >= 0.0 || delta * delta <= r2) radius_rec(mid + 1, hi, next, q, r2, out);
    }

    std::span<const Vec3> points_;
    std::vector<std::size_t> index_;
};

}  // namespace summon
