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

#include <Eigen/Core>
#include <Eigen/Geometry>

#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>

namespace summon {

inline constexpr const char* kVersion = "0.1.0";

using Vec3 = Eigen::Vector3d;
using Vec2 = Eigen::Vector2d;

/// All recoverable failures in the library are reported with this type.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline bool all_finite(const Vec3& p) {
    return std::isfinite(p.x()) && std::isfinite(p.y()) && std::isfinite(p.z());
}

/// Axis-aligned bounding box. Default-constructed boxes are empty.
struct Aabb {
    Vec3 lo = Vec3::Constant(std::numeric_limits<double>::infinity());
    Vec3 hi = Vec3::Constant(-std::numeric_limits<double>::infinity());

    bool empty() const { return lo.x() > hi.x(); }
    void extend(const Vec3& p) {
        lo = lo.cwiseMin(p);
        hi = hi.cwiseMax(p);
    }
    void extend(const Aabb& b) {
        if (b.empty()) return;
        extend(b.lo);
        extend(b.hi);
    }
    Vec3 center() const { return 0.5 * (lo + hi); }
    Vec3 extents() const { return empty() ? Vec3::Zero() : Vec3(hi - lo); }
    Aabb inflated(double r) const {
        Aabb b = *this;
        b.lo.array() -= r;
        b.hi.array() += r;
        return b;
    }
    bool contains(const Vec3& p) const {
        return (p.array() >= lo.array()).all() && (p.array() <= hi.array()).all();
    }
    double squared_distance(const Vec3& p) const {
        const Vec3 q = p.cwiseMax(lo).cwiseMin(hi);
        return (p - q).squaredNorm();
    }
};

}  // namespace summon
