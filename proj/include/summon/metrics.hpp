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

#include "summon/completion.hpp"

namespace summon {

struct MetricReport {
    double non_collision = 1.0;
    double contact = 0.0;
    std::optional<double> consistency;
    std::optional<double> reconstruction_accuracy;

    bool operator==(const MetricReport&) const = default;
};

/// One signed distance grid per placed object, in world coordinates.
inline std::vector<SdfGrid> object_fields(const SceneLayout& layout, const AssetLibrary& library,
                                          const SdfOptions& opt = {}) {
    std::vector<SdfGrid> out;
    out.reserve(layout.objects.size());
    for (const auto& obj : layout.objects) {
        const auto* asset = library.find(obj.asset_id);
        if (!asset) throw Error("layout references unknown asset '" + obj.asset_id + "'");
        out.push_back(build_sdf(asset->placed_mesh(obj.transform), opt));
    }
    return out;
}

inline constexpr double kCollisionTolerance = 0.01;

/// Fraction of (frame, body vertex) observations with signed distance
/// >= -tolerance to every placed object.
inline double non_collision_score(const MotionSequence& motion, const SceneLayout& layout,
                                  const AssetLibrary& library, double tolerance = kCollisionTolerance,
                                  const SdfOptions& opt = {}) {
    const auto fields = object_fields(layout, library, opt);
    std::size_t clear = 0;
    for (std::size_t f = 0; f < motion.n_frames; ++f)
        for (std::size_t v = 0; v < motion.n_vertices; ++v) {
            const Vec3 p = motion.vertex(f, v);
            // Outside a grid the field is positive (padded boundary plus distance).
            const bool hit = std::any_of(fields.begin(), fields.end(), [&](const SdfGrid& g) {
                return g.box().contains(p) && g.query(p) < -tolerance;
            });
            if (!hit) ++clear;
        }
    return static_cast<double>(clear) / static_cast<double>(motion.n_frames * motion.n_vertices);
}

/// Fraction of contact-placed objects that some body vertex, in some frame,
/// comes within `threshold` of.
inline double contact_score(const MotionSequence& motion, const SceneLayout& layout,
                            const AssetLibrary& library, double threshold = kContactThreshold,
                            const SdfOptions& opt = {}) {
    SceneLayout contact_only;
    for (const auto& obj : layout.objects)
        if (obj.in_contact) contact_only.objects.push_back(obj);
    if (contact_only.objects.empty()) throw Error("contact_score: layout has no contact objects");
    const auto fields = object_fields(contact_only, library, opt);
    std::size_t touched = 0;
    for (const auto& g : fields) {
        const Aabb box = g.box().inflated(threshold);
        bool hit = false;
        for (std::size_t f = 0; f < motion.n_frames && !hit; ++f)
            for (std::size_t v = 0; v < motion.n_vertices && !hit; ++v) {
                const Vec3 p = motion.vertex(f, v);
                hit = box.contains(p) && std::abs(g.query(p)) < threshold;
            }
        if (hit) ++touched;
    }
    return static_cast<double>(touched) / static_cast<double>(fields.size());
}

inline constexpr double kConsistencyRadius = 0.1;

/// Fraction of points whose class equals the majority class of their
/// neighbors within `radius` (self excluded). Ties and isolated points count
/// as consistent.
inline double consistency_score(const ContactPointSet& points, double radius = kConsistencyRadius) {
    if (points.empty()) throw Error("consistency_score: empty point set");
    const KdTree tree(points.points);
    std::vector<std::size_t> nbrs;
    std::vector<std::size_t> count(points.n_classes);
    std::size_t consistent = 0;
    for (std::size_t i = 0; i < points.size(); ++i) {
        tree.radius_into(points.points[i], radius, nbrs);
        std::fill(count.begin(), count.end(), 0);
        std::size_t others = 0;
        for (auto j : nbrs)
            if (j != i) {
                ++count[static_cast<std::size_t>(points.classes[j])];
                ++others;
            }
        const std::size_t top = *std::max_element(count.begin(), count.end());
        if (others == 0 || count[static_cast<std::size_t>(points.classes[i])] == top) ++consistent;
    }
    return static_cast<double>(consistent) / static_cast<double>(points.size());
}

/// Fraction of (frame, vertex) where predicted and ground-truth argmax agree.
inline double reconstruction_accuracy(const ContactSequence& pred, const ContactSequence& gt) {
    if (pred.n_frames != gt.n_frames || pred.n_vertices != gt.n_vertices || pred.width() != gt.width())
        throw Error("reconstruction_accuracy: shape mismatch");
    const std::size_t n = pred.n_frames * pred.n_vertices;
    if (n == 0) throw Error("reconstruction_accuracy: empty sequences");
    std::size_t hits = 0;
    for (std::size_t f = 0; f < pred.n_frames; ++f)
        for (std::size_t v = 0; v < pred.n_vertices; ++v)
            if (pred.argmax(f, v) == gt.argmax(f, v)) ++hits;
    return static_cast<double>(hits) / static_cast<double>(n);
}

}  // namespace summon
