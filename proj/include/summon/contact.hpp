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

// Per-vertex contact semantics: ground-truth labeling against annotated
// scenes, accumulation over a motion sequence, local majority voting and
// clustering into contact instances.

#include "summon/dbscan.hpp"
#include "summon/geometry.hpp"
#include "summon/sdf.hpp"

#include <optional>
#include <string>
#include <unordered_map>

namespace summon {

/// Ordered object classes. Index size() is the implicit "void" class, so
/// per-vertex vectors have size() + 1 entries.
class CategorySet {
public:
    CategorySet() = default;
    explicit CategorySet(std::vector<std::string> names) : names_(std::move(names)) {
        if (names_.empty()) throw Error("CategorySet: at least one category required");
        for (std::size_t i = 0; i < names_.size(); ++i) {
            if (names_[i].empty()) throw Error("CategorySet: empty category name");
            if (names_[i] == "void") throw Error("CategorySet: 'void' is reserved");
            if (!index_.emplace(names_[i], static_cast<int>(i)).second)
                throw Error("CategorySet: duplicate category '" + names_[i] + "'");
        }
    }

    std::size_t size() const { return names_.size(); }
    int void_id() const { return static_cast<int>(names_.size()); }
    std::size_t vector_length() const { return names_.size() + 1; }
    const std::vector<std::string>& names() const { return names_; }

    const std::string& name(int id) const {
        static const std::string kVoid = "void";
        if (id == void_id()) return kVoid;
        return names_.at(static_cast<std::size_t>(id));
    }

    std::optional<int> find(const std::string& name) const {
        auto it = index_.find(name);
        if (it == index_.end()) return std::nullopt;
        return it->second;
    }

    int id(const std::string& name) const {
        if (auto i = find(name)) return *i;
        throw Error("unknown category '" + name + "'");
    }

    bool operator==(const CategorySet& o) const { return names_ == o.names_; }

private:
    std::vector<std::string> names_;
    std::unordered_map<std::string, int> index_;
};

/// Per-frame positions of a fixed set of body vertices. Positions are held
/// at file precision (float32). Faces, when present, give the body topology
/// shared by every frame.
struct MotionSequence {
    std::size_t n_frames = 0;
    std::size_t n_vertices = 0;
    double frame_rate = 30.0;
    std::vector<float> positions;  // [frame][vertex][xyz]
    std::vector<Face> faces;

    Vec3 vertex(std::size_t f, std::size_t v) const {
        const float* p = &positions[(f * n_vertices + v) * 3];
        return {p[0], p[1], p[2]};
    }

    std::vector<Vec3> frame(std::size_t f) const {
        std::vector<Vec3> out(n_vertices);
        for (std::size_t v = 0; v < n_vertices; ++v) out[v] = vertex(f, v);
        return out;
    }

    TriMesh frame_mesh(std::size_t f) const { return {frame(f), faces}; }

    void set_vertex(std::size_t f, std::size_t v, const Vec3& p) {
        float* q = &positions[(f * n_vertices + v) * 3];
        q[0] = static_cast<float>(p.x());
        q[1] = static_cast<float>(p.y());
        q[2] = static_cast<float>(p.z());
    }

    static MotionSequence from_frames(const std::vector<std::vector<Vec3>>& frames,
                                      double frame_rate, std::vector<Face> faces = {}) {
        MotionSequence m;
        m.n_frames = frames.size();
        m.n_vertices = frames.empty() ? 0 : frames.front().size();
        m.frame_rate = frame_rate;
        m.positions.resize(m.n_frames * m.n_vertices * 3);
        for (std::size_t f = 0; f < frames.size(); ++f) {
            if (frames[f].size() != m.n_vertices)
                throw Error("MotionSequence: frame " + std::to_string(f) + " has a different vertex count");
            for (std::size_t v = 0; v < m.n_vertices; ++v) m.set_vertex(f, v, frames[f][v]);
        }
        m.faces = std::move(faces);
        m.validate();
        return m;
    }

    void validate() const {
        if (n_frames < 1) throw Error("MotionSequence: at least one frame required");
        if (positions.size() != n_frames * n_vertices * 3)
            throw Error("MotionSequence: payload size does not match n_frames x n_vertices");
        for (float x : positions)
            if (!std::isfinite(x)) throw Error("MotionSequence: non-finite vertex coordinate");
        for (const auto& f : faces)
            for (auto i : f)
                if (i >= n_vertices) throw Error("MotionSequence: face index out of range");
        if (!(frame_rate > 0.0)) throw Error("MotionSequence: frame_rate must be positive");
    }

    bool operator==(const MotionSequence&) const = default;
};

/// Per-frame, per-vertex probability vectors over categories + void.
struct ContactSequence {
    CategorySet categories;
    std::size_t n_frames = 0;
    std::size_t n_vertices = 0;
    std::vector<float> probs;  // [frame][vertex][C+1]

    std::size_t width() const { return categories.vector_length(); }

    std::span<const float> row(std::size_t f, std::size_t v) const {
        return {&probs[(f * n_vertices + v) * width()], width()};
    }
    std::span<float> row(std::size_t f, std::size_t v) {
        return {&probs[(f * n_vertices + v) * width()], width()};
    }

    /// Highest-probability class; lowest index on ties.
    int argmax(std::size_t f, std::size_t v) const {
        const auto r = row(f, v);
        return static_cast<int>(std::max_element(r.begin(), r.end()) - r.begin());
    }

    static ContactSequence zeros(CategorySet cats, std::size_t n_frames, std::size_t n_vertices) {
        ContactSequence c;
        c.categories = std::move(cats);
        c.n_frames = n_frames;
        c.n_vertices = n_vertices;
        c.probs.assign(n_frames * n_vertices * c.width(), 0.0f);
        return c;
    }

    /// All-void one-hot sequence.
    static ContactSequence void_only(CategorySet cats, std::size_t n_frames, std::size_t n_vertices) {
        ContactSequence c = zeros(std::move(cats), n_frames, n_vertices);
        for (std::size_t f = 0; f < n_frames; ++f)
            for (std::size_t v = 0; v < n_vertices; ++v) c.row(f, v)[c.categories.void_id()] = 1.0f;
        return c;
    }

    void set_one_hot(std::size_t f, std::size_t v, int cls) {
        auto r = row(f, v);
        std::fill(r.begin(), r.end(), 0.0f);
        r[static_cast<std::size_t>(cls)] = 1.0f;
    }

    void validate() const {
        if (categories.size() == 0) throw Error("ContactSequence: empty category set");
        if (probs.size() != n_frames * n_vertices * width())
            throw Error("ContactSequence: payload size does not match header");
        for (std::size_t f = 0; f < n_frames; ++f)
            for (std::size_t v = 0; v < n_vertices; ++v) {
                double sum = 0.0;
                for (float p : row(f, v)) {
                    if (!(p >= 0.0f) || !std::isfinite(p))
                        throw Error("ContactSequence: negative or non-finite probability at frame " +
                                    std::to_string(f) + " vertex " + std::to_string(v));
                    sum += p;
                }
                if (std::abs(sum - 1.0) > 1e-4)
                    throw Error("ContactSequence: probabilities at frame " + std::to_string(f) +
                                " vertex " + std::to_string(v) + " sum to " + std::to_string(sum));
            }
    }

    bool operator==(const ContactSequence&) const = default;
};

inline void check_shapes(const MotionSequence& motion, const ContactSequence& contacts) {
    if (motion.n_frames != contacts.n_frames || motion.n_vertices != contacts.n_vertices)
        throw Error("shape mismatch: motion is " + std::to_string(motion.n_frames) + "x" +
                    std::to_string(motion.n_vertices) + ", contacts are " +
                    std::to_string(contacts.n_frames) + "x" + std::to_string(contacts.n_vertices));
}

/// Accumulated non-void contact points.
struct ContactPointSet {
    std::size_t n_classes = 0;  // C (void excluded)
    std::vector<Vec3> points;
    std::vector<int> classes;
    std::vector<double> mass;  // [point][C], accumulated probability mass
    std::vector<std::uint32_t> frame;
    std::vector<std::uint32_t> vertex;

    std::size_t size() const { return points.size(); }
    bool empty() const { return points.empty(); }

    std::span<const double> histogram(std::size_t i) const { return {&mass[i * n_classes], n_classes}; }

    void push_back(const Vec3& p, int cls, std::span<const double> hist, std::uint32_t f,
                   std::uint32_t v) {
        points.push_back(p);
        classes.push_back(cls);
        mass.insert(mass.end(), hist.begin(), hist.end());
        frame.push_back(f);
        vertex.push_back(v);
    }

    /// Points whose class satisfies `pred`, in order.
    template <typename Pred>
    ContactPointSet filter(Pred pred) const {
        ContactPointSet out;
        out.n_classes = n_classes;
        for (std::size_t i = 0; i < size(); ++i)
            if (pred(classes[i])) out.push_back(points[i], classes[i], histogram(i), frame[i], vertex[i]);
        return out;
    }
};

struct ContactInstance {
    int class_id = 0;
    std::vector<Vec3> points;
    std::vector<double> mass;  // summed member histograms, length C
    Vec3 centroid = Vec3::Zero();

    Aabb bounds() const {
        Aabb b;
        for (const auto& p : points) b.extend(p);
        return b;
    }
};

// ---------------------------------------------------------------------------
// Ground-truth labeling

struct SceneComponent {
    TriMesh mesh;
    int class_id = 0;
};

inline constexpr double kContactThreshold = 0.05;

/// One-hot labels: each vertex takes the class of the scene component with
/// the smallest signed distance, provided it is below `threshold`; otherwise
/// void.
inline ContactSequence label_from_scene(const MotionSequence& motion,
                                        std::span<const SceneComponent> scene,
                                        const CategorySet& categories,
                                        double threshold = kContactThreshold,
                                        const SdfOptions& sdf_options = {}) {
    if (scene.empty()) throw Error("label_from_scene: empty scene");
    if (!(threshold > 0.0)) throw Error("label_from_scene: threshold must be positive");
    std::vector<SdfGrid> fields;
    fields.reserve(scene.size());
    for (const auto& comp : scene) {
        if (comp.class_id < 0 || static_cast<std::size_t>(comp.class_id) >= categories.size())
            throw Error("label_from_scene: scene class id out of range");
        fields.push_back(build_sdf(comp.mesh, sdf_options));
    }
    ContactSequence out = ContactSequence::zeros(categories, motion.n_frames, motion.n_vertices);
    for (std::size_t f = 0; f < motion.n_frames; ++f)
        for (std::size_t v = 0; v < motion.n_vertices; ++v) {
            const Vec3 p = motion.vertex(f, v);
            int best = categories.void_id();
            double best_d = threshold;
            for (std::size_t c = 0; c < scene.size(); ++c) {
                const double d = fields[c].query(p);
                if (d < best_d) {
                    best_d = d;
                    best = scene[c].class_id;
                }
            }
            out.set_one_hot(f, v, best);
        }
    return out;
}

// ---------------------------------------------------------------------------
// Accumulation

enum class LabelMode { argmax, sample };

/// Collects every (frame, vertex) whose resolved class is not void. The
/// per-point histogram carries the full (non-void) probability vector.
inline ContactPointSet accumulate(const MotionSequence& motion, const ContactSequence& contacts,
                                  LabelMode mode = LabelMode::argmax, std::uint64_t seed = 0) {
    check_shapes(motion, contacts);
    const std::size_t C = contacts.categories.size();
    ContactPointSet out;
    out.n_classes = C;
    Rng rng(seed);
    std::vector<double> hist(C);
    for (std::size_t f = 0; f < motion.n_frames; ++f)
        for (std::size_t v = 0; v < motion.n_vertices; ++v) {
            const auto r = contacts.row(f, v);
            const int cls = mode == LabelMode::argmax ? contacts.argmax(f, v)
                                                      : static_cast<int>(rng.categorical(r));
            if (cls == contacts.categories.void_id()) continue;
            for (std::size_t c = 0; c < C; ++c) hist[c] = r[c];
            out.push_back(motion.vertex(f, v), cls, hist, static_cast<std::uint32_t>(f),
                          static_cast<std::uint32_t>(v));
        }
    return out;
}

// ---------------------------------------------------------------------------
// Local majority voting

inline constexpr double kVoteEpsilon = 0.1;
inline constexpr std::size_t kVoteMinPts = 10;

/// Most frequent class in `classes`; lowest class id on ties.
inline int majority_class(std::span<const int> classes, std::size_t n_classes) {
    std::vector<std::size_t> count(n_classes, 0);
    for (int c : classes) ++count[static_cast<std::size_t>(c)];
    return static_cast<int>(std::max_element(count.begin(), count.end()) - count.begin());
}

/// Clusters all points regardless of class and relabels every clustered
/// point to its cluster's majority class. Noise points keep their class.
inline ContactPointSet majority_vote(const ContactPointSet& points, double eps = kVoteEpsilon,
                                     std::size_t min_pts = kVoteMinPts) {
    const auto labels = dbscan(points.points, eps, min_pts);
    const int n_clusters = labels.empty() ? 0 : *std::max_element(labels.begin(), labels.end()) + 1;
    std::vector<std::vector<int>> members(static_cast<std::size_t>(std::max(n_clusters, 0)));
    for (std::size_t i = 0; i < labels.size(); ++i)
        if (labels[i] != kNoise) members[labels[i]].push_back(points.classes[i]);
    std::vector<int> winner(members.size());
    for (std::size_t k = 0; k < members.size(); ++k) winner[k] = majority_class(members[k], points.n_classes);
    ContactPointSet out = points;
    for (std::size_t i = 0; i < labels.size(); ++i)
        if (labels[i] != kNoise) out.classes[i] = winner[labels[i]];
    return out;
}

// ---------------------------------------------------------------------------
// Instance recovery

inline constexpr double kDownsampleVoxel = 0.05;
inline constexpr std::size_t kInstanceMinPts = 10;

/// One representative per occupied voxel of edge `voxel`, in order of first
/// occurrence: the centroid of the voxel's points, carrying their summed mass.
inline ContactPointSet voxel_downsample(const ContactPointSet& points, double voxel) {
    if (!(voxel > 0.0)) throw Error("voxel_downsample: voxel must be positive");
    struct Bucket {
        Vec3 sum = Vec3::Zero();
        std::size_t count = 0;
        std::vector<double> mass;
        std::size_t first = 0;
    };
    std::map<std::tuple<long long, long long, long long, int>, std::size_t> slot;
    std::vector<Bucket> buckets;
    for (std::size_t i = 0; i < points.size(); ++i) {
        const Vec3& p = points.points[i];
        const auto key = std::tuple{static_cast<long long>(std::floor(p.x() / voxel)),
                                    static_cast<long long>(std::floor(p.y() / voxel)),
                                    static_cast<long long>(std::floor(p.z() / voxel)), points.classes[i]};
        auto [it, inserted] = slot.try_emplace(key, buckets.size());
        if (inserted) {
            buckets.emplace_back();
            buckets.back().mass.assign(points.n_classes, 0.0);
            buckets.back().first = i;
        }
        Bucket& b = buckets[it->second];
        b.sum += p;
        ++b.count;
        const auto h = points.histogram(i);
        for (std::size_t c = 0; c < points.n_classes; ++c) b.mass[c] += h[c];
    }
    ContactPointSet out;
    out.n_classes = points.n_classes;
    for (const auto& b : buckets)
        out.push_back(b.sum / static_cast<double>(b.count), points.classes[b.first], b.mass,
                      points.frame[b.first], points.vertex[b.first]);
    return out;
}

/// Splits contact points into per-class density clusters. `Library` must
/// provide `class_epsilon(library, class_id)` (found by ADL), the clustering
/// radius for that class; it throws for classes the library lacks.
template <typename Library>
std::vector<ContactInstance> instances(const ContactPointSet& points, const Library& library,
                                       std::size_t min_pts = kInstanceMinPts,
                                       double downsample_voxel = kDownsampleVoxel) {
    const ContactPointSet reduced = voxel_downsample(points, downsample_voxel);
    std::vector<ContactInstance> out;
    for (std::size_t cls = 0; cls < points.n_classes; ++cls) {
        const auto members = reduced.filter([&](int c) { return c == static_cast<int>(cls); });
        if (members.empty()) continue;
        const double eps = class_epsilon(library, static_cast<int>(cls));
        const auto labels = dbscan(members.points, eps, min_pts);
        const int n_clusters = *std::max_element(labels.begin(), labels.end()) + 1;
        for (int k = 0; k < n_clusters; ++k) {
            ContactInstance inst;
            inst.class_id = static_cast<int>(cls);
            inst.mass.assign(points.n_classes, 0.0);
            for (std::size_t i = 0; i < labels.size(); ++i) {
                if (labels[i] != k) continue;
                inst.points.push_back(members.points[i]);
                const auto h = members.histogram(i);
                for (std::size_t c = 0; c < points.n_classes; ++c) inst.mass[c] += h[c];
            }
            if (inst.points.size() < min_pts) continue;
            for (const auto& p : inst.points) inst.centroid += p;
            inst.centroid /= static_cast<double>(inst.points.size());
            out.push_back(std::move(inst));
        }
    }
    return out;
}

/// Draws a class with probability proportional to accumulated mass.
inline int sample_instance_class(std::span<const double> mass, std::uint64_t seed) {
    Rng rng(seed);
    return static_cast<int>(rng.categorical(mass));
}

}  // namespace summon
