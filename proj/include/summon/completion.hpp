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

// Filling the scene with furniture nobody touches. Categories come from an
// autoregressive model over the categories already in the room; objects go
// to random free floor cells and are nudged off the human trajectory with
// the penetration term alone.

#include "summon/placement.hpp"

#include <memory>

namespace summon {

struct PlacedObject {
    std::string asset_id;
    std::string class_name;
    PlanarTransform transform;
    bool in_contact = false;

    bool operator==(const PlacedObject&) const = default;
};

struct SceneLayout {
    double floor_height = 0.0;
    std::vector<PlacedObject> objects;

    bool operator==(const SceneLayout&) const = default;
};

/// World-space AABB of a placed object.
inline Aabb placed_bounds(const AssetLibrary& library, const PlacedObject& obj) {
    return library.get(obj.asset_id).placed_bounds(obj.transform);
}

/// Interpenetration depth of two boxes: the smallest per-axis overlap, or 0
/// when they are disjoint.
inline double overlap_depth(const Aabb& a, const Aabb& b) {
    double depth = std::numeric_limits<double>::infinity();
    for (int k = 0; k < 3; ++k) depth = std::min(depth, std::min(a.hi[k], b.hi[k]) - std::max(a.lo[k], b.lo[k]));
    return std::max(depth, 0.0);
}

// ---------------------------------------------------------------------------
// Occupancy

class OccupancyGrid {
public:
    OccupancyGrid() = default;
    OccupancyGrid(const Vec2& lo, const Vec2& hi, double cell_size) : lo_(lo), cell_(cell_size) {
        if (!(cell_size > 0.0)) throw Error("OccupancyGrid: cell size must be positive");
        nx_ = std::max(1, static_cast<int>(std::ceil((hi.x() - lo.x()) / cell_size)));
        ny_ = std::max(1, static_cast<int>(std::ceil((hi.y() - lo.y()) / cell_size)));
        occupied_.assign(static_cast<std::size_t>(nx_) * ny_, 0);
    }

    int nx() const { return nx_; }
    int ny() const { return ny_; }
    double cell_size() const { return cell_; }
    const Vec2& lo() const { return lo_; }

    bool occupied(int i, int j) const { return occupied_[static_cast<std::size_t>(j) * nx_ + i] != 0; }
    void set(int i, int j) { occupied_[static_cast<std::size_t>(j) * nx_ + i] = 1; }

    Vec2 center(int i, int j) const { return lo_ + cell_ * Vec2(i + 0.5, j + 0.5); }

    std::optional<std::pair<int, int>> cell_of(double x, double y) const {
        const int i = static_cast<int>(std::floor((x - lo_.x()) / cell_));
        const int j = static_cast<int>(std::floor((y - lo_.y()) / cell_));
        if (i < 0 || j < 0 || i >= nx_ || j >= ny_) return std::nullopt;
        return std::pair{i, j};
    }

    /// Points outside the grid count as occupied.
    bool occupied_at(double x, double y) const {
        const auto c = cell_of(x, y);
        return !c || occupied(c->first, c->second);
    }

    /// Marks every cell whose rectangle lies within `radius` (in xy) of p.
    void mark(const Vec3& p, double radius) {
        const int i0 = std::max(0, static_cast<int>(std::floor((p.x() - radius - lo_.x()) / cell_)));
        const int i1 = std::min(nx_ - 1, static_cast<int>(std::floor((p.x() + radius - lo_.x()) / cell_)));
        const int j0 = std::max(0, static_cast<int>(std::floor((p.y() - radius - lo_.y()) / cell_)));
        const int j1 = std::min(ny_ - 1, static_cast<int>(std::floor((p.y() + radius - lo_.y()) / cell_)));
        for (int j = j0; j <= j1; ++j)
            for (int i = i0; i <= i1; ++i) {
                const double cx = std::clamp(p.x(), lo_.x() + i * cell_, lo_.x() + (i + 1) * cell_);
                const double cy = std::clamp(p.y(), lo_.y() + j * cell_, lo_.y() + (j + 1) * cell_);
                if (Vec2(p.x() - cx, p.y() - cy).norm() <= radius) set(i, j);
            }
    }

    std::vector<std::pair<int, int>> free_cells() const {
        std::vector<std::pair<int, int>> out;
        for (int j = 0; j < ny_; ++j)
            for (int i = 0; i < nx_; ++i)
                if (!occupied(i, j)) out.emplace_back(i, j);
        return out;
    }

    std::size_t occupied_count() const {
        return static_cast<std::size_t>(std::count(occupied_.begin(), occupied_.end(), 1));
    }

private:
    Vec2 lo_ = Vec2::Zero();
    double cell_ = 1.0;
    int nx_ = 0, ny_ = 0;
    std::vector<std::uint8_t> occupied_;
};

struct OccupancyOptions {
    double cell_size = 0.25;
    double proximity = 0.3;
    double border = 1.0;
};

/// Floor grid over the motion and placed objects (plus a border). Cells near
/// a floor-contact body vertex or a placed object's surface samples are
/// occupied. `floor_class` < 0 disables the body term.
inline OccupancyGrid build_occupancy(const MotionSequence& motion, const ContactSequence& contacts,
                                     int floor_class, const SceneLayout& layout,
                                     const AssetLibrary& library, const OccupancyOptions& opt = {}) {
    check_shapes(motion, contacts);
    Aabb box;
    for (std::size_t f = 0; f < motion.n_frames; ++f)
        for (std::size_t v = 0; v < motion.n_vertices; ++v) box.extend(motion.vertex(f, v));
    std::vector<std::vector<Vec3>> object_points;
    for (const auto& obj : layout.objects) {
        const auto& asset = library.get(obj.asset_id);
        object_points.push_back(asset.placed_cloud(obj.transform));
        box.extend(asset.placed_bounds(obj.transform));
    }
    box = box.inflated(opt.border);
    OccupancyGrid grid(box.lo.head<2>(), box.hi.head<2>(), opt.cell_size);
    if (floor_class >= 0)
        for (std::size_t f = 0; f < motion.n_frames; ++f)
            for (std::size_t v = 0; v < motion.n_vertices; ++v)
                if (contacts.argmax(f, v) == floor_class) grid.mark(motion.vertex(f, v), opt.proximity);
    for (const auto& pts : object_points)
        for (const auto& p : pts) grid.mark(p, opt.proximity);
    return grid;
}

// ---------------------------------------------------------------------------
// Category model

/// Autoregressive distribution over the next object category given the
/// categories already present.
class CategorySequenceModel {
public:
    virtual ~CategorySequenceModel() = default;
    virtual const std::vector<std::string>& vocabulary() const = 0;
    virtual std::vector<double> next_distribution(std::span<const int> prefix) const = 0;
};

/// Additively smoothed n-gram model with begin-of-sequence padding:
///   P(w | h) = (count(h, w) + alpha) / (count(h) + alpha * |V|)
/// where h is the last `order` tokens of the padded prefix.
class NGramModel final : public CategorySequenceModel {
public:
    static constexpr int kBos = -1;

    NGramModel(std::vector<std::string> vocabulary, int order, double alpha)
        : vocab_(std::move(vocabulary)), order_(order), alpha_(alpha) {
        if (order_ < 1) throw Error("NGramModel: order must be >= 1");
        if (!(alpha_ > 0.0)) throw Error("NGramModel: smoothing must be positive");
        if (vocab_.empty()) throw Error("NGramModel: empty vocabulary");
        for (std::size_t i = 0; i < vocab_.size(); ++i)
            if (!index_.emplace(vocab_[i], static_cast<int>(i)).second)
                throw Error("NGramModel: duplicate vocabulary entry '" + vocab_[i] + "'");
    }

    const std::vector<std::string>& vocabulary() const override { return vocab_; }
    int order() const { return order_; }
    double alpha() const { return alpha_; }

    int token(const std::string& name) const {
        auto it = index_.find(name);
        if (it == index_.end()) throw Error("NGramModel: unknown category '" + name + "'");
        return it->second;
    }

    void observe(std::span<const int> sequence) {
        std::vector<int> padded(static_cast<std::size_t>(order_), kBos);
        for (int t : sequence) {
            if (t < 0 || static_cast<std::size_t>(t) >= vocab_.size())
                throw Error("NGramModel: token out of range");
            const std::vector<int> ctx(padded.end() - order_, padded.end());
            auto& row = counts_[ctx];
            if (row.empty()) row.assign(vocab_.size(), 0.0);
            row[static_cast<std::size_t>(t)] += 1.0;
            totals_[ctx] += 1.0;
            padded.push_back(t);
        }
    }

    std::vector<int> context(std::span<const int> prefix) const {
        std::vector<int> padded(static_cast<std::size_t>(order_), kBos);
        padded.insert(padded.end(), prefix.begin(), prefix.end());
        return {padded.end() - order_, padded.end()};
    }

    std::vector<double> next_distribution(std::span<const int> prefix) const override {
        const auto ctx = context(prefix);
        const double V = static_cast<double>(vocab_.size());
        std::vector<double> p(vocab_.size());
        auto row = counts_.find(ctx);
        auto total = totals_.find(ctx);
        const double n = total == totals_.end() ? 0.0 : total->second;
        for (std::size_t w = 0; w < vocab_.size(); ++w) {
            const double c = row == counts_.end() ? 0.0 : row->second[w];
            p[w] = (c + alpha_) / (n + alpha_ * V);
        }
        return p;
    }

private:
    std::vector<std::string> vocab_;
    std::unordered_map<std::string, int> index_;
    int order_;
    double alpha_;
    std::map<std::vector<int>, std::vector<double>> counts_;
    std::map<std::vector<int>, double> totals_;
};

inline NGramModel train_category_model(const std::vector<std::vector<std::string>>& corpus,
                                       std::vector<std::string> vocabulary, int order = 2,
                                       double alpha = 0.1) {
    if (corpus.empty()) throw Error("train_category_model: empty corpus");
    NGramModel model(std::move(vocabulary), order, alpha);
    for (const auto& seq : corpus) {
        std::vector<int> tokens;
        for (const auto& name : seq) tokens.push_back(model.token(name));
        model.observe(tokens);
    }
    return model;
}

inline int next_category(const CategorySequenceModel& model, std::span<const int> prefix,
                         std::uint64_t seed) {
    Rng rng(seed);
    const auto p = model.next_distribution(prefix);
    return static_cast<int>(rng.categorical(std::span<const double>(p)));
}

// ---------------------------------------------------------------------------
// Completion

struct CompletionOptions {
    OccupancyOptions occupancy;
    LossWeights weights{0.0, 10.0, 0.02};  // penetration only
    RefineOptions refine;
    std::size_t max_attempts = 20;
    double overlap_tolerance = 0.02;
    int floor_class = -1;
};

struct CompletionResult {
    SceneLayout layout;
    std::vector<std::string> warnings;
    std::vector<double> penetration;  // final penetration loss of each added object
};

/// Adds up to `n_objects` non-contact objects. Each slot samples a category
/// (restricted to categories the library has assets for) conditioned on
/// every category already in the layout, then tries up to max_attempts
/// random (asset, free cell, yaw) placements. A placement is kept only when
/// its refined penetration loss is exactly zero, its pivot still lies in a
/// free cell and its box overlaps no existing box by more than the
/// tolerance.
inline CompletionResult complete_scene(const SceneLayout& layout, const CategorySequenceModel& model,
                                       const AssetLibrary& library, const MotionSequence& motion,
                                       const ContactSequence& contacts, const SdfGrid& human_sdf,
                                       std::size_t n_objects, std::uint64_t seed,
                                       const CompletionOptions& opt = {}) {
    if (opt.weights.lambda_contact != 0.0)
        throw Error("complete_scene: completion refines with the penetration term only");
    const auto& cats = library.categories();
    // Map model vocabulary onto library classes.
    std::vector<int> vocab_class;
    for (const auto& name : model.vocabulary()) {
        const auto id = cats.find(name);
        vocab_class.push_back(id ? *id : -1);
    }
    std::vector<int> class_token(cats.size(), -1);
    for (std::size_t t = 0; t < vocab_class.size(); ++t)
        if (vocab_class[t] >= 0) class_token[vocab_class[t]] = static_cast<int>(t);

    CompletionResult result;
    result.layout = layout;
    OccupancyGrid grid = build_occupancy(motion, contacts, opt.floor_class, layout, library, opt.occupancy);
    std::vector<Aabb> boxes;
    for (const auto& obj : layout.objects) boxes.push_back(placed_bounds(library, obj));
    Rng rng(seed);

    for (std::size_t slot = 0; slot < n_objects; ++slot) {
        std::vector<int> prefix;
        for (const auto& obj : result.layout.objects)
            if (auto id = cats.find(obj.class_name); id && class_token[*id] >= 0)
                prefix.push_back(class_token[*id]);
        auto p = model.next_distribution(prefix);
        for (std::size_t t = 0; t < p.size(); ++t)
            if (vocab_class[t] < 0 || library.count(vocab_class[t]) == 0) p[t] = 0.0;
        if (std::all_of(p.begin(), p.end(), [](double x) { return x == 0.0; })) {
            result.warnings.push_back("slot " + std::to_string(slot) + ": no category with assets");
            continue;
        }
        const int cls = vocab_class[rng.categorical(std::span<const double>(p))];
        const auto pool = library.candidates(cls);

        bool accepted = false;
        for (std::size_t attempt = 0; attempt < opt.max_attempts && !accepted; ++attempt) {
            const auto free = grid.free_cells();
            if (free.empty()) break;
            const ObjectAsset& asset = *pool[rng.index(pool.size())];
            const auto [ci, cj] = free[rng.index(free.size())];
            const Vec2 c = grid.center(ci, cj);
            const double yaw = rng.uniform(0.0, 2.0 * std::numbers::pi);

            PlacementObjective objective({}, asset, human_sdf, opt.weights, layout.floor_height);
            auto placed = objective.candidate(objective.pose(c.x(), c.y(), yaw));
            if (placed.penetration > 0.0) placed = refine(objective, placed, opt.refine);
            if (placed.penetration > 0.0) continue;

            const Vec3 pivot = placed.transform.apply(asset.pivot, asset.pivot);
            if (grid.occupied_at(pivot.x(), pivot.y())) continue;
            const Aabb box = asset.placed_bounds(placed.transform);
            if (std::any_of(boxes.begin(), boxes.end(),
                            [&](const Aabb& b) { return overlap_depth(box, b) > opt.overlap_tolerance; }))
                continue;

            result.layout.objects.push_back({asset.id, cats.name(cls), placed.transform, false});
            result.penetration.push_back(placed.penetration);
            boxes.push_back(box);
            for (const auto& q : asset.placed_cloud(placed.transform)) grid.mark(q, opt.occupancy.proximity);
            accepted = true;
        }
        if (!accepted)
            result.warnings.push_back("slot " + std::to_string(slot) + ": no valid placement for '" +
                                      cats.name(cls) + "' after " + std::to_string(opt.max_attempts) +
                                      " attempts");
    }
    return result;
}

}  // namespace summon
