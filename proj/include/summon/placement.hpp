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

// Fitting furniture to contact instances.
//
// An object has four degrees of freedom (x, y, yaw and z) and z is never
// free: every evaluation re-drops the object so its lowest vertex rests on
// the floor. The objective is
//
//   L = lambda_contact * mean_{c in Vc} min_{o in Vo} |c - o|^2
//     + lambda_pen     * sum_{o in Vo, sdf(o) < t} sdf(o)^2
//
// where sdf is the merged human-sequence field. A lattice search over
// (x, y, yaw) warm-starts a derivative-free pattern search.

#include "summon/assets.hpp"

#include <functional>

namespace summon {

struct LossWeights {
    double lambda_contact = 1.0;
    double lambda_pen = 10.0;
    double pen_threshold = 0.02;  // t

    void validate() const {
        if (!(pen_threshold > 0.0)) throw Error("LossWeights: penetration threshold must be positive");
        if (lambda_contact < 0.0 || lambda_pen < 0.0) throw Error("LossWeights: negative lambda");
        if (lambda_contact == 0.0 && lambda_pen == 0.0) throw Error("LossWeights: both lambdas are zero");
    }
};

/// Default weights plus optional per-class overrides.
struct LossParams {
    LossWeights defaults;
    std::map<int, LossWeights> per_class;

    LossWeights for_class(int class_id) const {
        auto it = per_class.find(class_id);
        return it == per_class.end() ? defaults : it->second;
    }
};

struct GridSearchSpec {
    double margin = 0.5;
    double step = 0.1;
    int yaw_count = 16;

    void validate() const {
        if (!(step > 0.0)) throw Error("GridSearchSpec: step must be positive");
        if (yaw_count < 1) throw Error("GridSearchSpec: yaw_count must be >= 1");
        if (margin < 0.0) throw Error("GridSearchSpec: margin must be >= 0");
    }
};

struct PlacementCandidate {
    std::string asset_id;
    PlanarTransform transform;
    double total = 0.0;
    double contact = 0.0;
    double penetration = 0.0;
    std::size_t evaluations = 0;
    bool converged = true;
};

/// Process-wide sink that sees every candidate any objective produces.
/// Empty by default; used for auditing runs.
using CandidateObserver = std::function<void(const PlacementCandidate&)>;

inline CandidateObserver& candidate_observer() {
    static CandidateObserver observer;
    return observer;
}

// ---------------------------------------------------------------------------
// Floor

/// Floor height from floor-labeled body vertices: the lowest per-cluster
/// median z. Falls back to the 5th percentile when clustering finds only
/// noise.
inline double estimate_floor_height(const MotionSequence& motion, const ContactSequence& contacts,
                                    int floor_class, double eps = 0.1, std::size_t min_pts = 10) {
    check_shapes(motion, contacts);
    std::vector<Vec3> pts;
    for (std::size_t f = 0; f < motion.n_frames; ++f)
        for (std::size_t v = 0; v < motion.n_vertices; ++v)
            if (contacts.argmax(f, v) == floor_class) pts.push_back(motion.vertex(f, v));
    if (pts.empty()) throw Error("estimate_floor_height: no floor-labeled vertices");

    auto median = [](std::vector<double> z) {
        std::sort(z.begin(), z.end());
        const std::size_t n = z.size();
        return n % 2 ? z[n / 2] : 0.5 * (z[n / 2 - 1] + z[n / 2]);
    };
    const auto labels = dbscan(pts, eps, min_pts);
    std::map<int, std::vector<double>> clusters;
    for (std::size_t i = 0; i < pts.size(); ++i)
        if (labels[i] != kNoise) clusters[labels[i]].push_back(pts[i].z());
    if (clusters.empty()) {
        std::vector<double> z;
        for (const auto& p : pts) z.push_back(p.z());
        std::sort(z.begin(), z.end());
        const auto rank = static_cast<std::size_t>(std::ceil(0.05 * z.size()));
        return z[std::max<std::size_t>(rank, 1) - 1];
    }
    double best = std::numeric_limits<double>::infinity();
    for (auto& [id, z] : clusters) best = std::min(best, median(std::move(z)));
    return best;
}

/// Adjusts the z translation so the lowest transformed vertex sits at floor_z.
inline PlanarTransform drop_to_floor(const ObjectAsset& asset, const PlanarTransform& xf, double floor_z) {
    double lowest = std::numeric_limits<double>::infinity();
    for (const auto& v : asset.mesh.vertices) lowest = std::min(lowest, xf.apply(v, asset.pivot).z());
    return xf.with_z(xf.translation().z() + (floor_z - lowest));
}

// ---------------------------------------------------------------------------
// Losses

inline double contact_loss(std::span<const Vec3> contact_points, std::span<const Vec3> object_points,
                           double lambda_contact) {
    if (contact_points.empty() || object_points.empty()) throw Error("contact_loss: empty cloud");
    const KdTree tree(object_points);
    double sum = 0.0;
    for (const auto& c : contact_points) sum += tree.nearest(c).second;
    return lambda_contact * (sum / static_cast<double>(contact_points.size()));
}

inline double penetration_loss(std::span<const Vec3> object_points, const SdfGrid& human_sdf,
                               double lambda_pen, double threshold) {
    if (object_points.empty()) throw Error("penetration_loss: empty cloud");
    double sum = 0.0;
    for (const auto& p : object_points) {
        const double d = human_sdf.query(p);
        if (d < threshold) sum += d * d;
    }
    return lambda_pen * sum;
}

struct LossBreakdown {
    double total = 0.0;
    double contact = 0.0;
    double penetration = 0.0;
};

/// Evaluates the placement objective for one asset against one instance.
/// Contact distances are measured in the asset frame (the inverse transform
/// of the contact points) so the asset cloud's tree is built once.
class PlacementObjective {
public:
    PlacementObjective(std::span<const Vec3> contact_points, const ObjectAsset& asset,
                       const SdfGrid& human_sdf, const LossWeights& weights, double floor_z)
        : contact_(contact_points), asset_(asset), sdf_(human_sdf), w_(weights), floor_z_(floor_z),
          tree_(asset.cloud.points) {
        w_.validate();
        if (w_.lambda_contact > 0.0 && contact_.empty())
            throw Error("PlacementObjective: empty contact instance");
    }

    const ObjectAsset& asset() const { return asset_; }
    std::size_t evaluations() const { return evaluations_; }

    /// Transform with the asset's pivot at (x, y), rotated by yaw, dropped to floor.
    PlanarTransform pose(double x, double y, double yaw) const {
        const PlanarTransform flat(Vec3(x - asset_.pivot.x(), y - asset_.pivot.y(), 0.0), yaw);
        return drop_to_floor(asset_, flat, floor_z_);
    }

    LossBreakdown operator()(const PlanarTransform& xf) {
        ++evaluations_;
        LossBreakdown out;
        if (w_.lambda_contact > 0.0) {
            double sum = 0.0;
            for (const auto& c : contact_) sum += tree_.nearest(xf.unapply(c, asset_.pivot)).second;
            out.contact = w_.lambda_contact * (sum / static_cast<double>(contact_.size()));
        }
        if (w_.lambda_pen > 0.0) {
            double sum = 0.0;
            for (const auto& p : asset_.cloud.points) {
                const double d = sdf_.query(xf.apply(p, asset_.pivot));
                if (d < w_.pen_threshold) sum += d * d;
            }
            out.penetration = w_.lambda_pen * sum;
        }
        out.total = out.contact + out.penetration;
        return out;
    }

    PlacementCandidate candidate(const PlanarTransform& xf) {
        const auto l = (*this)(xf);
        PlacementCandidate c{asset_.id, xf, l.total, l.contact, l.penetration, evaluations_, true};
        if (const auto& observe = candidate_observer()) observe(c);
        return c;
    }

private:
    std::span<const Vec3> contact_;
    const ObjectAsset& asset_;
    const SdfGrid& sdf_;
    LossWeights w_;
    double floor_z_;
    KdTree tree_;
    std::size_t evaluations_ = 0;
};

/// Transforms the asset's cached cloud and evaluates both loss terms.
inline LossBreakdown total_loss(std::span<const Vec3> contact_points, const ObjectAsset& asset,
                                const PlanarTransform& xf, const SdfGrid& human_sdf,
                                const LossWeights& w) {
    w.validate();
    const auto cloud = asset.placed_cloud(xf);
    LossBreakdown out;
    if (w.lambda_contact > 0.0) out.contact = contact_loss(contact_points, cloud, w.lambda_contact);
    if (w.lambda_pen > 0.0) out.penetration = penetration_loss(cloud, human_sdf, w.lambda_pen, w.pen_threshold);
    out.total = out.contact + out.penetration;
    return out;
}

// ---------------------------------------------------------------------------
// Search

/// Lattice coordinates lo, lo + step, ... up to hi (inclusive within 1e-9).
inline std::vector<double> lattice_axis(double lo, double hi, double step) {
    std::vector<double> out;
    const auto n = static_cast<long long>(std::floor((hi - lo) / step + 1e-9));
    for (long long i = 0; i <= n; ++i) out.push_back(lo + static_cast<double>(i) * step);
    return out;
}

/// Exhaustive search over pivot positions covering the instance's xy bounds
/// inflated by the margin, times evenly spaced yaws. Ties resolve to the
/// lexicographically smallest (x, y, yaw).
inline PlacementCandidate grid_search(PlacementObjective& objective, const Aabb& region,
                                      const GridSearchSpec& spec) {
    spec.validate();
    const auto xs = lattice_axis(region.lo.x() - spec.margin, region.hi.x() + spec.margin, spec.step);
    const auto ys = lattice_axis(region.lo.y() - spec.margin, region.hi.y() + spec.margin, spec.step);
    if (xs.empty() || ys.empty()) throw Error("grid_search: empty lattice");
    const std::size_t start = objective.evaluations();
    std::optional<PlacementCandidate> best;
    for (double x : xs)
        for (double y : ys)
            for (int k = 0; k < spec.yaw_count; ++k) {
                const double yaw = 2.0 * std::numbers::pi * k / spec.yaw_count;
                auto c = objective.candidate(objective.pose(x, y, yaw));
                if (!best || c.total < best->total) best = std::move(c);
            }
    best->evaluations = objective.evaluations() - start;
    return *best;
}

inline PlacementCandidate grid_search(const ContactInstance& instance, const ObjectAsset& asset,
                                      const SdfGrid& human_sdf, const GridSearchSpec& spec,
                                      const LossWeights& weights, double floor_z) {
    PlacementObjective objective(instance.points, asset, human_sdf, weights, floor_z);
    return grid_search(objective, instance.bounds(), spec);
}

struct RefineOptions {
    double initial_step = 0.05;                        // meters
    double initial_yaw_step = std::numbers::pi / 16;  // radians
    double tolerance = 1e-6;                           // stop once the step falls below this
    std::size_t max_iters = 200;
};

/// Compass search over (x, y, yaw). Each iteration polls the six axis moves
/// and takes the best strictly improving one; when none improves, steps are
/// halved. The returned loss never exceeds the initial loss. `trace`, when
/// given, receives the loss after every accepted move (starting with init).
inline PlacementCandidate refine(PlacementObjective& objective, const PlacementCandidate& init,
                                 const RefineOptions& opt = {}, std::vector<double>* trace = nullptr) {
    const std::size_t start = objective.evaluations();
    const Vec3& pivot = objective.asset().pivot;
    double x = init.transform.translation().x() + pivot.x();
    double y = init.transform.translation().y() + pivot.y();
    double yaw = init.transform.yaw();

    PlacementCandidate best = objective.candidate(objective.pose(x, y, yaw));
    // Fall back to init itself if re-dropping perturbed it upward.
    if (init.total < best.total || init.asset_id != best.asset_id) best = init;
    if (trace) trace->assign(1, best.total);

    double step = opt.initial_step, yaw_step = opt.initial_yaw_step;
    std::size_t iter = 0;
    bool converged = false;
    while (iter < opt.max_iters) {
        if (step < opt.tolerance) {
            converged = true;
            break;
        }
        ++iter;
        const std::array<std::array<double, 3>, 6> moves{{{step, 0, 0},
                                                          {-step, 0, 0},
                                                          {0, step, 0},
                                                          {0, -step, 0},
                                                          {0, 0, yaw_step},
                                                          {0, 0, -yaw_step}}};
        std::optional<PlacementCandidate> improved;
        std::array<double, 3> chosen{};
        for (const auto& m : moves) {
            auto c = objective.candidate(objective.pose(x + m[0], y + m[1], yaw + m[2]));
            if (c.total < best.total && (!improved || c.total < improved->total)) {
                improved = std::move(c);
                chosen = m;
            }
        }
        if (improved) {
            x += chosen[0];
            y += chosen[1];
            yaw += chosen[2];
            best = std::move(*improved);
            if (trace) trace->push_back(best.total);
        } else {
            step *= 0.5;
            yaw_step *= 0.5;
        }
    }
    if (!converged && step < opt.tolerance) converged = true;
    best.evaluations = objective.evaluations() - start;
    best.converged = converged;
    return best;
}

inline PlacementCandidate refine(const ContactInstance& instance, const ObjectAsset& asset,
                                 const PlacementCandidate& init, const SdfGrid& human_sdf,
                                 const LossWeights& weights, double floor_z,
                                 const RefineOptions& opt = {}) {
    PlacementObjective objective(instance.points, asset, human_sdf, weights, floor_z);
    return refine(objective, init, opt);
}

enum class PlacementMode { best, diverse };

/// Grid search then refinement for every asset of the instance's class.
/// `best` keeps the lowest final loss; `diverse` returns every candidate in
/// ascending loss (manifest order on ties).
inline std::vector<PlacementCandidate> place_instance(const ContactInstance& instance,
                                                      const AssetLibrary& library,
                                                      const SdfGrid& human_sdf, PlacementMode mode,
                                                      const LossParams& params,
                                                      const GridSearchSpec& spec, double floor_z,
                                                      const RefineOptions& refine_opt = {}) {
    const LossWeights w = params.for_class(instance.class_id);
    std::vector<PlacementCandidate> out;
    for (const auto* asset : library.candidates(instance.class_id)) {
        PlacementObjective objective(instance.points, *asset, human_sdf, w, floor_z);
        const auto warm = grid_search(objective, instance.bounds(), spec);
        out.push_back(refine(objective, warm, refine_opt));
    }
    std::stable_sort(out.begin(), out.end(),
                     [](const auto& a, const auto& b) { return a.total < b.total; });
    if (mode == PlacementMode::best) out.resize(1);
    return out;
}

// ---------------------------------------------------------------------------
// Human field

struct HumanSdfOptions {
    std::size_t frame_step = 5;
    double vertex_radius = 0.03;  // ball radius when the motion has no faces
    SdfOptions grid;
};

/// Field of the merged body over every `frame_step`-th frame. Bodies without
/// topology are treated as a union of small balls around their vertices.
inline SdfGrid build_human_sdf(const MotionSequence& motion, const HumanSdfOptions& opt = {}) {
    const std::size_t step = std::max<std::size_t>(opt.frame_step, 1);
    if (!motion.faces.empty()) {
        std::vector<TriMesh> meshes;
        for (std::size_t f = 0; f < motion.n_frames; f += step) meshes.push_back(motion.frame_mesh(f));
        return build_sdf(meshes, opt.grid);
    }
    std::vector<Vec3> pts;
    for (std::size_t f = 0; f < motion.n_frames; f += step)
        for (std::size_t v = 0; v < motion.n_vertices; ++v) pts.push_back(motion.vertex(f, v));
    return build_point_sdf(pts, opt.vertex_radius, opt.grid);
}

}  // namespace summon
