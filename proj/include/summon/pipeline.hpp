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

// End-to-end scene synthesis:
//
//   accumulate -> majority_vote -> instances -> place_instance (per instance)
//     -> complete_scene -> metrics
//
// Every stochastic choice draws from a stream derived from the master seed
// and the stage name, so a (config, inputs) pair fully determines the
// outputs.

#include "summon/io.hpp"

#include <cstdio>

namespace summon {

enum class DiversityMode { best, diverse, sampled };

inline std::string to_string(DiversityMode m) {
    switch (m) {
        case DiversityMode::best: return "best";
        case DiversityMode::diverse: return "diverse";
        case DiversityMode::sampled: return "sampled";
    }
    return "best";
}

inline DiversityMode diversity_from_string(const std::string& s) {
    if (s == "best") return DiversityMode::best;
    if (s == "diverse") return DiversityMode::diverse;
    if (s == "sampled") return DiversityMode::sampled;
    throw Error("unknown diversity mode '" + s + "' (expected best, diverse or sampled)");
}

struct PipelineConfig {
    std::filesystem::path motion, contacts, assets, corpus, out_dir;
    std::uint64_t seed = 0;
    DiversityMode diversity = DiversityMode::best;
    std::string floor_category = "floor";

    double vote_eps = kVoteEpsilon;
    std::size_t vote_min_pts = kVoteMinPts;
    std::size_t instance_min_pts = kInstanceMinPts;
    double downsample_voxel = kDownsampleVoxel;

    AssetOptions asset;
    LossWeights loss;
    std::map<std::string, LossWeights> loss_per_class;
    GridSearchSpec grid;
    RefineOptions refine;
    HumanSdfOptions human_sdf;

    std::size_t n_objects = 0;
    OccupancyOptions occupancy;
    int model_order = 2;
    double model_smoothing = 0.1;
    std::size_t max_attempts = 20;
    double overlap_tolerance = 0.02;

    double collision_tolerance = kCollisionTolerance;
    double contact_threshold = kContactThreshold;
    SdfOptions metric_sdf;
};

inline json to_json(const LossWeights& w) {
    return {{"lambda_contact", w.lambda_contact}, {"lambda_pen", w.lambda_pen}, {"t", w.pen_threshold}};
}

inline LossWeights loss_from_json(const json& j, LossWeights w = {}) {
    w.lambda_contact = j.value("lambda_contact", w.lambda_contact);
    w.lambda_pen = j.value("lambda_pen", w.lambda_pen);
    w.pen_threshold = j.value("t", w.pen_threshold);
    w.validate();
    return w;
}

inline json to_json(const PipelineConfig& c) {
    json per_class = json::object();
    for (const auto& [name, w] : c.loss_per_class) per_class[name] = to_json(w);
    return {
        {"motion", c.motion.generic_string()},
        {"contacts", c.contacts.generic_string()},
        {"assets", c.assets.generic_string()},
        {"corpus", c.corpus.generic_string()},
        {"out_dir", c.out_dir.generic_string()},
        {"seed", c.seed},
        {"diversity", to_string(c.diversity)},
        {"floor_category", c.floor_category},
        {"vote", {{"eps", c.vote_eps}, {"min_pts", c.vote_min_pts}}},
        {"instances", {{"min_pts", c.instance_min_pts}, {"downsample_voxel", c.downsample_voxel}}},
        {"asset_density", c.asset.density},
        {"asset_seed", c.asset.seed},
        {"loss", to_json(c.loss)},
        {"loss_per_class", per_class},
        {"grid", {{"margin", c.grid.margin}, {"step", c.grid.step}, {"yaw_count", c.grid.yaw_count}}},
        {"refine",
         {{"initial_step", c.refine.initial_step},
          {"initial_yaw_step", c.refine.initial_yaw_step},
          {"tolerance", c.refine.tolerance},
          {"max_iters", c.refine.max_iters}}},
        {"human_sdf",
         {{"frame_step", c.human_sdf.frame_step},
          {"vertex_radius", c.human_sdf.vertex_radius},
          {"cell_size", c.human_sdf.grid.cell_size},
          {"padding", c.human_sdf.grid.padding}}},
        {"completion",
         {{"n_objects", c.n_objects},
          {"cell_size", c.occupancy.cell_size},
          {"proximity", c.occupancy.proximity},
          {"model_order", c.model_order},
          {"smoothing", c.model_smoothing},
          {"max_attempts", c.max_attempts},
          {"overlap_tolerance", c.overlap_tolerance}}},
        {"metrics",
         {{"collision_tolerance", c.collision_tolerance},
          {"contact_threshold", c.contact_threshold},
          {"cell_size", c.metric_sdf.cell_size},
          {"padding", c.metric_sdf.padding}}},
    };
}

/// Fields present in `j` override those of `base`.
inline PipelineConfig config_from_json(const json& j, PipelineConfig c = {}) {
    try {
        auto path = [&](const char* key, std::filesystem::path& p) {
            if (j.contains(key)) p = j.at(key).get<std::string>();
        };
        path("motion", c.motion);
        path("contacts", c.contacts);
        path("assets", c.assets);
        path("corpus", c.corpus);
        path("out_dir", c.out_dir);
        c.seed = j.value("seed", c.seed);
        if (j.contains("diversity")) c.diversity = diversity_from_string(j.at("diversity").get<std::string>());
        c.floor_category = j.value("floor_category", c.floor_category);
        if (j.contains("vote")) {
            c.vote_eps = j["vote"].value("eps", c.vote_eps);
            c.vote_min_pts = j["vote"].value("min_pts", c.vote_min_pts);
        }
        if (j.contains("instances")) {
            c.instance_min_pts = j["instances"].value("min_pts", c.instance_min_pts);
            c.downsample_voxel = j["instances"].value("downsample_voxel", c.downsample_voxel);
        }
        c.asset.density = j.value("asset_density", c.asset.density);
        c.asset.seed = j.value("asset_seed", c.asset.seed);
        if (j.contains("loss")) c.loss = loss_from_json(j.at("loss"), c.loss);
        if (j.contains("loss_per_class"))
            for (const auto& [name, w] : j.at("loss_per_class").items()) c.loss_per_class[name] = loss_from_json(w, c.loss);
        if (j.contains("grid")) {
            const auto& g = j.at("grid");
            c.grid.margin = g.value("margin", c.grid.margin);
            c.grid.step = g.value("step", c.grid.step);
            c.grid.yaw_count = g.value("yaw_count", c.grid.yaw_count);
        }
        if (j.contains("refine")) {
            const auto& r = j.at("refine");
            c.refine.initial_step = r.value("initial_step", c.refine.initial_step);
            c.refine.initial_yaw_step = r.value("initial_yaw_step", c.refine.initial_yaw_step);
            c.refine.tolerance = r.value("tolerance", c.refine.tolerance);
            c.refine.max_iters = r.value("max_iters", c.refine.max_iters);
        }
        if (j.contains("human_sdf")) {
            const auto& h = j.at("human_sdf");
            c.human_sdf.frame_step = h.value("frame_step", c.human_sdf.frame_step);
            c.human_sdf.vertex_radius = h.value("vertex_radius", c.human_sdf.vertex_radius);
            c.human_sdf.grid.cell_size = h.value("cell_size", c.human_sdf.grid.cell_size);
            c.human_sdf.grid.padding = h.value("padding", c.human_sdf.grid.padding);
        }
        if (j.contains("completion")) {
            const auto& k = j.at("completion");
            c.n_objects = k.value("n_objects", c.n_objects);
            c.occupancy.cell_size = k.value("cell_size", c.occupancy.cell_size);
            c.occupancy.proximity = k.value("proximity", c.occupancy.proximity);
            c.model_order = k.value("model_order", c.model_order);
            c.model_smoothing = k.value("smoothing", c.model_smoothing);
            c.max_attempts = k.value("max_attempts", c.max_attempts);
            c.overlap_tolerance = k.value("overlap_tolerance", c.overlap_tolerance);
        }
        if (j.contains("metrics")) {
            const auto& m = j.at("metrics");
            c.collision_tolerance = m.value("collision_tolerance", c.collision_tolerance);
            c.contact_threshold = m.value("contact_threshold", c.contact_threshold);
            c.metric_sdf.cell_size = m.value("cell_size", c.metric_sdf.cell_size);
            c.metric_sdf.padding = m.value("padding", c.metric_sdf.padding);
        }
    } catch (const json::exception& e) {
        throw Error(std::string("config: ") + e.what());
    }
    return c;
}

inline std::string config_hash(const PipelineConfig& c) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a64(to_json(c).dump())));
    return buf;
}

/// Inputs held in memory; the pure core of the pipeline works on these.
struct SynthesisInputs {
    MotionSequence motion;
    ContactSequence contacts;
    AssetLibrary library;
    std::vector<std::vector<std::string>> corpus;
};

struct SynthesisResult {
    SceneLayout layout;
    MetricReport metrics;
    std::vector<ContactInstance> instances;
    std::vector<PlacementCandidate> candidates;  // every candidate scored during placement
    std::vector<std::string> warnings;
};

namespace detail {

template <typename F>
auto stage(const char* name, F&& f) -> decltype(f()) {
    try {
        return f();
    } catch (const Error& e) {
        throw Error(std::string("stage '") + name + "': " + e.what());
    }
}

}  // namespace detail

inline SynthesisResult synthesize(const SynthesisInputs& in, const PipelineConfig& cfg) {
    const auto& cats = in.library.categories();
    if (!(in.contacts.categories == cats))
        throw Error("contact file categories do not match the asset manifest categories");
    check_shapes(in.motion, in.contacts);
    const bool sampling = cfg.diversity == DiversityMode::sampled;
    const int floor_class = cats.find(cfg.floor_category).value_or(-1);

    SynthesisResult out;
    const auto all_points = detail::stage("accumulate", [&] {
        return accumulate(in.motion, in.contacts, sampling ? LabelMode::sample : LabelMode::argmax,
                          derive_seed(cfg.seed, "accumulate"));
    });
    const auto object_points = all_points.filter([&](int c) { return c != floor_class; });
    const auto voted = detail::stage("majority_vote", [&] {
        return majority_vote(object_points, cfg.vote_eps, cfg.vote_min_pts);
    });
    out.instances = detail::stage("instances", [&] {
        return instances(voted, in.library, cfg.instance_min_pts, cfg.downsample_voxel);
    });

    out.layout.floor_height = detail::stage("floor", [&] {
        if (floor_class >= 0) {
            try {
                return estimate_floor_height(in.motion, in.contacts, floor_class);
            } catch (const Error&) {
            }
        }
        out.warnings.push_back("no floor contacts; floor set to the lowest body vertex");
        double z = std::numeric_limits<double>::infinity();
        for (std::size_t i = 2; i < in.motion.positions.size(); i += 3)
            z = std::min(z, static_cast<double>(in.motion.positions[i]));
        return z;
    });

    const SdfGrid human = detail::stage("human_sdf", [&] { return build_human_sdf(in.motion, cfg.human_sdf); });

    LossParams params{cfg.loss, {}};
    for (const auto& [name, w] : cfg.loss_per_class) params.per_class[cats.id(name)] = w;

    detail::stage("placement", [&] {
        for (std::size_t i = 0; i < out.instances.size(); ++i) {
            ContactInstance inst = out.instances[i];
            if (sampling) {
                std::vector<double> mass = inst.mass;
                for (std::size_t c = 0; c < mass.size(); ++c)
                    if (in.library.count(static_cast<int>(c)) == 0) mass[c] = 0.0;
                const auto stream = derive_seed(cfg.seed, "instance_class:" + std::to_string(i));
                inst.class_id = sample_instance_class(mass, stream);
            }
            const auto mode = cfg.diversity == DiversityMode::best ? PlacementMode::best : PlacementMode::diverse;
            auto cands = place_instance(inst, in.library, human, mode, params, cfg.grid, out.layout.floor_height,
                                        cfg.refine);
            std::size_t pick = 0;
            if (cfg.diversity != DiversityMode::best) {
                Rng rng(derive_seed(cfg.seed, "placement_choice:" + std::to_string(i)));
                pick = rng.index(cands.size());
            }
            out.layout.objects.push_back(
                {cands[pick].asset_id, cats.name(inst.class_id), cands[pick].transform, true});
            out.candidates.insert(out.candidates.end(), cands.begin(), cands.end());
        }
        return 0;
    });

    if (cfg.n_objects > 0) {
        detail::stage("completion", [&] {
            const auto model = train_category_model(in.corpus, cats.names(), cfg.model_order, cfg.model_smoothing);
            CompletionOptions opt;
            opt.occupancy = cfg.occupancy;
            opt.weights = {0.0, cfg.loss.lambda_pen, cfg.loss.pen_threshold};
            opt.refine = cfg.refine;
            opt.max_attempts = cfg.max_attempts;
            opt.overlap_tolerance = cfg.overlap_tolerance;
            opt.floor_class = floor_class;
            auto done = complete_scene(out.layout, model, in.library, in.motion, in.contacts, human, cfg.n_objects,
                                       derive_seed(cfg.seed, "completion"), opt);
            out.layout = std::move(done.layout);
            out.warnings.insert(out.warnings.end(), done.warnings.begin(), done.warnings.end());
            return 0;
        });
    }

    detail::stage("metrics", [&] {
        out.metrics.non_collision =
            non_collision_score(in.motion, out.layout, in.library, cfg.collision_tolerance, cfg.metric_sdf);
        const bool any_contact = std::any_of(out.layout.objects.begin(), out.layout.objects.end(),
                                             [](const auto& o) { return o.in_contact; });
        if (any_contact) {
            out.metrics.contact =
                contact_score(in.motion, out.layout, in.library, cfg.contact_threshold, cfg.metric_sdf);
        } else {
            out.metrics.contact = 0.0;
            out.warnings.push_back("no contact instances recovered; contact score reported as 0");
        }
        if (!voted.empty()) out.metrics.consistency = consistency_score(voted, cfg.vote_eps);
        return 0;
    });
    return out;
}

inline SynthesisInputs load_inputs(const PipelineConfig& cfg) {
    for (const auto* p : {&cfg.motion, &cfg.contacts, &cfg.assets})
        if (!std::filesystem::exists(*p)) throw Error("missing input file: " + p->string());
    SynthesisInputs in{load_motion(cfg.motion), load_contacts(cfg.contacts), load_library(cfg.assets, cfg.asset), {}};
    if (cfg.n_objects > 0) {
        if (!std::filesystem::exists(cfg.corpus)) throw Error("missing category corpus: " + cfg.corpus.string());
        in.corpus = load_corpus(cfg.corpus);
    }
    return in;
}

inline void write_outputs(const std::filesystem::path& dir, const PipelineConfig& cfg, const SynthesisResult& r) {
    std::filesystem::create_directories(dir);
    save_layout(dir / "layout.json", r.layout);
    save_metrics(dir / "metrics.json", r.metrics);
    save_json(dir / "run_manifest.json", {{"config_hash", config_hash(cfg)},
                                          {"seed", cfg.seed},
                                          {"version", kVersion},
                                          {"config", to_json(cfg)},
                                          {"warnings", r.warnings}});
}

/// Loads inputs, synthesizes, and writes layout.json, metrics.json and
/// run_manifest.json into cfg.out_dir (when set).
inline SynthesisResult run_synthesis(const PipelineConfig& cfg) {
    const auto in = load_inputs(cfg);
    auto r = synthesize(in, cfg);
    if (!cfg.out_dir.empty()) write_outputs(cfg.out_dir, cfg, r);
    return r;
}

/// k sampled runs with seeds seed, seed+1, ...; run i writes into
/// out_dir/diverse_<i>/.
inline std::vector<SynthesisResult> synthesize_diverse(const SynthesisInputs& in, const PipelineConfig& cfg,
                                                       std::size_t k) {
    if (k < 1) throw Error("run_diverse: k must be >= 1");
    std::vector<SynthesisResult> out;
    for (std::size_t i = 0; i < k; ++i) {
        PipelineConfig run = cfg;
        run.seed = cfg.seed + i;
        run.diversity = DiversityMode::sampled;
        out.push_back(synthesize(in, run));
    }
    return out;
}

inline std::vector<SynthesisResult> run_diverse(const PipelineConfig& cfg, std::size_t k) {
    const auto in = load_inputs(cfg);
    auto out = synthesize_diverse(in, cfg, k);
    if (!cfg.out_dir.empty())
        for (std::size_t i = 0; i < out.size(); ++i) {
            PipelineConfig run = cfg;
            run.seed = cfg.seed + i;
            run.diversity = DiversityMode::sampled;
            char name[32];
            std::snprintf(name, sizeof name, "diverse_%03zu", i);
            write_outputs(cfg.out_dir / name, run, out[i]);
        }
    return out;
}

/// Ground-truth contact file from an annotated scene.
inline ContactSequence run_label(const std::filesystem::path& motion_path, const std::filesystem::path& scene_path,
                                 double threshold, const std::filesystem::path& out_path,
                                 const SdfOptions& sdf = {}) {
    const auto motion = load_motion(motion_path);
    const auto scene = load_scene(scene_path);
    auto labels = label_from_scene(motion, scene.components, scene.categories, threshold, sdf);
    if (!out_path.empty()) save_contacts(out_path, labels);
    return labels;
}

}  // namespace summon
