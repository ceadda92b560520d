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

// summon: command-line front end.
//
//   summon label    --motion m.bin --scene scene.json --out contacts.bin
//   summon synth    --motion m.bin --contacts c.bin --assets assets.json --out dir [--seed n]
//                   [--corpus k.jsonl --n-objects m] [--diverse k] [--config cfg.json]
//   summon diverse  (synth flags) -k 20
//   summon complete --layout l.json (synth flags) --n-objects m
//   summon eval     --motion m.bin --layout l.json --assets assets.json [--contacts c.bin]
//                   [--pred p.bin --gt g.bin] [--out metrics.json]

#include "summon/summon.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>

namespace {

using namespace summon;
namespace fs = std::filesystem;

struct Flags {
    std::string motion, contacts, assets, corpus, out, config, mode = "best", floor = "floor";
    std::uint64_t seed = 0;
    std::size_t n_objects = 0, diverse = 0;
    double lambda_contact = 1.0, lambda_pen = 10.0, pen_threshold = 0.02;
    double grid_margin = 0.5, grid_step = 0.1;
    int yaw_count = 16;
    std::size_t max_iters = 200;
    double cell_size = 0.25;
};

void add_synth_flags(CLI::App* app, Flags& f, bool need_contacts = true) {
    app->add_option("--motion", f.motion, "motion file")->required();
    auto* c = app->add_option("--contacts", f.contacts, "contact probability file");
    if (need_contacts) c->required();
    app->add_option("--assets", f.assets, "asset manifest")->required();
    app->add_option("--corpus", f.corpus, "category corpus (JSON lines)");
    app->add_option("--out", f.out, "output directory");
    app->add_option("--seed", f.seed, "master seed");
    app->add_option("--n-objects", f.n_objects, "non-contact objects to add");
    app->add_option("--mode", f.mode, "best | diverse | sampled")->check(CLI::IsMember({"best", "diverse", "sampled"}));
    app->add_option("--floor", f.floor, "floor category name");
    app->add_option("--lambda-contact", f.lambda_contact);
    app->add_option("--lambda-pen", f.lambda_pen);
    app->add_option("--pen-threshold", f.pen_threshold);
    app->add_option("--grid-margin", f.grid_margin);
    app->add_option("--grid-step", f.grid_step);
    app->add_option("--yaw-count", f.yaw_count);
    app->add_option("--max-iters", f.max_iters, "refinement iteration budget");
    app->add_option("--cell-size", f.cell_size, "completion occupancy cell size");
    app->add_option("--config", f.config, "JSON config; its fields override flags")->check(CLI::ExistingFile);
}

PipelineConfig to_config(const Flags& f) {
    PipelineConfig c;
    c.motion = f.motion;
    c.contacts = f.contacts;
    c.assets = f.assets;
    c.corpus = f.corpus;
    c.out_dir = f.out;
    c.seed = f.seed;
    c.n_objects = f.n_objects;
    c.diversity = diversity_from_string(f.mode);
    c.floor_category = f.floor;
    c.loss = {f.lambda_contact, f.lambda_pen, f.pen_threshold};
    c.grid = {f.grid_margin, f.grid_step, f.yaw_count};
    c.refine.max_iters = f.max_iters;
    c.occupancy.cell_size = f.cell_size;
    if (!f.config.empty()) c = config_from_json(load_json(f.config), c);
    return c;
}

json summary(const SynthesisResult& r) {
    return {{"objects", r.layout.objects.size()},
            {"instances", r.instances.size()},
            {"metrics", to_json(r.metrics)},
            {"warnings", r.warnings}};
}

int cmd_synth(const Flags& f) {
    const auto cfg = to_config(f);
    if (f.diverse > 0) {
        json all = json::array();
        for (const auto& r : run_diverse(cfg, f.diverse)) all.push_back(summary(r));
        std::cout << all.dump(2) << "\n";
    } else {
        std::cout << summary(run_synthesis(cfg)).dump(2) << "\n";
    }
    return 0;
}

int cmd_complete(const Flags& f, const std::string& layout_path) {
    const auto cfg = to_config(f);
    if (cfg.n_objects == 0) throw Error("complete: --n-objects must be >= 1");
    const auto in = load_inputs(cfg);
    const auto& cats = in.library.categories();
    const int floor_class = cats.find(cfg.floor_category).value_or(-1);
    const auto model = train_category_model(in.corpus, cats.names(), cfg.model_order, cfg.model_smoothing);
    CompletionOptions opt;
    opt.occupancy = cfg.occupancy;
    opt.weights = {0.0, cfg.loss.lambda_pen, cfg.loss.pen_threshold};
    opt.refine = cfg.refine;
    opt.max_attempts = cfg.max_attempts;
    opt.overlap_tolerance = cfg.overlap_tolerance;
    opt.floor_class = floor_class;
    const auto human = build_human_sdf(in.motion, cfg.human_sdf);
    const auto done = complete_scene(load_layout(layout_path), model, in.library, in.motion, in.contacts, human,
                                     cfg.n_objects, derive_seed(cfg.seed, "completion"), opt);
    for (const auto& w : done.warnings) std::cerr << "warning: " << w << "\n";
    if (cfg.out_dir.empty()) {
        std::cout << to_json(done.layout).dump(2) << "\n";
    } else {
        fs::create_directories(cfg.out_dir);
        save_layout(cfg.out_dir / "layout.json", done.layout);
    }
    return 0;
}

struct EvalFlags {
    std::string motion, layout, assets, contacts, pred, gt, out;
};

int cmd_eval(const EvalFlags& e) {
    const auto motion = load_motion(e.motion);
    const auto layout = load_layout(e.layout);
    const auto lib = load_library(e.assets);
    MetricReport r;
    r.non_collision = non_collision_score(motion, layout, lib);
    r.contact = contact_score(motion, layout, lib);
    if (!e.contacts.empty()) {
        const auto contacts = load_contacts(e.contacts);
        check_shapes(motion, contacts);
        const int floor = contacts.categories.find("floor").value_or(-1);
        const auto voted = majority_vote(accumulate(motion, contacts).filter([&](int c) { return c != floor; }));
        if (!voted.empty()) r.consistency = consistency_score(voted);
    }
    if (!e.pred.empty() || !e.gt.empty()) {
        if (e.pred.empty() || e.gt.empty()) throw Error("eval: --pred and --gt go together");
        r.reconstruction_accuracy = reconstruction_accuracy(load_contacts(e.pred), load_contacts(e.gt));
    }
    if (e.out.empty())
        std::cout << to_json(r).dump(2) << "\n";
    else
        save_metrics(e.out, r);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Scene synthesis from human motion and contact semantics"};
    app.require_subcommand(1);

    std::string label_motion, label_scene, label_out;
    double threshold = 0.05;
    auto* label = app.add_subcommand("label", "write one-hot contact labels from an annotated scene");
    label->add_option("--motion", label_motion)->required()->check(CLI::ExistingFile);
    label->add_option("--scene", label_scene, "scene manifest")->required()->check(CLI::ExistingFile);
    label->add_option("--threshold", threshold, "contact distance (m)")->check(CLI::PositiveNumber);
    label->add_option("--out", label_out)->required();

    Flags synth_f, diverse_f, complete_f;
    auto* synth = app.add_subcommand("synth", "place contact objects and optionally complete the scene");
    add_synth_flags(synth, synth_f);
    synth->add_option("--diverse", synth_f.diverse, "run k sampled syntheses instead of one");

    auto* diverse = app.add_subcommand("diverse", "k sampled syntheses with seeds seed..seed+k-1");
    add_synth_flags(diverse, diverse_f);
    diverse->add_option("-k", diverse_f.diverse)->required()->check(CLI::PositiveNumber);

    std::string complete_layout;
    auto* complete = app.add_subcommand("complete", "add non-contact objects to an existing layout");
    add_synth_flags(complete, complete_f);
    complete->add_option("--layout", complete_layout)->required()->check(CLI::ExistingFile);

    EvalFlags eval_f;
    auto* eval = app.add_subcommand("eval", "score a layout against a motion");
    eval->add_option("--motion", eval_f.motion)->required()->check(CLI::ExistingFile);
    eval->add_option("--layout", eval_f.layout)->required()->check(CLI::ExistingFile);
    eval->add_option("--assets", eval_f.assets)->required()->check(CLI::ExistingFile);
    eval->add_option("--contacts", eval_f.contacts, "contacts for the consistency score");
    eval->add_option("--pred", eval_f.pred, "predicted contacts");
    eval->add_option("--gt", eval_f.gt, "ground-truth contacts");
    eval->add_option("--out", eval_f.out, "metrics file (stdout when omitted)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*label) {
            const auto c = run_label(label_motion, label_scene, threshold, label_out);
            std::cout << "wrote " << c.n_frames << " x " << c.n_vertices << " labels to " << label_out << "\n";
            return 0;
        }
        if (*synth) return cmd_synth(synth_f);
        if (*diverse) return cmd_synth(diverse_f);
        if (*complete) return cmd_complete(complete_f, complete_layout);
        if (*eval) return cmd_eval(eval_f);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
