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

// Synthetic scenes with known answers. Furniture is built from boxes in its
// canonical frame (base at z = 0, centered in xy, yaw zero facing +x). The
// body is three subdivided boxes (torso, thighs, lower legs) whose topology
// is fixed, so any pose is a valid frame of the same motion.

#include "summon/summon.hpp"

namespace summon::fixtures {

inline CategorySet categories() {
    return CategorySet({"chair", "sofa", "bed", "table", "cabinet", "shelf", "stool", "floor"});
}

struct SeatDims {
    double depth = 0.5;   // x
    double width = 0.6;   // y
    double seat_h = 0.45;
    double back_h = 0.9;
    double back_t = 0.08;
};

/// Block seat with a backrest along its -x edge.
inline TriMesh seat_mesh(const SeatDims& d) {
    const double hx = d.depth / 2, hy = d.width / 2;
    TriMesh m = make_box({-hx, -hy, 0.0}, {hx, hy, d.seat_h}, 2, 2, 2);
    m.append(make_box({-hx, -hy, d.seat_h}, {-hx + d.back_t, hy, d.back_h}, 1, 2, 2));
    return m;
}

inline TriMesh block_mesh(double dx, double dy, double dz) {
    return make_box({-dx / 2, -dy / 2, 0.0}, {dx / 2, dy / 2, dz}, 2, 2, 2);
}

inline const SeatDims kChairA{0.50, 0.60, 0.45, 0.90, 0.08};
inline const SeatDims kChairB{0.55, 0.50, 0.48, 0.95, 0.08};
inline const SeatDims kChairC{0.45, 0.45, 0.42, 0.85, 0.07};
inline const SeatDims kSofaA{0.90, 2.00, 0.42, 0.85, 0.20};
inline const Vec3 kBedA{2.0, 1.6, 0.5};

struct NamedMesh {
    std::string id;
    std::string category;
    TriMesh mesh;
};

inline std::vector<NamedMesh> furniture() {
    return {
        {"chair_a", "chair", seat_mesh(kChairA)},
        {"chair_b", "chair", seat_mesh(kChairB)},
        {"chair_c", "chair", seat_mesh(kChairC)},
        {"sofa_a", "sofa", seat_mesh(kSofaA)},
        {"bed_a", "bed", block_mesh(kBedA.x(), kBedA.y(), kBedA.z())},
        {"table_a", "table", block_mesh(1.2, 0.8, 0.75)},
        {"cabinet_a", "cabinet", block_mesh(0.5, 1.0, 0.9)},
        {"shelf_a", "shelf", block_mesh(0.35, 0.9, 1.8)},
        {"stool_a", "stool", block_mesh(0.4, 0.4, 0.45)},
    };
}

inline AssetLibrary library(const AssetOptions& opt = {}) {
    AssetLibrary lib(categories());
    for (auto& f : furniture()) lib.add(ObjectAsset::make(f.id, lib.categories().id(f.category), f.mesh, opt));
    return lib;
}

/// Writes the furniture meshes and a manifest into `dir`; returns the manifest path.
inline std::filesystem::path write_library(const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir / "meshes");
    json assets = json::array();
    for (const auto& f : furniture()) {
        save_mesh(dir / "meshes" / (f.id + ".obj"), f.mesh);
        assets.push_back({{"id", f.id}, {"class", f.category}, {"path", "meshes/" + f.id + ".obj"}});
    }
    const auto path = dir / "assets.json";
    save_json(path, {{"categories", categories().names()}, {"assets", assets}});
    return path;
}

inline std::vector<std::vector<std::string>> corpus() {
    std::vector<std::vector<std::string>> c;
    for (int i = 0; i < 5; ++i) {
        c.push_back({"chair", "table", "cabinet", "shelf"});
        c.push_back({"sofa", "table", "shelf", "cabinet"});
        c.push_back({"bed", "cabinet", "shelf"});
        c.push_back({"chair", "table", "stool", "shelf"});
    }
    return c;
}

// ---------------------------------------------------------------------------
// Body

/// Clearance between the resting body and the furniture: inside the contact
/// threshold, outside the penetration margin.
inline constexpr double kSeatGap = 0.03;

struct BodyPose {
    Aabb torso, thighs, legs;
};

inline TriMesh body_mesh(const BodyPose& pose) {
    TriMesh m = make_box(pose.torso.lo, pose.torso.hi, 5, 10, 15);
    m.append(make_box(pose.thighs.lo, pose.thighs.hi, 16, 9, 4));
    m.append(make_box(pose.legs.lo, pose.legs.hi, 3, 8, 11));
    return m;
}

/// Standing at the origin, facing +x.
inline BodyPose standing_pose() {
    return {{{-0.10, -0.20, 1.00}, {0.10, 0.20, 1.60}},
            {{-0.08, -0.18, 0.50}, {0.08, 0.18, 1.00}},
            {{-0.06, -0.15, 0.005}, {0.06, 0.15, 0.50}}};
}

/// Seated on a seat of dims `d` in the seat's canonical frame, back and
/// thighs `gap` away from the backrest and seat.
inline BodyPose sitting_pose(const SeatDims& d, double gap = kSeatGap) {
    const double back = -d.depth / 2 + d.back_t + gap;
    const double z0 = d.seat_h + gap;
    const double knee = d.depth / 2 + 0.20;
    return {{{back, -0.20, z0 + 0.15}, {back + 0.21, 0.20, z0 + 0.75}},
            {{back, -0.18, z0}, {knee, 0.18, z0 + 0.15}},
            {{knee - 0.12, -0.15, 0.005}, {knee, 0.15, z0}}};
}

/// Lying along x on top of a bed of extents `bed`, `gap` above it.
inline BodyPose lying_pose(const Vec3& bed, double gap = kSeatGap) {
    const double z0 = bed.z() + gap;
    return {{{-0.75, -0.20, z0}, {-0.15, 0.20, z0 + 0.22}},
            {{-0.15, -0.18, z0}, {0.30, 0.18, z0 + 0.16}},
            {{0.30, -0.15, z0}, {0.75, 0.15, z0 + 0.12}}};
}

inline std::vector<Vec3> posed(const BodyPose& pose, const PlanarTransform& xf, const Vec3& pivot) {
    return apply(xf, body_mesh(pose).vertices, pivot);
}

inline std::vector<Face> body_faces() { return body_mesh(standing_pose()).faces; }

// ---------------------------------------------------------------------------
// Planted scenes

/// Furniture pose given as the pivot position (x, y) and yaw.
struct Plant {
    std::string asset_id;
    double x = 0.0, y = 0.0, yaw = 0.0;
};

inline PlanarTransform plant_transform(const ObjectAsset& asset, const Plant& p) {
    return {Vec3(p.x - asset.pivot.x(), p.y - asset.pivot.y(), -asset.min_z), p.yaw};
}

/// Finer than the default grid so 5 cm labels are resolved cleanly.
inline const SdfOptions kLabelSdf{0.025, 0.075};

inline TriMesh floor_mesh() { return make_box({-4.0, -2.0, -0.1}, {3.0, 4.0, 0.0}); }

struct Scene {
    MotionSequence motion;
    ContactSequence contacts;  // ground truth from labeling against the planted scene
    SceneLayout truth;         // planted furniture
    std::vector<std::size_t> rest_frames;  // frames in contact with the furniture
};

/// Walks toward the planted object from 2.5 m in front of it, then takes
/// `rest_pose` (in the object's canonical frame) for `rest_frames` frames.
inline Scene planted_scene(const AssetLibrary& lib, const Plant& plant, const BodyPose& rest_pose,
                           std::size_t walk_frames = 8, std::size_t rest_frames = 6, double approach = 0.9) {
    const ObjectAsset& asset = lib.get(plant.asset_id);
    const PlanarTransform xf = plant_transform(asset, plant);
    const Vec3 front(std::cos(plant.yaw), std::sin(plant.yaw), 0.0);
    const Vec3 origin(plant.x, plant.y, 0.0);

    std::vector<std::vector<Vec3>> frames;
    for (std::size_t i = 0; i < walk_frames; ++i) {
        const double s = walk_frames == 1 ? 0.0 : static_cast<double>(i) / (walk_frames - 1);
        const Vec3 at = origin + front * (2.5 + (approach - 2.5) * s);
        // Facing the object while walking towards it.
        const PlanarTransform walk(at, plant.yaw + std::numbers::pi);
        frames.push_back(posed(standing_pose(), walk, Vec3::Zero()));
    }
    Scene scene;
    for (std::size_t i = 0; i < rest_frames; ++i) {
        // Sub-millimetre sway between frames.
        const double sway = 0.0008 * std::sin(1.3 * static_cast<double>(i));
        const PlanarTransform jitter(Vec3(sway, -sway, 0.0), 0.0);
        auto local = posed(rest_pose, jitter, Vec3::Zero());
        scene.rest_frames.push_back(frames.size());
        frames.push_back(apply(xf, local, asset.pivot - Vec3(0, 0, 0)));
    }
    scene.motion = MotionSequence::from_frames(frames, 30.0, body_faces());

    const auto& cats = lib.categories();
    std::vector<SceneComponent> components{{asset.placed_mesh(xf), asset.class_id},
                                           {floor_mesh(), cats.id("floor")}};
    scene.contacts = label_from_scene(scene.motion, components, cats, kContactThreshold, kLabelSdf);
    scene.truth.floor_height = 0.0;
    scene.truth.objects.push_back({asset.id, cats.name(asset.class_id), xf, true});
    return scene;
}

inline const Plant kSitPlant{"chair_a", 1.0, 0.5, std::numbers::pi / 2};
inline const Plant kLiePlant{"bed_a", -0.5, 1.0, std::numbers::pi};

inline Scene sitting_scene(const AssetLibrary& lib) { return planted_scene(lib, kSitPlant, sitting_pose(kChairA)); }
inline Scene lying_scene(const AssetLibrary& lib) {
    return planted_scene(lib, kLiePlant, lying_pose(kBedA), 8, 6, 1.6);
}

/// Copy of `contacts` where every vertex labeled `from` is split evenly
/// between `from` and `to`.
inline ContactSequence split_class(const ContactSequence& contacts, int from, int to) {
    ContactSequence out = contacts;
    for (std::size_t f = 0; f < out.n_frames; ++f)
        for (std::size_t v = 0; v < out.n_vertices; ++v)
            if (out.argmax(f, v) == from) {
                auto r = out.row(f, v);
                std::fill(r.begin(), r.end(), 0.0f);
                r[from] = 0.5f;
                r[to] = 0.5f;
            }
    return out;
}

/// Contact points from the rest frames only, labeled with the planted class.
inline ContactInstance rest_instance(const Scene& scene, int class_id) {
    ContactInstance inst;
    inst.class_id = class_id;
    inst.mass.assign(scene.contacts.categories.size(), 0.0);
    for (auto f : scene.rest_frames)
        for (std::size_t v = 0; v < scene.motion.n_vertices; ++v)
            if (scene.contacts.argmax(f, v) == class_id) inst.points.push_back(scene.motion.vertex(f, v));
    inst.mass[class_id] = static_cast<double>(inst.points.size());
    for (const auto& p : inst.points) inst.centroid += p;
    if (!inst.points.empty()) inst.centroid /= static_cast<double>(inst.points.size());
    return inst;
}

// ---------------------------------------------------------------------------
// On-disk fixture


struct SceneFiles {
    std::filesystem::path motion, scene, contacts, assets, corpus;
};

/// Writes the motion, the planted scene (furniture + floor) with its
/// manifest, the asset library and a corpus into `dir`, then produces the
/// contact file with run_label.
inline SceneFiles write_scene_files(const std::filesystem::path& dir, const AssetLibrary& lib,
                                    const Scene& scene) {
    std::filesystem::create_directories(dir / "scene");
    SceneFiles files;
    files.motion = dir / "motion.bin";
    save_motion(files.motion, scene.motion);

    json comps = json::array();
    for (std::size_t i = 0; i < scene.truth.objects.size(); ++i) {
        const auto& obj = scene.truth.objects[i];
        const std::string name = "object_" + std::to_string(i) + ".obj";
        save_mesh(dir / "scene" / name, lib.get(obj.asset_id).placed_mesh(obj.transform));
        comps.push_back({{"id", obj.asset_id}, {"class", obj.class_name}, {"path", name}});
    }
    save_mesh(dir / "scene" / "floor.obj", floor_mesh());
    comps.push_back({{"id", "floor"}, {"class", "floor"}, {"path", "floor.obj"}});
    files.scene = dir / "scene" / "scene.json";
    save_json(files.scene, {{"categories", lib.categories().names()}, {"assets", comps}});

    files.contacts = dir / "contacts.bin";
    run_label(files.motion, files.scene, kContactThreshold, files.contacts, kLabelSdf);
    files.assets = write_library(dir / "assets");
    files.corpus = dir / "corpus.jsonl";
    save_corpus(files.corpus, corpus());
    return files;
}

inline PipelineConfig config_for(const SceneFiles& files, const std::filesystem::path& out_dir,
                                 std::uint64_t seed = 0) {
    PipelineConfig cfg;
    cfg.motion = files.motion;
    cfg.contacts = files.contacts;
    cfg.assets = files.assets;
    cfg.corpus = files.corpus;
    cfg.out_dir = out_dir;
    cfg.seed = seed;
    return cfg;
}

/// Fresh empty directory under the system temp dir.
inline std::filesystem::path scratch_dir(const std::string& name) {
    const auto dir = std::filesystem::temp_directory_path() / ("summon_test_" + name);
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

}  // namespace summon::fixtures
