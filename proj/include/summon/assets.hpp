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

#include "summon/contact.hpp"

#include <nlohmann/json.hpp>

#include <set>

namespace summon {

struct AssetOptions {
    double density = 500.0;  // surface samples per m^2 of bounding-box area
    std::uint64_t seed = 0;
};

/// A furniture mesh in its canonical frame: up is +z and yaw zero faces +x.
struct ObjectAsset {
    std::string id;
    int class_id = 0;
    TriMesh mesh;
    Vec3 extents = Vec3::Zero();
    Vec3 pivot = Vec3::Zero();  // mesh AABB center; every transform rotates about it
    double min_z = 0.0;
    PointCloud cloud;

    static ObjectAsset make(std::string id, int class_id, TriMesh mesh, const AssetOptions& opt = {}) {
        mesh.validate();
        if (mesh.faces.empty()) throw Error("asset '" + id + "' has no faces");
        ObjectAsset a;
        a.id = std::move(id);
        a.class_id = class_id;
        const Aabb box = mesh.bounds();
        a.extents = box.extents();
        a.pivot = box.center();
        a.min_z = box.lo.z();
        const std::size_t n = point_count_for(a.extents, opt.density);
        a.cloud = sample_surface(mesh, n, opt.seed ^ fnv1a64(a.id));
        a.mesh = std::move(mesh);
        return a;
    }

    TriMesh placed_mesh(const PlanarTransform& xf) const { return apply(xf, mesh, pivot); }
    std::vector<Vec3> placed_cloud(const PlanarTransform& xf) const {
        return apply(xf, cloud.points, pivot);
    }
    Aabb placed_bounds(const PlanarTransform& xf) const { return placed_mesh(xf).bounds(); }
};

class AssetLibrary {
public:
    AssetLibrary() = default;
    explicit AssetLibrary(CategorySet categories)
        : categories_(std::move(categories)), by_class_(categories_.size()) {}

    const CategorySet& categories() const { return categories_; }
    std::span<const ObjectAsset> assets() const { return assets_; }

    void add(ObjectAsset asset) {
        if (asset.class_id < 0 || static_cast<std::size_t>(asset.class_id) >= categories_.size())
            throw Error("asset '" + asset.id + "' has a class outside the category set");
        if (find(asset.id)) throw Error("duplicate asset id '" + asset.id + "'");
        by_class_[asset.class_id].push_back(assets_.size());
        index_.emplace(asset.id, assets_.size());
        assets_.push_back(std::move(asset));
    }

    const ObjectAsset* find(const std::string& id) const {
        auto it = index_.find(id);
        return it == index_.end() ? nullptr : &assets_[it->second];
    }

    const ObjectAsset& get(const std::string& id) const {
        if (const auto* a = find(id)) return *a;
        throw Error("unknown asset id '" + id + "'");
    }

    std::size_t count(int class_id) const {
        if (class_id < 0 || static_cast<std::size_t>(class_id) >= by_class_.size()) return 0;
        return by_class_[class_id].size();
    }

    /// All assets of a class, in manifest order.
    std::vector<const ObjectAsset*> candidates(int class_id) const {
        if (count(class_id) == 0)
            throw Error("no assets for class " +
                        (class_id >= 0 && static_cast<std::size_t>(class_id) < categories_.size()
                             ? "'" + categories_.name(class_id) + "'"
                             : std::to_string(class_id)));
        std::vector<const ObjectAsset*> out;
        for (auto i : by_class_[class_id]) out.push_back(&assets_[i]);
        return out;
    }

private:
    CategorySet categories_;
    std::vector<ObjectAsset> assets_;
    std::vector<std::vector<std::size_t>> by_class_;
    std::unordered_map<std::string, std::size_t> index_;
};

inline std::vector<const ObjectAsset*> candidates(const AssetLibrary& library, int class_id) {
    return library.candidates(class_id);
}

inline constexpr double kMinClassEpsilon = 0.05;

/// Clustering radius for a class: the shortest bounding-box edge among its
/// assets, clamped below at 5 cm.
inline double class_epsilon(const AssetLibrary& library, int class_id) {
    double eps = std::numeric_limits<double>::infinity();
    for (const auto* a : library.candidates(class_id)) eps = std::min(eps, a->extents.minCoeff());
    return std::max(eps, kMinClassEpsilon);
}

/// Reads a JSON manifest
///   {"categories": [...], "assets": [{"id", "class", "path", "align"?}]}
/// Mesh paths are relative to the manifest. `align` is a row-major 4x4
/// matrix applied to vertices on load.
inline AssetLibrary load_library(const std::filesystem::path& manifest, const AssetOptions& opt = {}) {
    std::ifstream in(manifest);
    if (!in) throw Error("cannot open asset manifest: " + manifest.string());
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw Error(manifest.string() + ": " + e.what());
    }
    try {
        AssetLibrary lib(CategorySet(j.at("categories").get<std::vector<std::string>>()));
        const auto base = manifest.parent_path();
        for (const auto& entry : j.at("assets")) {
            const auto id = entry.at("id").get<std::string>();
            const auto cls_name = entry.at("class").get<std::string>();
            const auto cls = lib.categories().find(cls_name);
            if (!cls) throw Error("asset '" + id + "': unknown class '" + cls_name + "'");
            if (lib.find(id)) throw Error("duplicate asset id '" + id + "'");
            TriMesh mesh;
            try {
                mesh = load_mesh(base / entry.at("path").get<std::string>());
            } catch (const Error& e) {
                throw Error("asset '" + id + "': " + e.what());
            }
            if (entry.contains("align")) {
                const auto m = entry.at("align").get<std::vector<double>>();
                if (m.size() != 16) throw Error("asset '" + id + "': align must have 16 entries");
                Eigen::Matrix4d A;
                for (int r = 0; r < 4; ++r)
                    for (int c = 0; c < 4; ++c) A(r, c) = m[r * 4 + c];
                for (auto& v : mesh.vertices) {
                    const Eigen::Vector4d h = A * v.homogeneous();
                    v = h.head<3>() / h.w();
                }
            }
            lib.add(ObjectAsset::make(id, *cls, std::move(mesh), opt));
        }
        return lib;
    } catch (const nlohmann::json::exception& e) {
        throw Error(manifest.string() + ": " + e.what());
    }
}

}  // namespace summon
