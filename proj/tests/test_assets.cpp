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

#include "support/fixtures.hpp"

#include <gtest/gtest.h>

namespace summon {
namespace {

namespace fs = std::filesystem;

class Manifest : public ::testing::Test {
protected:
    void SetUp() override {
        dir_ = fixtures::scratch_dir("assets");
        fs::create_directories(dir_ / "m");
        save_mesh(dir_ / "m" / "c1.obj", make_box({0, 0, 0}, {0.5, 0.5, 0.9}));
        save_mesh(dir_ / "m" / "c2.obj", make_box({0, 0, 0}, {0.6, 0.55, 1.0}));
        save_mesh(dir_ / "m" / "c3.obj", make_box({0, 0, 0}, {0.45, 0.7, 0.8}));
        save_mesh(dir_ / "m" / "bed.obj", make_box({0, 0, 0}, {2.0, 1.6, 0.5}));
    }
    void TearDown() override { fs::remove_all(dir_); }

    fs::path write(const std::vector<json>& assets) {
        const auto p = dir_ / "assets.json";
        save_json(p, {{"categories", {"chair", "bed", "sofa"}}, {"assets", assets}});
        return p;
    }
    static json entry(const std::string& id, const std::string& cls, const std::string& file) {
        return {{"id", id}, {"class", cls}, {"path", "m/" + file}};
    }

    fs::path dir_;
};

TEST_F(Manifest, ThreeChairsOneBed) {
    const auto lib = load_library(write({entry("c1", "chair", "c1.obj"), entry("bed", "bed", "bed.obj"),
                                         entry("c2", "chair", "c2.obj"), entry("c3", "chair", "c3.obj")}));
    EXPECT_EQ(lib.count(0), 3u);
    EXPECT_EQ(lib.count(1), 1u);
    EXPECT_EQ(lib.count(2), 0u);
    const auto chairs = candidates(lib, 0);
    ASSERT_EQ(chairs.size(), 3u);
    EXPECT_EQ(chairs[0]->id, "c1");
    EXPECT_EQ(chairs[1]->id, "c2");
    EXPECT_EQ(chairs[2]->id, "c3");
    EXPECT_EQ(candidates(lib, 1).size(), 1u);
    EXPECT_THROW(candidates(lib, 2), Error);
    EXPECT_THROW(candidates(lib, 7), Error);
}

TEST_F(Manifest, UnknownClass) {
    try {
        load_library(write({entry("x", "spaceship", "c1.obj")}));
        FAIL();
    } catch (const Error& e) {
        EXPECT_NE(std::string(e.what()).find("spaceship"), std::string::npos);
    }
}

TEST_F(Manifest, DuplicateId) {
    try {
        load_library(write({entry("dup", "chair", "c1.obj"), entry("dup", "chair", "c2.obj")}));
        FAIL();
    } catch (const Error& e) {
        EXPECT_NE(std::string(e.what()).find("'dup'"), std::string::npos);
    }
}

TEST_F(Manifest, UnreadableMesh) {
    EXPECT_THROW(load_library(write({entry("x", "chair", "missing.obj")})), Error);
    EXPECT_THROW(load_library(dir_ / "nope.json"), Error);
}

TEST_F(Manifest, AlignMatrixIsApplied) {
    // Swap y and z: a mesh modeled y-up becomes z-up.
    json e = entry("c2", "chair", "c2.obj");
    e["align"] = {1, 0, 0, 0, 0, 0, 1, 0, 0, 1, 0, 0, 0, 0, 0, 1};
    const auto lib = load_library(write({e}));
    const auto& a = lib.get("c2");
    EXPECT_NEAR(a.extents.y(), 1.0, 1e-12);
    EXPECT_NEAR(a.extents.z(), 0.55, 1e-12);
    e["align"] = {1, 0, 0};
    EXPECT_THROW(load_library(write({e})), Error);
}

TEST_F(Manifest, LoadingIsReproducible) {
    const auto p = write({entry("c1", "chair", "c1.obj"), entry("bed", "bed", "bed.obj")});
    const auto a = load_library(p), b = load_library(p);
    EXPECT_EQ(a.get("bed").cloud.points, b.get("bed").cloud.points);
    EXPECT_NE(a.get("bed").cloud.points, load_library(p, {500.0, 1}).get("bed").cloud.points);
}

TEST(ObjectAsset, Invariants) {
    const auto mesh = fixtures::seat_mesh(fixtures::kChairA);
    const auto a = ObjectAsset::make("chair_a", 0, mesh, {200.0, 3});
    EXPECT_EQ(a.extents, mesh.bounds().extents());
    EXPECT_EQ(a.pivot, mesh.bounds().center());
    EXPECT_EQ(a.cloud.points.size(), point_count_for(a.extents, 200.0));
    const TriangleSet tris(std::span<const TriMesh>(&a.mesh, 1));
    for (const auto& p : a.cloud.points) EXPECT_LT(tris.distance(p), 1e-12);
    EXPECT_THROW(ObjectAsset::make("empty", 0, TriMesh{}), Error);
}

TEST(ObjectAsset, PlacedGeometryMovesTogether) {
    const auto a = ObjectAsset::make("t", 0, make_box({-0.6, -0.4, 0}, {0.6, 0.4, 0.75}));
    const PlanarTransform xf(Vec3(2, 1, 0), 0.7);
    const auto mesh = a.placed_mesh(xf);
    const TriangleSet tris(std::span<const TriMesh>(&mesh, 1));
    for (const auto& p : a.placed_cloud(xf)) EXPECT_LT(tris.distance(p), 1e-12);
}

TEST(Library, AddRejectsBadAssets) {
    AssetLibrary lib(CategorySet({"chair"}));
    lib.add(ObjectAsset::make("a", 0, make_box({0, 0, 0}, {1, 1, 1})));
    EXPECT_THROW(lib.add(ObjectAsset::make("a", 0, make_box({0, 0, 0}, {1, 1, 1}))), Error);
    EXPECT_THROW(lib.add(ObjectAsset::make("b", 1, make_box({0, 0, 0}, {1, 1, 1}))), Error);
    EXPECT_THROW(lib.get("zzz"), Error);
    EXPECT_EQ(lib.find("zzz"), nullptr);
}

// ---------------------------------------------------------------------------
// Clustering radius

AssetLibrary boxes(const std::vector<Vec3>& extents, int cls = 0) {
    AssetLibrary lib(CategorySet({"chair", "bed"}));
    for (std::size_t i = 0; i < extents.size(); ++i)
        lib.add(ObjectAsset::make("a" + std::to_string(i), cls, make_box(Vec3::Zero(), extents[i]), {50.0, 0}));
    return lib;
}

TEST(ClassEpsilon, Examples) {
    EXPECT_DOUBLE_EQ(class_epsilon(boxes({{0.5, 0.5, 0.9}, {0.6, 0.55, 1.0}}), 0), 0.5);
    EXPECT_DOUBLE_EQ(class_epsilon(boxes({{2.0, 1.6, 0.5}}, 1), 1), 0.5);
    EXPECT_DOUBLE_EQ(class_epsilon(boxes({{0.01, 1.0, 1.0}}), 0), 0.05);
    EXPECT_THROW(class_epsilon(boxes({{1, 1, 1}}), 1), Error);
}

TEST(ClassEpsilon, MonotoneUnderAddition) {
    Rng rng(3);
    std::vector<Vec3> ext;
    double prev = std::numeric_limits<double>::infinity();
    for (int i = 0; i < 15; ++i) {
        ext.emplace_back(rng.uniform(0.06, 2), rng.uniform(0.06, 2), rng.uniform(0.06, 2));
        const double eps = class_epsilon(boxes(ext), 0);
        EXPECT_LE(eps, prev);
        prev = eps;
    }
}

TEST(ClassEpsilon, FixtureLibrary) {
    const auto lib = fixtures::library();
    const auto& c = lib.categories();
    EXPECT_DOUBLE_EQ(class_epsilon(lib, c.id("chair")), 0.45);
    EXPECT_DOUBLE_EQ(class_epsilon(lib, c.id("bed")), 0.5);
    EXPECT_DOUBLE_EQ(class_epsilon(lib, c.id("sofa")), 0.85);
}

}  // namespace
}  // namespace summon
