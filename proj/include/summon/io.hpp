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

// On-disk formats.
//
// Motion and contact files are a one-line JSON header terminated by '\n',
// followed by a raw little-endian float32 payload:
//
//   motion:   {"frame_rate", "n_frames", "n_vertices", "up_axis": "z", "faces"?}
//             payload [frame][vertex][xyz]
//   contacts: {"categories": [...], "n_frames", "n_vertices"}
//             payload [frame][vertex][C+1], void last
//
// Layouts, metric reports and configs are JSON documents; category corpora
// are JSON Lines with one array of category names per line.

#include "summon/metrics.hpp"

#include <nlohmann/json.hpp>

#include <bit>
#include <cstring>

namespace summon {

using json = nlohmann::json;

namespace detail {

inline void write_f32_le(std::ostream& out, std::span<const float> data) {
    if constexpr (std::endian::native == std::endian::little) {
        out.write(reinterpret_cast<const char*>(data.data()),
                  static_cast<std::streamsize>(data.size() * sizeof(float)));
    } else {
        for (float x : data) {
            auto u = std::bit_cast<std::uint32_t>(x);
            char b[4] = {char(u), char(u >> 8), char(u >> 16), char(u >> 24)};
            out.write(b, 4);
        }
    }
}

inline std::vector<float> read_f32_le(std::istream& in, std::size_t count, const std::string& what) {
    std::vector<float> out(count);
    std::vector<unsigned char> raw(count * 4);
    in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
    if (static_cast<std::size_t>(in.gcount()) != raw.size())
        throw Error(what + ": payload truncated (expected " + std::to_string(raw.size()) + " bytes, got " +
                    std::to_string(in.gcount()) + ")");
    if (in.peek() != std::char_traits<char>::eof()) throw Error(what + ": trailing bytes after payload");
    for (std::size_t i = 0; i < count; ++i) {
        const std::uint32_t u = std::uint32_t(raw[4 * i]) | std::uint32_t(raw[4 * i + 1]) << 8 |
                                std::uint32_t(raw[4 * i + 2]) << 16 | std::uint32_t(raw[4 * i + 3]) << 24;
        out[i] = std::bit_cast<float>(u);
    }
    return out;
}

inline json read_header(std::istream& in, const std::string& what) {
    std::string line;
    if (!std::getline(in, line)) throw Error(what + ": missing header");
    try {
        return json::parse(line);
    } catch (const json::exception& e) {
        throw Error(what + ": bad header: " + e.what());
    }
}

inline std::ifstream open_in(const std::filesystem::path& path, std::ios::openmode mode = std::ios::in) {
    std::ifstream in(path, mode);
    if (!in) throw Error("cannot open " + path.string());
    return in;
}

inline std::ofstream open_out(const std::filesystem::path& path, std::ios::openmode mode = std::ios::out) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, mode);
    if (!out) throw Error("cannot write " + path.string());
    return out;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Motion

inline void write_motion(std::ostream& out, const MotionSequence& m) {
    m.validate();
    json h = {{"n_frames", m.n_frames}, {"n_vertices", m.n_vertices}, {"frame_rate", m.frame_rate},
              {"up_axis", "z"}};
    if (!m.faces.empty()) h["faces"] = m.faces;
    out << h.dump() << '\n';
    detail::write_f32_le(out, m.positions);
}

inline MotionSequence read_motion(std::istream& in, const std::string& what = "motion") {
    const json h = detail::read_header(in, what);
    MotionSequence m;
    try {
        m.n_frames = h.at("n_frames").get<std::size_t>();
        m.n_vertices = h.at("n_vertices").get<std::size_t>();
        m.frame_rate = h.at("frame_rate").get<double>();
        if (h.value("up_axis", std::string("z")) != "z") throw Error(what + ": only up_axis \"z\" is supported");
        if (h.contains("faces")) m.faces = h.at("faces").get<std::vector<Face>>();
    } catch (const json::exception& e) {
        throw Error(what + ": " + e.what());
    }
    m.positions = detail::read_f32_le(in, m.n_frames * m.n_vertices * 3, what);
    m.validate();
    return m;
}

inline void save_motion(const std::filesystem::path& path, const MotionSequence& m) {
    auto out = detail::open_out(path, std::ios::binary);
    write_motion(out, m);
}

inline MotionSequence load_motion(const std::filesystem::path& path) {
    auto in = detail::open_in(path, std::ios::binary);
    return read_motion(in, path.string());
}

// ---------------------------------------------------------------------------
// Contacts

inline void write_contacts(std::ostream& out, const ContactSequence& c) {
    c.validate();
    const json h = {{"n_frames", c.n_frames}, {"n_vertices", c.n_vertices}, {"categories", c.categories.names()}};
    out << h.dump() << '\n';
    detail::write_f32_le(out, c.probs);
}

inline ContactSequence read_contacts(std::istream& in, const std::string& what = "contacts") {
    const json h = detail::read_header(in, what);
    ContactSequence c;
    try {
        c.categories = CategorySet(h.at("categories").get<std::vector<std::string>>());
        c.n_frames = h.at("n_frames").get<std::size_t>();
        c.n_vertices = h.at("n_vertices").get<std::size_t>();
    } catch (const json::exception& e) {
        throw Error(what + ": " + e.what());
    }
    c.probs = detail::read_f32_le(in, c.n_frames * c.n_vertices * c.width(), what);
    c.validate();
    return c;
}

inline void save_contacts(const std::filesystem::path& path, const ContactSequence& c) {
    auto out = detail::open_out(path, std::ios::binary);
    write_contacts(out, c);
}

inline ContactSequence load_contacts(const std::filesystem::path& path) {
    auto in = detail::open_in(path, std::ios::binary);
    return read_contacts(in, path.string());
}

// ---------------------------------------------------------------------------
// Layout

inline json to_json(const SceneLayout& layout) {
    json objects = json::array();
    for (const auto& o : layout.objects) {
        const Vec3& t = o.transform.translation();
        objects.push_back({{"asset_id", o.asset_id},
                           {"class", o.class_name},
                           {"translation", {t.x(), t.y(), t.z()}},
                           {"yaw", o.transform.yaw()},
                           {"in_contact", o.in_contact}});
    }
    return {{"floor_height", layout.floor_height}, {"objects", std::move(objects)}};
}

inline SceneLayout layout_from_json(const json& j) {
    try {
        SceneLayout layout;
        layout.floor_height = j.at("floor_height").get<double>();
        for (const auto& o : j.at("objects")) {
            const auto t = o.at("translation").get<std::array<double, 3>>();
            layout.objects.push_back({o.at("asset_id").get<std::string>(), o.at("class").get<std::string>(),
                                      PlanarTransform(Vec3(t[0], t[1], t[2]), o.at("yaw").get<double>()),
                                      o.at("in_contact").get<bool>()});
        }
        return layout;
    } catch (const json::exception& e) {
        throw Error(std::string("layout: ") + e.what());
    }
}

inline void save_json(const std::filesystem::path& path, const json& j) {
    auto out = detail::open_out(path);
    out << j.dump(2) << '\n';
}

inline json load_json(const std::filesystem::path& path) {
    auto in = detail::open_in(path);
    try {
        return json::parse(in);
    } catch (const json::exception& e) {
        throw Error(path.string() + ": " + e.what());
    }
}

inline void save_layout(const std::filesystem::path& path, const SceneLayout& layout) {
    save_json(path, to_json(layout));
}

inline SceneLayout load_layout(const std::filesystem::path& path) { return layout_from_json(load_json(path)); }

// ---------------------------------------------------------------------------
// Metric report

inline json to_json(const MetricReport& r) {
    json j = {{"non_collision", r.non_collision}, {"contact", r.contact}};
    if (r.consistency) j["consistency"] = *r.consistency;
    if (r.reconstruction_accuracy) j["reconstruction_accuracy"] = *r.reconstruction_accuracy;
    return j;
}

inline MetricReport metrics_from_json(const json& j) {
    try {
        MetricReport r;
        r.non_collision = j.at("non_collision").get<double>();
        r.contact = j.at("contact").get<double>();
        if (j.contains("consistency")) r.consistency = j.at("consistency").get<double>();
        if (j.contains("reconstruction_accuracy"))
            r.reconstruction_accuracy = j.at("reconstruction_accuracy").get<double>();
        return r;
    } catch (const json::exception& e) {
        throw Error(std::string("metric report: ") + e.what());
    }
}

inline void save_metrics(const std::filesystem::path& path, const MetricReport& r) { save_json(path, to_json(r)); }
inline MetricReport load_metrics(const std::filesystem::path& path) { return metrics_from_json(load_json(path)); }

// ---------------------------------------------------------------------------
// Category corpus (JSON Lines)

inline std::vector<std::vector<std::string>> read_corpus(std::istream& in, const std::string& what = "corpus") {
    std::vector<std::vector<std::string>> out;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        try {
            out.push_back(json::parse(line).get<std::vector<std::string>>());
        } catch (const json::exception& e) {
            throw Error(what + ":" + std::to_string(line_no) + ": " + e.what());
        }
    }
    return out;
}

inline void write_corpus(std::ostream& out, const std::vector<std::vector<std::string>>& corpus) {
    for (const auto& seq : corpus) out << json(seq).dump() << '\n';
}

inline std::vector<std::vector<std::string>> load_corpus(const std::filesystem::path& path) {
    auto in = detail::open_in(path);
    return read_corpus(in, path.string());
}

inline void save_corpus(const std::filesystem::path& path, const std::vector<std::vector<std::string>>& corpus) {
    auto out = detail::open_out(path);
    write_corpus(out, corpus);
}

// ---------------------------------------------------------------------------
// Annotated scene for ground-truth labeling. Same shape as an asset
// manifest: {"categories": [...], "assets": [{"id", "class", "path"}]}.

struct AnnotatedScene {
    CategorySet categories;
    std::vector<SceneComponent> components;
};

inline AnnotatedScene load_scene(const std::filesystem::path& manifest) {
    const json j = load_json(manifest);
    try {
        AnnotatedScene scene{CategorySet(j.at("categories").get<std::vector<std::string>>()), {}};
        for (const auto& entry : j.at("assets")) {
            const auto cls = entry.at("class").get<std::string>();
            const auto id = scene.categories.find(cls);
            if (!id) throw Error(manifest.string() + ": unknown class '" + cls + "'");
            scene.components.push_back({load_mesh(manifest.parent_path() / entry.at("path").get<std::string>()), *id});
        }
        return scene;
    } catch (const json::exception& e) {
        throw Error(manifest.string() + ": " + e.what());
    }
}

}  // namespace summon
