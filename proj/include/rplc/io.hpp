#pragma once

#include <cstring>
#include <filesystem>
#include <fstream>
#include <nlohmann/json.hpp>
#include <string>
#include <unordered_map>
#include <vector>

#include "rplc/eval.hpp"
#include "rplc/fusion.hpp"
#include "rplc/lang.hpp"
#include "rplc/model.hpp"
#include "rplc/train.hpp"
#include "rplc/types.hpp"

namespace rplc::io {

using nlohmann::json;

namespace detail {

template <typename T>
void write_pod(std::ostream& os, const T& v) {
    os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T read_pod(std::istream& is) {
    T v;
    is.read(reinterpret_cast<char*>(&v), sizeof(T));
    if (!is) throw IoError("unexpected end of file");
    return v;
}

inline void write_magic(std::ostream& os, const char m[4]) { os.write(m, 4); }

inline void expect_magic(std::istream& is, const char m[4], const std::string& what) {
    char buf[4];
    is.read(buf, 4);
    if (!is || std::memcmp(buf, m, 4) != 0) throw IoError("bad magic, not a " + what + " file");
}

inline void write_f32(std::ostream& os, double v) { write_pod(os, static_cast<float>(v)); }

}  // namespace detail

// ---------------------------------------------------------------------------
// Scene container ("PLCS")

inline void save_scene(const PointScene& scene, const std::filesystem::path& path) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw IoError("cannot open for writing: " + path.string());
    detail::write_magic(os, "PLCS");
    detail::write_pod<std::uint32_t>(os, 1);  // version
    detail::write_pod<std::uint32_t>(os, static_cast<std::uint32_t>(scene.size()));
    detail::write_pod<std::uint32_t>(os, static_cast<std::uint32_t>(scene.views.size()));
    for (const auto& p : scene.points)
        for (int a = 0; a < 3; ++a) detail::write_f32(os, p[a]);
    for (const auto& c : scene.colors)
        for (int a = 0; a < 3; ++a) detail::write_f32(os, c[a]);
    for (int l : scene.labels)
        detail::write_pod<std::uint16_t>(os, l == kIgnoreLabel ? 0xffff : static_cast<std::uint16_t>(l));
    for (const auto& v : scene.views) {
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) detail::write_pod<double>(os, v.intrinsics(i, j));
        for (int i = 0; i < 4; ++i)
            for (int j = 0; j < 4; ++j) detail::write_pod<double>(os, v.world_to_cam(i, j));
        detail::write_pod<std::uint32_t>(os, static_cast<std::uint32_t>(v.width));
        detail::write_pod<std::uint32_t>(os, static_cast<std::uint32_t>(v.height));
        os.write(reinterpret_cast<const char*>(v.depth.data()),
                 static_cast<std::streamsize>(sizeof(float)) * v.depth.size());
    }
    if (!os) throw IoError("write failed: " + path.string());
}

inline PointScene load_scene(const std::filesystem::path& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw IoError("cannot open: " + path.string());
    detail::expect_magic(is, "PLCS", "scene");
    auto version = detail::read_pod<std::uint32_t>(is);
    if (version != 1) throw IoError("unsupported scene file version");
    auto n = detail::read_pod<std::uint32_t>(is);
    auto n_views = detail::read_pod<std::uint32_t>(is);
    PointScene scene;
    scene.scene_id = path.stem().string();
    scene.points.resize(n);
    scene.colors.resize(n);
    scene.labels.resize(n);
    for (auto& p : scene.points)
        for (int a = 0; a < 3; ++a) p[a] = detail::read_pod<float>(is);
    for (auto& c : scene.colors)
        for (int a = 0; a < 3; ++a) c[a] = detail::read_pod<float>(is);
    for (auto& l : scene.labels) {
        auto raw = detail::read_pod<std::uint16_t>(is);
        l = raw == 0xffff ? kIgnoreLabel : raw;
    }
    scene.views.resize(n_views);
    for (auto& v : scene.views) {
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) v.intrinsics(i, j) = detail::read_pod<double>(is);
        for (int i = 0; i < 4; ++i)
            for (int j = 0; j < 4; ++j) v.world_to_cam(i, j) = detail::read_pod<double>(is);
        v.width = static_cast<int>(detail::read_pod<std::uint32_t>(is));
        v.height = static_cast<int>(detail::read_pod<std::uint32_t>(is));
        v.depth.resize(v.height, v.width);
        is.read(reinterpret_cast<char*>(v.depth.data()),
                static_cast<std::streamsize>(sizeof(float)) * v.depth.size());
        if (!is) throw IoError("truncated scene file: " + path.string());
    }
    return scene;
}

// ---------------------------------------------------------------------------
// Region and pair files (JSON Lines)

inline void save_regions_jsonl(const std::vector<Region2D>& regions,
                               const std::filesystem::path& path) {
    std::ofstream os(path);
    if (!os) throw IoError("cannot open for writing: " + path.string());
    for (const auto& r : regions) {
        json j{{"box", {r.x_min, r.y_min, r.x_max, r.y_max}},
               {"caption", r.caption},
               {"source", to_string(r.source)},
               {"view_id", r.view_id}};
        os << j.dump() << "\n";
    }
}

inline std::vector<Region2D> load_regions_jsonl(const std::filesystem::path& path) {
    std::ifstream is(path);
    if (!is) throw IoError("cannot open: " + path.string());
    std::vector<Region2D> out;
    std::string line;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        json j = json::parse(line);
        Region2D r;
        r.x_min = j.at("box").at(0);
        r.y_min = j.at("box").at(1);
        r.x_max = j.at("box").at(2);
        r.y_max = j.at("box").at(3);
        r.caption = j.at("caption");
        r.source = source_tag_from_string(j.at("source"));
        r.view_id = j.at("view_id");
        out.push_back(std::move(r));
    }
    return out;
}

inline void save_pairs_jsonl(const std::vector<RegionLanguagePair>& pairs,
                             const std::filesystem::path& path) {
    std::ofstream os(path);
    if (!os) throw IoError("cannot open for writing: " + path.string());
    for (const auto& p : pairs) {
        json j{{"scene_id", p.scene_id},
               {"point_indices", p.point_indices},
               {"caption", p.caption},
               {"source", to_string(p.source)},
               {"view_id", p.view_id}};
        os << j.dump() << "\n";
    }
}

inline std::vector<RegionLanguagePair> load_pairs_jsonl(const std::filesystem::path& path) {
    std::ifstream is(path);
    if (!is) throw IoError("cannot open: " + path.string());
    std::vector<RegionLanguagePair> out;
    std::string line;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        json j = json::parse(line);
        RegionLanguagePair p;
        p.scene_id = j.at("scene_id");
        p.point_indices = j.at("point_indices").get<std::vector<std::uint32_t>>();
        p.caption = j.at("caption");
        p.source = source_tag_from_string(j.at("source"));
        p.view_id = j.at("view_id");
        out.push_back(std::move(p));
    }
    return out;
}

inline json fusion_report_to_json(const fusion::FusionReport& rep) {
    json kept;
    for (const auto& [tag, count] : rep.kept_per_source) kept[to_string(tag)] = count;
    return json{{"kept_primary", rep.kept_primary},
                {"kept_per_source", kept},
                {"dropped_overlap", rep.dropped_overlap},
                {"dropped_ratio", rep.dropped_ratio},
                {"achieved_primary_ratio", rep.achieved_primary_ratio}};
}

// ---------------------------------------------------------------------------
// Embedding table ("PLCE")

inline void save_embedding_table(const std::unordered_map<std::string, Eigen::VectorXd>& table,
                                 int dim, const std::filesystem::path& path) {
    // sort keys so output bytes are reproducible
    std::vector<std::string> keys;
    keys.reserve(table.size());
    for (const auto& [k, v] : table) keys.push_back(k);
    std::sort(keys.begin(), keys.end());

    std::ofstream os(path, std::ios::binary);
    if (!os) throw IoError("cannot open for writing: " + path.string());
    detail::write_magic(os, "PLCE");
    detail::write_pod<std::uint32_t>(os, static_cast<std::uint32_t>(dim));
    detail::write_pod<std::uint32_t>(os, static_cast<std::uint32_t>(keys.size()));
    for (const auto& k : keys) {
        const auto& v = table.at(k);
        if (v.size() != dim) throw InvalidInput("embedding table: dim mismatch for " + k);
        detail::write_pod<std::uint16_t>(os, static_cast<std::uint16_t>(k.size()));
        os.write(k.data(), static_cast<std::streamsize>(k.size()));
        for (int i = 0; i < dim; ++i) detail::write_f32(os, v[i]);
    }
}

inline std::unordered_map<std::string, Eigen::VectorXd> load_embedding_table(
    const std::filesystem::path& path, int* dim_out = nullptr) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw IoError("cannot open: " + path.string());
    detail::expect_magic(is, "PLCE", "embedding table");
    auto dim = detail::read_pod<std::uint32_t>(is);
    auto count = detail::read_pod<std::uint32_t>(is);
    std::unordered_map<std::string, Eigen::VectorXd> table;
    for (std::uint32_t e = 0; e < count; ++e) {
        auto len = detail::read_pod<std::uint16_t>(is);
        std::string key(len, '\0');
        is.read(key.data(), len);
        Eigen::VectorXd v(dim);
        for (std::uint32_t i = 0; i < dim; ++i) v[i] = detail::read_pod<float>(is);
        table.emplace(std::move(key), std::move(v));
    }
    if (dim_out) *dim_out = static_cast<int>(dim);
    return table;
}

// ---------------------------------------------------------------------------
// Model checkpoint ("PLCW")

inline void save_checkpoint(const learn::ModelParams& params, const std::filesystem::path& path) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw IoError("cannot open for writing: " + path.string());
    detail::write_magic(os, "PLCW");
    detail::write_pod<std::uint32_t>(os, 1);
    detail::write_pod<double>(os, params.logit_scale);
    auto write_layer = [&](const learn::DenseLayer& l) {
        detail::write_pod<std::uint32_t>(os, static_cast<std::uint32_t>(l.w.rows()));
        detail::write_pod<std::uint32_t>(os, static_cast<std::uint32_t>(l.w.cols()));
        for (Eigen::Index j = 0; j < l.w.cols(); ++j)
            for (Eigen::Index i = 0; i < l.w.rows(); ++i) detail::write_f32(os, l.w(i, j));
        for (Eigen::Index i = 0; i < l.b.size(); ++i) detail::write_f32(os, l.b[i]);
    };
    detail::write_pod<std::uint32_t>(os, static_cast<std::uint32_t>(params.encoder.size()));
    for (const auto& l : params.encoder) write_layer(l);
    write_layer(params.adapter);
}

inline learn::ModelParams load_checkpoint(const std::filesystem::path& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw IoError("cannot open: " + path.string());
    detail::expect_magic(is, "PLCW", "checkpoint");
    auto version = detail::read_pod<std::uint32_t>(is);
    if (version != 1) throw IoError("unsupported checkpoint version");
    learn::ModelParams params;
    params.logit_scale = detail::read_pod<double>(is);
    auto read_layer = [&]() {
        learn::DenseLayer l;
        auto rows = detail::read_pod<std::uint32_t>(is);
        auto cols = detail::read_pod<std::uint32_t>(is);
        l.w.resize(rows, cols);
        for (std::uint32_t j = 0; j < cols; ++j)
            for (std::uint32_t i = 0; i < rows; ++i) l.w(i, j) = detail::read_pod<float>(is);
        l.b.resize(cols);
        for (std::uint32_t i = 0; i < cols; ++i) l.b[i] = detail::read_pod<float>(is);
        return l;
    };
    auto n_layers = detail::read_pod<std::uint32_t>(is);
    for (std::uint32_t i = 0; i < n_layers; ++i) params.encoder.push_back(read_layer());
    params.adapter = read_layer();
    return params;
}

// ---------------------------------------------------------------------------
// JSON specs

inline std::vector<lang::CategorySpec> load_category_specs(const std::filesystem::path& path) {
    std::ifstream is(path);
    if (!is) throw IoError("cannot open: " + path.string());
    json j = json::parse(is);
    std::vector<lang::CategorySpec> specs;
    for (const auto& e : j) {
        lang::CategorySpec s;
        s.name = e.at("name");
        s.synonyms = e.value("synonyms", std::vector<std::string>{s.name});
        s.templates = e.value("templates", lang::default_templates());
        s.validate();
        specs.push_back(std::move(s));
    }
    return specs;
}

inline void save_category_specs(const std::vector<lang::CategorySpec>& specs,
                                const std::filesystem::path& path) {
    json j = json::array();
    for (const auto& s : specs)
        j.push_back({{"name", s.name}, {"synonyms", s.synonyms}, {"templates", s.templates}});
    std::ofstream os(path);
    os << j.dump(2) << "\n";
}

inline json metric_report_to_json(const eval::MetricReport& rep, const eval::PartitionSpec& part) {
    json per_class = json::object();
    for (std::size_t c = 0; c < part.categories.size(); ++c)
        if (rep.per_class_iou[c] >= 0) per_class[part.categories[c]] = rep.per_class_iou[c];
    return json{{"hiou", rep.hiou},          {"miou_base", rep.miou_base},
                {"miou_novel", rep.miou_novel}, {"miou_fg", rep.miou_fg},
                {"macc_fg", rep.macc_fg},    {"per_class_iou", per_class}};
}

inline void save_training_log_csv(const std::vector<learn::LogRow>& log,
                                  const std::filesystem::path& path) {
    std::ofstream os(path);
    if (!os) throw IoError("cannot open for writing: " + path.string());
    os << "step,loss_total,loss_caption,loss_sup\n";
    char buf[128];
    for (const auto& row : log) {
        std::snprintf(buf, sizeof(buf), "%d,%.9g,%.9g,%.9g\n", row.step, row.loss_total,
                      row.loss_caption, row.loss_sup);
        os << buf;
    }
}

}  // namespace rplc::io
