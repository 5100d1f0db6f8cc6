#pragma once

#include <atomic>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "rplc/eval.hpp"
#include "rplc/fusion.hpp"
#include "rplc/geom.hpp"
#include "rplc/io.hpp"
#include "rplc/lang.hpp"
#include "rplc/synth.hpp"
#include "rplc/train.hpp"

namespace rplc::pipeline {

namespace fs = std::filesystem;
using nlohmann::json;

struct SourceSpec {
    synth::SourceProfile profile;
    bool primary = false;
};

enum class FusionMode { sfusion, data_mixing };

struct PipelineConfig {
    fs::path workdir = "out";
    std::uint64_t seed = 1;
    int threads = 1;
    int scene_count = 4;
    synth::SceneConfig scene;
    std::vector<SourceSpec> sources;
    int min_points = 5;
    double z_tolerance = 0.01;
    fusion::FusionConfig fusion_cfg;
    FusionMode fusion_mode = FusionMode::sfusion;
    std::string embeddings_kind = "synthetic_hash";
    int embed_dim = 16;
    std::uint64_t embed_seed = 7;
    std::optional<fs::path> embed_table_path;
    learn::TrainConfig train;
    std::vector<std::string> base_names;
    std::vector<std::string> novel_names;
    std::vector<std::string> excluded_names{"wall", "floor", "ceiling"};

    SourceTag primary_tag() const {
        for (const auto& s : sources)
            if (s.primary) return s.profile.kind;
        throw InvalidConfig("pipeline: no primary source");
    }
};

inline PipelineConfig parse_pipeline_config(const json& j) {
    PipelineConfig cfg;
    cfg.workdir = j.value("workdir", std::string("out"));
    if (const char* env = std::getenv("PLC_WORKDIR")) cfg.workdir = env;
    cfg.seed = j.value("seed", 1ull);
    cfg.threads = j.value("threads", 1);

    const json& sc = j.at("scene");
    cfg.scene_count = sc.value("count", 4);
    if (sc.contains("room_extent")) {
        auto e = sc.at("room_extent").get<std::vector<double>>();
        if (e.size() != 3) throw InvalidConfig("scene.room_extent must have 3 entries");
        cfg.scene.room_extent = Vec3(e[0], e[1], e[2]);
    }
    if (sc.contains("object_count")) {
        cfg.scene.object_count_min = sc.at("object_count").at(0);
        cfg.scene.object_count_max = sc.at("object_count").at(1);
    }
    for (const auto& c : sc.at("categories")) {
        synth::SynthCategory cat;
        cat.name = c.at("name");
        cat.size_class = c.value("size", std::string("large")) == "small" ? synth::SizeClass::small
                                                                          : synth::SizeClass::large;
        cat.salient = c.value("salient", true);
        cfg.scene.categories.push_back(cat);
    }
    cfg.scene.points_per_m2 = sc.value("points_per_m2", cfg.scene.points_per_m2);
    cfg.scene.object_points_per_m2 = sc.value("object_points_per_m2", cfg.scene.object_points_per_m2);
    cfg.scene.view_count = sc.value("view_count", cfg.scene.view_count);
    cfg.scene.image_width = sc.value("image_width", cfg.scene.image_width);
    cfg.scene.image_height = sc.value("image_height", cfg.scene.image_height);
    cfg.scene.focal = sc.value("focal", cfg.scene.focal);
    cfg.scene.validate();

    for (const auto& s : j.at("sources")) {
        SourceSpec spec;
        spec.profile.kind = source_tag_from_string(s.at("kind"));
        spec.primary = s.value("role", std::string("candidate")) == "primary";
        if (s.contains("vocabulary"))
            spec.profile.vocabulary = s.at("vocabulary").get<std::vector<std::string>>();
        else
            spec.profile.vocabulary = cfg.scene.category_names();
        spec.profile.salient_only = s.value("salient_only", false);
        spec.profile.min_pixel_area = s.value("min_pixel_area", 0.0);
        spec.profile.caption_style = s.value("caption_style", std::string("template")) == "phrase"
                                         ? synth::CaptionStyle::phrase
                                         : synth::CaptionStyle::template_fill;
        spec.profile.label_noise = s.value("label_noise", 0.0);
        spec.profile.box_jitter = s.value("box_jitter", 0.0);
        spec.profile.sw_grid = s.value("sw_grid", 3);
        spec.profile.validate();
        cfg.sources.push_back(spec);
    }
    int primaries = 0;
    for (const auto& s : cfg.sources) primaries += s.primary ? 1 : 0;
    if (primaries != 1) throw InvalidConfig("pipeline: exactly one source must have role=primary");

    if (j.contains("association")) {
        cfg.min_points = j.at("association").value("min_points", 5);
        cfg.z_tolerance = j.at("association").value("z_tolerance", 0.01);
    }
    if (j.contains("fusion")) {
        const json& f = j.at("fusion");
        cfg.fusion_cfg.t_low = f.value("t_low", 0.0);
        cfg.fusion_cfg.t_high = f.value("t_high", 0.2);
        cfg.fusion_cfg.epsilon = f.value("epsilon", 0.72);
        cfg.fusion_mode = f.value("mode", std::string("sfusion")) == "data_mixing"
                              ? FusionMode::data_mixing
                              : FusionMode::sfusion;
        if (cfg.fusion_mode == FusionMode::sfusion &&
            !(cfg.fusion_cfg.t_low < cfg.fusion_cfg.t_high))
            throw InvalidConfig("fusion: t_low must be < t_high");
    }
    for (const auto& s : cfg.sources)
        if (!s.primary) cfg.fusion_cfg.candidate_order.push_back(s.profile.kind);

    if (j.contains("embeddings")) {
        const json& e = j.at("embeddings");
        cfg.embeddings_kind = e.value("kind", std::string("synthetic_hash"));
        cfg.embed_dim = e.value("dim", 16);
        cfg.embed_seed = e.value("seed", 7ull);
        if (e.contains("table_path")) cfg.embed_table_path = e.at("table_path").get<std::string>();
        if (cfg.embeddings_kind != "synthetic_hash" && cfg.embeddings_kind != "file_table")
            throw InvalidConfig("embeddings.kind must be synthetic_hash or file_table");
    }

    if (j.contains("train")) {
        const json& t = j.at("train");
        cfg.train.loss_kind = learn::loss_kind_from_string(t.value("loss", std::string("rpdc")));
        cfg.train.supervised_weight = t.value("supervised_weight", 1.0);
        cfg.train.steps = t.value("steps", 500);
        cfg.train.learning_rate = t.value("learning_rate", 1e-3);
        cfg.train.batch_scenes = t.value("batch_scenes", 2);
        if (t.contains("hidden_sizes")) cfg.train.hidden_sizes = t.at("hidden_sizes").get<std::vector<int>>();
        cfg.train.logit_scale = t.value("logit_scale", 100.0);
        cfg.train.use_adam = t.value("optimizer", std::string("adam")) == "adam";
        cfg.train.validate();
    }
    cfg.train.seed = cfg.seed;
    cfg.fusion_cfg.seed = hash_combine(cfg.seed, fnv1a64("fusion"));

    const json& ev = j.at("eval");
    cfg.base_names = ev.at("base").get<std::vector<std::string>>();
    cfg.novel_names = ev.at("novel").get<std::vector<std::string>>();
    if (ev.contains("excluded"))
        cfg.excluded_names = ev.at("excluded").get<std::vector<std::string>>();
    return cfg;
}

inline eval::PartitionSpec build_partition(const PipelineConfig& cfg) {
    eval::PartitionSpec part;
    part.categories = cfg.scene.category_names();
    auto index_of = [&](const std::string& name) {
        for (std::size_t i = 0; i < part.categories.size(); ++i)
            if (part.categories[i] == name) return static_cast<int>(i);
        throw InvalidConfig("eval: unknown category name " + name);
    };
    for (const auto& n : cfg.base_names) part.base.insert(index_of(n));
    for (const auto& n : cfg.novel_names) part.novel.insert(index_of(n));
    for (const auto& n : cfg.excluded_names) part.foreground_excluded.insert(index_of(n));
    part.validate();
    return part;
}

inline lang::EmbeddingProvider make_provider(const PipelineConfig& cfg) {
    if (cfg.embeddings_kind == "file_table") {
        if (!cfg.embed_table_path) throw InvalidConfig("embeddings: file_table needs table_path");
        int dim = 0;
        auto table = io::load_embedding_table(*cfg.embed_table_path, &dim);
        return lang::EmbeddingProvider::from_table(std::move(table), dim);
    }
    return lang::EmbeddingProvider::synthetic(cfg.embed_dim, cfg.embed_seed);
}

/// K x d matrix of prompt-ensemble category embeddings, row per name.
inline Eigen::MatrixXd category_embedding_matrix(const lang::EmbeddingProvider& provider,
                                                 const std::vector<std::string>& names) {
    Eigen::MatrixXd m(names.size(), provider.dim());
    for (std::size_t i = 0; i < names.size(); ++i)
        m.row(i) = lang::embed_category(provider, lang::make_category(names[i]));
    return m;
}

// ---------------------------------------------------------------------------
// In-memory experiment path (also backs the file stages)

struct PreparedScene {
    synth::SynthScene synth;
    // association output per source, all views concatenated
    std::map<SourceTag, std::vector<RegionLanguagePair>> pairs_by_source;
};

inline std::string scene_name(int index) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "scene_%03d", index);
    return buf;
}

template <typename Fn>
inline void parallel_for(int n, int threads, Fn&& fn) {
    threads = std::max(1, std::min(threads, n));
    if (threads == 1) {
        for (int i = 0; i < n; ++i) fn(i);
        return;
    }
    std::vector<std::thread> pool;
    std::atomic<int> next{0};
    for (int t = 0; t < threads; ++t)
        pool.emplace_back([&] {
            for (int i = next.fetch_add(1); i < n; i = next.fetch_add(1)) fn(i);
        });
    for (auto& th : pool) th.join();
}

inline PreparedScene prepare_scene(const PipelineConfig& cfg, int scene_index) {
    synth::SceneConfig sc = cfg.scene;
    sc.seed = hash_combine(cfg.seed, hash_combine(fnv1a64("scene"), scene_index));
    PreparedScene prep;
    prep.synth = synth::generate_scene(sc, scene_name(scene_index));

    for (std::size_t si = 0; si < cfg.sources.size(); ++si) {
        const auto& spec = cfg.sources[si];
        std::uint64_t seed =
            hash_combine(sc.seed, hash_combine(fnv1a64("source"), static_cast<std::uint64_t>(si)));
        auto regions = synth::simulate_source(prep.synth, spec.profile, seed, cfg.z_tolerance);
        auto& pairs = prep.pairs_by_source[spec.profile.kind];
        for (std::size_t vid = 0; vid < regions.size(); ++vid) {
            auto assoc = geom::associate_regions(prep.synth.scene, static_cast<int>(vid),
                                                 regions[vid], cfg.min_points, cfg.z_tolerance);
            for (auto& p : assoc.pairs) pairs.push_back(std::move(p));
        }
    }
    return prep;
}

inline std::vector<PreparedScene> prepare_scenes(const PipelineConfig& cfg) {
    std::vector<PreparedScene> out(cfg.scene_count);
    parallel_for(cfg.scene_count, cfg.threads, [&](int i) { out[i] = prepare_scene(cfg, i); });
    return out;
}

inline fusion::FusionResult fuse_scene(const PipelineConfig& cfg, const PreparedScene& prep) {
    SourceTag primary = cfg.primary_tag();
    std::map<SourceTag, std::vector<RegionLanguagePair>> candidates;
    std::vector<RegionLanguagePair> primary_pairs;
    for (const auto& [tag, pairs] : prep.pairs_by_source) {
        if (tag == primary)
            primary_pairs = pairs;
        else
            candidates[tag] = pairs;
    }
    if (cfg.fusion_mode == FusionMode::data_mixing) {
        fusion::FusionResult res;
        res.fused = primary_pairs;
        res.report.kept_primary = primary_pairs.size();
        for (SourceTag tag : cfg.fusion_cfg.candidate_order) {
            auto it = candidates.find(tag);
            if (it == candidates.end()) continue;
            for (const auto& p : it->second) res.fused.push_back(p);
            res.report.kept_per_source[tag] = it->second.size();
        }
        res.report.achieved_primary_ratio =
            res.fused.empty() ? 0.0
                              : static_cast<double>(primary_pairs.size()) / res.fused.size();
        return res;
    }
    return fusion::sfusion(primary_pairs, candidates, cfg.fusion_cfg);
}

/// Map scene labels to the supervised loss's local base-category indices
/// (novel and excluded-from-base points become IGNORE).
inline std::vector<int> base_label_vector(const std::vector<int>& labels,
                                          const eval::PartitionSpec& part) {
    std::vector<int> base_sorted(part.base.begin(), part.base.end());
    std::vector<int> to_local(part.categories.size(), kIgnoreLabel);
    for (std::size_t i = 0; i < base_sorted.size(); ++i) to_local[base_sorted[i]] = static_cast<int>(i);
    std::vector<int> out(labels.size(), kIgnoreLabel);
    for (std::size_t i = 0; i < labels.size(); ++i)
        if (labels[i] >= 0) out[i] = to_local[labels[i]];
    return out;
}

inline learn::TrainScene build_train_scene(const PreparedScene& prep,
                                           const std::vector<RegionLanguagePair>& fused,
                                           const lang::EmbeddingProvider& provider,
                                           const eval::PartitionSpec& part) {
    learn::TrainScene ts;
    ts.inputs = learn::point_input_features(prep.synth.scene);
    ts.base_labels = base_label_vector(prep.synth.scene.labels, part);
    if (!fused.empty()) {
        lang::CaptionBank bank = lang::build_caption_bank(fused, provider);
        learn::CaptionGroup group;
        group.caption_embeddings = bank.embeddings;
        for (std::size_t i = 0; i < fused.size(); ++i)
            group.regions.push_back({fused[i].point_indices, bank.target_index[i]});
        ts.caption_groups.push_back(std::move(group));
    }
    return ts;
}

struct EvalAccumulator {
    Eigen::MatrixXi confusion;
};

inline eval::MetricReport evaluate_scenes(const learn::ModelParams& params,
                                          const std::vector<const PointScene*>& scenes,
                                          const Eigen::MatrixXd& category_embeddings,
                                          const eval::PartitionSpec& part, double lambda,
                                          Eigen::MatrixXi* confusion_out = nullptr) {
    const int k = static_cast<int>(part.categories.size());
    Eigen::MatrixXi conf = Eigen::MatrixXi::Zero(k, k);
    for (const PointScene* scene : scenes) {
        Eigen::MatrixXd f = learn::encode_points(params, *scene);
        auto scores = eval::infer_scores(f, category_embeddings, lambda);
        auto pred = eval::predict_labels(scores);
        conf += eval::confusion_matrix(pred, scene->labels, k);
    }
    if (confusion_out) *confusion_out = conf;
    return eval::compute_metrics(conf, part);
}

// ---------------------------------------------------------------------------
// File-based stages (the CLI surface)

inline fs::path scenes_dir(const PipelineConfig& c) { return c.workdir / "scenes"; }
inline fs::path regions_dir(const PipelineConfig& c) { return c.workdir / "regions"; }
inline fs::path pairs_dir(const PipelineConfig& c) { return c.workdir / "pairs"; }
inline fs::path fused_dir(const PipelineConfig& c) { return c.workdir / "fused"; }
inline fs::path banks_dir(const PipelineConfig& c) { return c.workdir / "banks"; }

inline json synth_sidecar_to_json(const synth::SynthScene& ss) {
    json objs = json::array();
    for (const auto& o : ss.objects) {
        objs.push_back({{"category", o.category},
                        {"shape", static_cast<int>(o.shape)},
                        {"center", {o.center.x(), o.center.y(), o.center.z()}},
                        {"half", {o.half.x(), o.half.y(), o.half.z()}},
                        {"salient", o.salient},
                        {"color", {o.color.x(), o.color.y(), o.color.z()}},
                        {"color_name", o.color_name}});
    }
    return json{{"room_extent", {ss.room_extent.x(), ss.room_extent.y(), ss.room_extent.z()}},
                {"category_names", ss.category_names},
                {"objects", objs},
                {"point_object", ss.point_object}};
}

inline void synth_sidecar_from_json(const json& j, synth::SynthScene& ss) {
    auto e = j.at("room_extent").get<std::vector<double>>();
    ss.room_extent = Vec3(e[0], e[1], e[2]);
    ss.category_names = j.at("category_names").get<std::vector<std::string>>();
    ss.point_object = j.at("point_object").get<std::vector<int>>();
    for (const auto& o : j.at("objects")) {
        synth::ObjectInfo obj;
        obj.category = o.at("category");
        obj.shape = static_cast<synth::ShapeKind>(o.at("shape").get<int>());
        auto c = o.at("center").get<std::vector<double>>();
        obj.center = Vec3(c[0], c[1], c[2]);
        auto h = o.at("half").get<std::vector<double>>();
        obj.half = Vec3(h[0], h[1], h[2]);
        obj.salient = o.at("salient");
        auto col = o.at("color").get<std::vector<double>>();
        obj.color = Vec3(col[0], col[1], col[2]);
        obj.color_name = o.at("color_name");
        ss.objects.push_back(obj);
    }
}

inline synth::SynthScene load_synth_scene(const PipelineConfig& cfg, int index) {
    synth::SynthScene ss;
    ss.scene = io::load_scene(scenes_dir(cfg) / (scene_name(index) + ".plcs"));
    std::ifstream is(scenes_dir(cfg) / (scene_name(index) + ".objects.json"));
    if (!is) throw IoError("missing objects sidecar for " + scene_name(index));
    synth_sidecar_from_json(json::parse(is), ss);
    return ss;
}

inline void stage_gen(const PipelineConfig& cfg) {
    fs::create_directories(scenes_dir(cfg));
    parallel_for(cfg.scene_count, cfg.threads, [&](int i) {
        synth::SceneConfig sc = cfg.scene;
        sc.seed = hash_combine(cfg.seed, hash_combine(fnv1a64("scene"), i));
        synth::SynthScene ss = synth::generate_scene(sc, scene_name(i));
        io::save_scene(ss.scene, scenes_dir(cfg) / (scene_name(i) + ".plcs"));
        std::ofstream os(scenes_dir(cfg) / (scene_name(i) + ".objects.json"));
        os << synth_sidecar_to_json(ss).dump() << "\n";
    });
}

inline void stage_caption(const PipelineConfig& cfg) {
    fs::create_directories(regions_dir(cfg));
    parallel_for(cfg.scene_count, cfg.threads, [&](int i) {
        synth::SynthScene ss = load_synth_scene(cfg, i);
        std::uint64_t scene_seed = hash_combine(cfg.seed, hash_combine(fnv1a64("scene"), i));
        for (std::size_t si = 0; si < cfg.sources.size(); ++si) {
            const auto& spec = cfg.sources[si];
            std::uint64_t seed = hash_combine(
                scene_seed, hash_combine(fnv1a64("source"), static_cast<std::uint64_t>(si)));
            auto per_view = synth::simulate_source(ss, spec.profile, seed, cfg.z_tolerance);
            std::vector<Region2D> flat;
            for (auto& v : per_view)
                for (auto& r : v) flat.push_back(std::move(r));
            io::save_regions_jsonl(flat, regions_dir(cfg) / (scene_name(i) + "." +
                                                             to_string(spec.profile.kind) + ".jsonl"));
        }
    });
}

inline void stage_associate(const PipelineConfig& cfg) {
    fs::create_directories(pairs_dir(cfg));
    parallel_for(cfg.scene_count, cfg.threads, [&](int i) {
        synth::SynthScene ss = load_synth_scene(cfg, i);
        for (const auto& spec : cfg.sources) {
            auto regions = io::load_regions_jsonl(
                regions_dir(cfg) / (scene_name(i) + "." + to_string(spec.profile.kind) + ".jsonl"));
            std::vector<std::vector<Region2D>> per_view(ss.scene.views.size());
            for (auto& r : regions) per_view.at(r.view_id).push_back(r);
            std::vector<RegionLanguagePair> pairs;
            for (std::size_t vid = 0; vid < per_view.size(); ++vid) {
                auto assoc = geom::associate_regions(ss.scene, static_cast<int>(vid), per_view[vid],
                                                     cfg.min_points, cfg.z_tolerance);
                for (auto& p : assoc.pairs) pairs.push_back(std::move(p));
            }
            io::save_pairs_jsonl(pairs, pairs_dir(cfg) / (scene_name(i) + "." +
                                                          to_string(spec.profile.kind) + ".jsonl"));
        }
    });
}

inline void stage_fuse(const PipelineConfig& cfg) {
    fs::create_directories(fused_dir(cfg));
    parallel_for(cfg.scene_count, cfg.threads, [&](int i) {
        PreparedScene prep;
        for (const auto& spec : cfg.sources)
            prep.pairs_by_source[spec.profile.kind] = io::load_pairs_jsonl(
                pairs_dir(cfg) / (scene_name(i) + "." + to_string(spec.profile.kind) + ".jsonl"));
        auto res = fuse_scene(cfg, prep);
        io::save_pairs_jsonl(res.fused, fused_dir(cfg) / (scene_name(i) + ".jsonl"));
        std::ofstream os(fused_dir(cfg) / (scene_name(i) + ".report.json"));
        os << io::fusion_report_to_json(res.report).dump(2) << "\n";
    });
}

inline void stage_embed(const PipelineConfig& cfg) {
    fs::create_directories(banks_dir(cfg));
    lang::EmbeddingProvider provider = make_provider(cfg);
    parallel_for(cfg.scene_count, cfg.threads, [&](int i) {
        auto fused = io::load_pairs_jsonl(fused_dir(cfg) / (scene_name(i) + ".jsonl"));
        std::unordered_map<std::string, Eigen::VectorXd> table;
        if (!fused.empty()) {
            lang::CaptionBank bank = lang::build_caption_bank(fused, provider);
            for (int t = 0; t < bank.n_t(); ++t) table[bank.texts[t]] = bank.embeddings.row(t);
        }
        io::save_embedding_table(table, provider.dim(), banks_dir(cfg) / (scene_name(i) + ".plce"));
    });
    // category prompt embeddings for inference
    std::unordered_map<std::string, Eigen::VectorXd> cats;
    for (const auto& name : cfg.scene.category_names())
        cats[name] = lang::embed_category(provider, lang::make_category(name));
    io::save_embedding_table(cats, provider.dim(), cfg.workdir / "categories.plce");
}

inline void stage_train(const PipelineConfig& cfg) {
    lang::EmbeddingProvider provider = make_provider(cfg);
    eval::PartitionSpec part = build_partition(cfg);
    std::vector<int> base_sorted(part.base.begin(), part.base.end());
    Eigen::MatrixXd base_emb(base_sorted.size(), provider.dim());
    for (std::size_t i = 0; i < base_sorted.size(); ++i)
        base_emb.row(i) =
            lang::embed_category(provider, lang::make_category(part.categories[base_sorted[i]]));

    std::vector<learn::TrainScene> train_scenes;
    for (int i = 0; i < cfg.scene_count; ++i) {
        synth::SynthScene ss = load_synth_scene(cfg, i);
        auto fused = io::load_pairs_jsonl(fused_dir(cfg) / (scene_name(i) + ".jsonl"));
        PreparedScene prep;
        prep.synth = std::move(ss);
        train_scenes.push_back(build_train_scene(prep, fused, provider, part));
    }
    learn::TrainResult result = learn::train(cfg.train, train_scenes, base_emb, provider.dim());
    io::save_checkpoint(result.params, cfg.workdir / "model.plcw");
    io::save_training_log_csv(result.log, cfg.workdir / "train_log.csv");
}

inline json stage_eval(const PipelineConfig& cfg) {
    lang::EmbeddingProvider provider = make_provider(cfg);
    eval::PartitionSpec part = build_partition(cfg);
    learn::ModelParams params = io::load_checkpoint(cfg.workdir / "model.plcw");
    Eigen::MatrixXd cat_emb = category_embedding_matrix(provider, part.categories);

    std::vector<PointScene> scenes;
    for (int i = 0; i < cfg.scene_count; ++i)
        scenes.push_back(io::load_scene(scenes_dir(cfg) / (scene_name(i) + ".plcs")));
    std::vector<const PointScene*> ptrs;
    for (const auto& s : scenes) ptrs.push_back(&s);

    eval::MetricReport rep =
        evaluate_scenes(params, ptrs, cat_emb, part, cfg.train.logit_scale);
    json j = io::metric_report_to_json(rep, part);
    std::ofstream os(cfg.workdir / "metrics.json");
    os << j.dump(2) << "\n";
    std::ofstream ot(cfg.workdir / "metrics.txt");
    ot << eval::format_report(rep, part);
    return j;
}

inline json run_pipeline(const PipelineConfig& cfg) {
    stage_gen(cfg);
    stage_caption(cfg);
    stage_associate(cfg);
    stage_fuse(cfg);
    stage_embed(cfg);
    stage_train(cfg);
    return stage_eval(cfg);
}

}  // namespace rplc::pipeline
