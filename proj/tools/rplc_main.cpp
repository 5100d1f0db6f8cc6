// rplc: region-level 3D-language toolkit command line.

#include <CLI11.hpp>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "rplc/pipeline.hpp"

namespace {

using rplc::pipeline::PipelineConfig;
using nlohmann::json;

PipelineConfig load_config(const std::string& path, std::optional<std::uint64_t> seed_override,
                           int threads) {
    std::ifstream is(path);
    if (!is) throw rplc::InvalidConfig("cannot open config: " + path);
    json j = json::parse(is);
    PipelineConfig cfg = rplc::pipeline::parse_pipeline_config(j);
    if (seed_override) {
        cfg.seed = *seed_override;
        cfg.train.seed = cfg.seed;
        cfg.fusion_cfg.seed = rplc::hash_combine(cfg.seed, rplc::fnv1a64("fusion"));
    }
    if (threads > 0) cfg.threads = threads;
    return cfg;
}

rplc::learn::LossInstance random_instance(rplc::Rng& rng, int n_p, int n_t, int d) {
    rplc::learn::LossInstance inst;
    inst.point_features.resize(n_p, d);
    inst.caption_embeddings.resize(n_t, d);
    for (Eigen::Index i = 0; i < inst.point_features.size(); ++i)
        inst.point_features(i) = rng.gaussian();
    for (Eigen::Index i = 0; i < inst.caption_embeddings.size(); ++i)
        inst.caption_embeddings(i) = rng.gaussian();
    inst.point_features.rowwise().normalize();
    inst.caption_embeddings.rowwise().normalize();
    int n_regions = 2 + static_cast<int>(rng.uniform_int(5));
    for (int r = 0; r < n_regions; ++r) {
        rplc::learn::Region reg;
        int card = 1 + static_cast<int>(rng.uniform_int(std::max(1, n_p / 2)));
        std::vector<char> used(n_p, 0);
        while (static_cast<int>(reg.point_indices.size()) < card) {
            auto i = static_cast<std::uint32_t>(rng.uniform_int(n_p));
            if (!used[i]) {
                used[i] = 1;
                reg.point_indices.push_back(i);
            }
        }
        std::sort(reg.point_indices.begin(), reg.point_indices.end());
        reg.target = static_cast<int>(rng.uniform_int(n_t));
        inst.regions.push_back(std::move(reg));
    }
    return inst;
}

int run_gradcheck(const std::string& loss_name, std::uint64_t seed, bool as_json) {
    using namespace rplc::learn;
    const double lambda = 25.0;
    double worst = 0.0;
    for (int trial = 0; trial < 20; ++trial) {
        rplc::Rng rng(rplc::hash_combine(seed, trial));
        int n_p = 16 + static_cast<int>(rng.uniform_int(113));
        int n_t = 2 + static_cast<int>(rng.uniform_int(15));
        LossInstance inst = random_instance(rng, n_p, n_t, 16);

        std::function<LossResult(const Eigen::MatrixXd&)> fn;
        if (loss_name == "clip") {
            fn = [&](const Eigen::MatrixXd& f) {
                LossInstance v = inst;
                v.point_features = f;
                return clip_style_loss(v, lambda);
            };
        } else if (loss_name == "pdc") {
            fn = [&](const Eigen::MatrixXd& f) {
                LossInstance v = inst;
                v.point_features = f;
                return pdc_loss(v, lambda);
            };
        } else if (loss_name == "rpdc") {
            fn = [&](const Eigen::MatrixXd& f) {
                LossInstance v = inst;
                v.point_features = f;
                return rpdc_loss(v, lambda);
            };
        } else if (loss_name == "sup") {
            std::vector<int> labels(n_p);
            for (auto& l : labels)
                l = rng.uniform() < 0.2 ? rplc::kIgnoreLabel
                                        : static_cast<int>(rng.uniform_int(n_t));
            Eigen::MatrixXd emb = inst.caption_embeddings;
            fn = [&inst, labels, emb](const Eigen::MatrixXd& f) {
                (void)inst;
                return supervised_ce_loss(f, emb, labels, 25.0);
            };
        } else {
            throw rplc::InvalidConfig("gradcheck: unknown loss " + loss_name);
        }
        // clip's pooling shrinks the effective step, so 1e-4 is fine there; the
        // per-point losses need a smaller step to keep truncation below 1e-4
        double step = loss_name == "clip" ? 1e-4 : 2e-5;
        worst = std::max(worst, finite_diff_check(fn, inst.point_features, step, seed));
    }
    if (as_json)
        std::cout << json{{"loss", loss_name}, {"max_relative_error", worst}}.dump() << "\n";
    else
        std::cout << "gradcheck " << loss_name << ": max relative error = " << worst << "\n";
    return worst <= 1e-4 ? 0 : 3;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"region-level 3D-language pipeline"};
    app.require_subcommand(1);

    std::string config_path;
    std::optional<std::uint64_t> seed_override;
    bool as_json = false;
    int threads = 0;
    app.add_option("--config", config_path, "pipeline config JSON")->envname("RPLC_CONFIG");
    std::uint64_t seed_raw = 0;
    auto* seed_opt = app.add_option("--seed", seed_raw, "override every config seed");
    app.add_flag("--json", as_json, "machine-readable results on stdout");
    app.add_option("--threads", threads, "worker cap for per-scene stages");

    const char* stage_names[] = {"gen", "caption", "associate", "fuse", "embed", "train", "eval",
                                 "pipeline"};
    for (const char* name : stage_names) app.add_subcommand(name);
    auto* grad = app.add_subcommand("gradcheck", "finite-difference gradient check");
    std::string grad_loss = "rpdc";
    grad->add_option("--loss", grad_loss, "clip|pdc|rpdc|sup");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 2;
    }

    try {
        if (seed_opt->count() > 0) seed_override = seed_raw;
        std::string cmd = app.get_subcommands().front()->get_name();
        if (cmd == "gradcheck") return run_gradcheck(grad_loss, seed_override.value_or(7), as_json);

        if (config_path.empty()) throw rplc::InvalidConfig("--config is required for " + cmd);
        PipelineConfig cfg = load_config(config_path, seed_override, threads);

        auto progress = [&](const char* what) { std::cerr << "[rplc] " << what << "\n"; };
        json result;
        if (cmd == "gen" || cmd == "pipeline") {
            progress("generating scenes");
            rplc::pipeline::stage_gen(cfg);
        }
        if (cmd == "caption" || cmd == "pipeline") {
            progress("simulating caption sources");
            rplc::pipeline::stage_caption(cfg);
        }
        if (cmd == "associate" || cmd == "pipeline") {
            progress("associating regions to points");
            rplc::pipeline::stage_associate(cfg);
        }
        if (cmd == "fuse" || cmd == "pipeline") {
            progress("fusing 3D-language pairs");
            rplc::pipeline::stage_fuse(cfg);
        }
        if (cmd == "embed" || cmd == "pipeline") {
            progress("embedding captions");
            rplc::pipeline::stage_embed(cfg);
        }
        if (cmd == "train" || cmd == "pipeline") {
            progress("training");
            rplc::pipeline::stage_train(cfg);
        }
        if (cmd == "eval" || cmd == "pipeline") {
            progress("evaluating");
            result = rplc::pipeline::stage_eval(cfg);
        }
        if (as_json && !result.is_null()) std::cout << result.dump() << "\n";
        return 0;
    } catch (const rplc::InvalidConfig& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
}
