#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "rplc/losses.hpp"
#include "rplc/model.hpp"

namespace rplc::learn {

enum class LossKind { clip_style, pdc, rpdc };

inline const char* to_string(LossKind k) {
    switch (k) {
        case LossKind::clip_style: return "clip_style";
        case LossKind::pdc: return "pdc";
        case LossKind::rpdc: return "rpdc";
    }
    throw InvalidConfig("unknown LossKind");
}

inline LossKind loss_kind_from_string(const std::string& s) {
    if (s == "clip_style" || s == "clip") return LossKind::clip_style;
    if (s == "pdc") return LossKind::pdc;
    if (s == "rpdc") return LossKind::rpdc;
    throw InvalidConfig("unknown loss kind: " + s);
}

struct TrainConfig {
    LossKind loss_kind = LossKind::rpdc;
    double supervised_weight = 1.0;  // beta
    int steps = 500;
    double learning_rate = 1e-3;
    double adam_beta1 = 0.9;
    double adam_beta2 = 0.999;
    bool use_adam = true;  // false: plain SGD
    int batch_scenes = 2;
    std::uint64_t seed = 0;
    std::vector<int> hidden_sizes{128, 128, 128};
    double logit_scale = 100.0;

    void validate() const {
        if (steps < 1) throw InvalidConfig("train: steps must be >= 1");
        if (learning_rate <= 0) throw InvalidConfig("train: learning_rate must be > 0");
        if (supervised_weight < 0) throw InvalidConfig("train: supervised_weight must be >= 0");
        if (batch_scenes < 1) throw InvalidConfig("train: batch_scenes must be >= 1");
        if (hidden_sizes.empty()) throw InvalidConfig("train: empty hidden_sizes");
    }
};

/// One caption-supervision group (one fused pair set with its bank); loss-level
/// source mixing passes several groups, summed with equal weights.
struct CaptionGroup {
    MatrixXd caption_embeddings;  // n_t x d
    std::vector<Region> regions;
};

struct TrainScene {
    MatrixXd inputs;               // n_p x kPointFeatureDim
    std::vector<int> base_labels;  // base-category index or kIgnoreLabel
    std::vector<CaptionGroup> caption_groups;
};

struct LogRow {
    int step = 0;
    double loss_total = 0, loss_caption = 0, loss_sup = 0;
};

struct TrainResult {
    ModelParams params;
    std::vector<LogRow> log;
};

namespace detail {

struct AdamState {
    ParamGrads m, v;
};

inline void apply_update(ModelParams& p, const ParamGrads& g, AdamState& st, const TrainConfig& cfg,
                         int step) {
    auto update = [&](MatrixXd& w, const MatrixXd& gw, MatrixXd& m, MatrixXd& v) {
        if (!cfg.use_adam) {
            w -= cfg.learning_rate * gw;
            return;
        }
        m = cfg.adam_beta1 * m + (1 - cfg.adam_beta1) * gw;
        v = cfg.adam_beta2 * v + (1 - cfg.adam_beta2) * gw.cwiseProduct(gw);
        double bc1 = 1 - std::pow(cfg.adam_beta1, step);
        double bc2 = 1 - std::pow(cfg.adam_beta2, step);
        w.array() -= cfg.learning_rate * (m.array() / bc1) /
                     ((v.array() / bc2).sqrt() + 1e-8);
    };
    auto update_vec = [&](VectorXd& b, const VectorXd& gb, VectorXd& m, VectorXd& v) {
        MatrixXd bw = b, gbw = gb, mw = m, vw = v;
        update(bw, gbw, mw, vw);
        b = bw;
        m = mw;
        v = vw;
    };
    for (std::size_t l = 0; l < p.encoder.size(); ++l) {
        update(p.encoder[l].w, g.encoder[l].w, st.m.encoder[l].w, st.v.encoder[l].w);
        update_vec(p.encoder[l].b, g.encoder[l].b, st.m.encoder[l].b, st.v.encoder[l].b);
    }
    update(p.adapter.w, g.adapter.w, st.m.adapter.w, st.v.adapter.w);
    update_vec(p.adapter.b, g.adapter.b, st.m.adapter.b, st.v.adapter.b);
}

}  // namespace detail

inline LossResult caption_loss(LossKind kind, const LossInstance& inst, double lambda) {
    switch (kind) {
        case LossKind::clip_style: return clip_style_loss(inst, lambda);
        case LossKind::pdc: return pdc_loss(inst, lambda);
        case LossKind::rpdc: return rpdc_loss(inst, lambda);
    }
    throw InvalidConfig("unknown loss kind");
}

/// Deterministic Adam/SGD training over a fixed scene set. Scenes are visited
/// round-robin, gradients accumulated in scene order.
inline TrainResult train(const TrainConfig& cfg, const std::vector<TrainScene>& scenes,
                         const MatrixXd& base_category_embeddings, int embed_dim) {
    cfg.validate();
    if (scenes.empty()) throw InvalidInput("train: no scenes");
    bool any_pairs = false;
    for (const auto& s : scenes)
        for (const auto& g : s.caption_groups)
            if (!g.regions.empty()) any_pairs = true;
    if (!any_pairs) throw InvalidInput("train: no caption pairs in any scene");

    TrainResult res;
    res.params = init_params(cfg.hidden_sizes, embed_dim, cfg.seed, kPointFeatureDim,
                             cfg.logit_scale);
    detail::AdamState adam{ParamGrads::zeros_like(res.params), ParamGrads::zeros_like(res.params)};

    for (int step = 1; step <= cfg.steps; ++step) {
        ParamGrads grads = ParamGrads::zeros_like(res.params);
        double loss_cap = 0, loss_sup = 0;
        int batch = std::min<int>(cfg.batch_scenes, static_cast<int>(scenes.size()));
        for (int b = 0; b < batch; ++b) {
            const TrainScene& sc =
                scenes[(static_cast<std::size_t>(step - 1) * batch + b) % scenes.size()];
            ForwardCache cache = forward(res.params, sc.inputs);
            MatrixXd grad_f = MatrixXd::Zero(cache.features.rows(), cache.features.cols());

            for (const auto& group : sc.caption_groups) {
                if (group.regions.empty()) continue;
                LossInstance inst{cache.features, group.caption_embeddings, group.regions};
                LossResult lr = caption_loss(cfg.loss_kind, inst, cfg.logit_scale);
                loss_cap += lr.value / batch;
                grad_f += lr.grad_points / batch;
            }
            if (cfg.supervised_weight > 0 && base_category_embeddings.rows() > 0) {
                LossResult lr = supervised_ce_loss(cache.features, base_category_embeddings,
                                                   sc.base_labels, cfg.logit_scale);
                loss_sup += lr.value / batch;
                grad_f += cfg.supervised_weight * lr.grad_points / batch;
            }
            grads.add(backward(res.params, cache, grad_f));
        }

        double total = loss_cap + cfg.supervised_weight * loss_sup;
        if (!std::isfinite(total))
            throw DivergedError("train: non-finite loss at step " + std::to_string(step));
        detail::apply_update(res.params, grads, adam, cfg, step);
        res.log.push_back({step, total, loss_cap, loss_sup});
    }
    return res;
}

}  // namespace rplc::learn
