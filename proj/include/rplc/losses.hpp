#pragma once

#include <Eigen/Dense>
#include <functional>
#include <vector>

#include "rplc/common.hpp"
#include "rplc/lang.hpp"

namespace rplc::learn {

using Eigen::MatrixXd;
using Eigen::RowVectorXd;
using Eigen::VectorXd;

struct Region {
    std::vector<std::uint32_t> point_indices;
    int target = 0;  // caption column
};

/// One scene's worth of loss inputs: point features, caption bank, regions.
struct LossInstance {
    MatrixXd point_features;      // n_p x d, unit rows
    MatrixXd caption_embeddings;  // n_t x d, unit rows
    std::vector<Region> regions;

    void validate() const {
        if (point_features.cols() != caption_embeddings.cols())
            throw InvalidInput("LossInstance: feature dim mismatch");
        if (caption_embeddings.rows() < 1) throw InvalidInput("LossInstance: empty caption bank");
        for (const auto& r : regions) {
            if (r.point_indices.empty()) throw InvalidInput("LossInstance: empty region");
            if (r.target < 0 || r.target >= caption_embeddings.rows())
                throw InvalidInput("LossInstance: target out of range");
            for (auto i : r.point_indices)
                if (i >= point_features.rows()) throw InvalidInput("LossInstance: point index out of range");
        }
    }
};

struct LossResult {
    double value = 0.0;
    MatrixXd grad_points;  // n_p x d, dL/d point_features
};

namespace detail {

inline RowVectorXd softmax(const RowVectorXd& z) {
    RowVectorXd s = (z.array() - z.maxCoeff()).exp();
    return s / s.sum();
}

// Row-wise softmax of lambda * F_p * F_t^T, computed lazily per point row.
inline RowVectorXd point_scores(const LossInstance& inst, double lambda, Eigen::Index i) {
    RowVectorXd z = lambda * (inst.point_features.row(i) * inst.caption_embeddings.transpose());
    return softmax(z);
}

}  // namespace detail

/// CLIP-style loss on average-pooled region features; every point of a region
/// receives the pooled gradient split evenly.
inline LossResult clip_style_loss(const LossInstance& inst, double lambda) {
    inst.validate();
    if (inst.regions.empty()) throw InvalidInput("clip_style_loss: no regions");
    LossResult res;
    res.grad_points = MatrixXd::Zero(inst.point_features.rows(), inst.point_features.cols());
    const double inv_r = 1.0 / static_cast<double>(inst.regions.size());

    for (const auto& reg : inst.regions) {
        RowVectorXd pooled = RowVectorXd::Zero(inst.point_features.cols());
        for (auto i : reg.point_indices) pooled += inst.point_features.row(i);
        const double card = static_cast<double>(reg.point_indices.size());
        pooled /= card;

        RowVectorXd s = detail::softmax(lambda * (pooled * inst.caption_embeddings.transpose()));
        res.value += -std::log(std::max(s[reg.target], 1e-300)) * inv_r;

        RowVectorXd ds = s;
        ds[reg.target] -= 1.0;
        RowVectorXd dpooled = lambda * inv_r * (ds * inst.caption_embeddings);
        for (auto i : reg.point_indices) res.grad_points.row(i) += dpooled / card;
    }
    return res;
}

/// Point-discriminative loss: per-point softmax scores, log-probabilities
/// average-pooled within each region.
inline LossResult pdc_loss(const LossInstance& inst, double lambda) {
    inst.validate();
    if (inst.regions.empty()) throw InvalidInput("pdc_loss: no regions");
    LossResult res;
    res.grad_points = MatrixXd::Zero(inst.point_features.rows(), inst.point_features.cols());
    const double inv_r = 1.0 / static_cast<double>(inst.regions.size());

    for (const auto& reg : inst.regions) {
        const double card = static_cast<double>(reg.point_indices.size());
        for (auto i : reg.point_indices) {
            RowVectorXd s = detail::point_scores(inst, lambda, i);
            res.value += -std::log(std::max(s[reg.target], 1e-300)) * inv_r / card;
            RowVectorXd ds = s;
            ds[reg.target] -= 1.0;
            res.grad_points.row(i) += (lambda * inv_r / card) * (ds * inst.caption_embeddings);
        }
    }
    return res;
}

/// Region-aware normalization factor: n_t * card(region) / sum of region cards.
inline double region_norm_factor(const LossInstance& inst, std::size_t region_idx) {
    double total = 0.0;
    for (const auto& r : inst.regions) total += static_cast<double>(r.point_indices.size());
    return static_cast<double>(inst.caption_embeddings.rows()) *
           static_cast<double>(inst.regions[region_idx].point_indices.size()) / total;
}

/// Region-aware point-discriminative loss: pdc with each region's term scaled
/// by its normalization factor, equalizing per-point gradient scale across
/// region sizes.
inline LossResult rpdc_loss(const LossInstance& inst, double lambda) {
    inst.validate();
    if (inst.regions.empty()) throw InvalidInput("rpdc_loss: no regions");
    LossResult res;
    res.grad_points = MatrixXd::Zero(inst.point_features.rows(), inst.point_features.cols());
    const double inv_r = 1.0 / static_cast<double>(inst.regions.size());

    for (std::size_t ri = 0; ri < inst.regions.size(); ++ri) {
        const Region& reg = inst.regions[ri];
        const double card = static_cast<double>(reg.point_indices.size());
        const double alpha = region_norm_factor(inst, ri);
        for (auto i : reg.point_indices) {
            RowVectorXd s = detail::point_scores(inst, lambda, i);
            res.value += -std::log(std::max(s[reg.target], 1e-300)) * alpha * inv_r / card;
            RowVectorXd ds = s;
            ds[reg.target] -= 1.0;
            res.grad_points.row(i) += (lambda * alpha * inv_r / card) * (ds * inst.caption_embeddings);
        }
    }
    return res;
}

/// Softmax cross-entropy against base-category embeddings on labeled points.
/// labels hold base-category indices or kIgnoreLabel.
inline LossResult supervised_ce_loss(const MatrixXd& point_features,
                                     const MatrixXd& base_category_embeddings,
                                     const std::vector<int>& labels, double lambda) {
    if (point_features.rows() != static_cast<Eigen::Index>(labels.size()))
        throw InvalidInput("supervised_ce_loss: label count mismatch");
    LossResult res;
    res.grad_points = MatrixXd::Zero(point_features.rows(), point_features.cols());

    std::size_t valid = 0;
    for (int l : labels) {
        if (l == kIgnoreLabel) continue;
        if (l < 0 || l >= base_category_embeddings.rows())
            throw InvalidInput("supervised_ce_loss: label out of range");
        ++valid;
    }
    if (valid == 0) return res;  // empty reduction

    const double inv_m = 1.0 / static_cast<double>(valid);
    for (Eigen::Index i = 0; i < point_features.rows(); ++i) {
        if (labels[i] == kIgnoreLabel) continue;
        RowVectorXd s = detail::softmax(
            lambda * (point_features.row(i) * base_category_embeddings.transpose()));
        res.value += -std::log(std::max(s[labels[i]], 1e-300)) * inv_m;
        RowVectorXd ds = s;
        ds[labels[i]] -= 1.0;
        res.grad_points.row(i) += (lambda * inv_m) * (ds * base_category_embeddings);
    }
    return res;
}

/// Central finite differences on every coordinate of the feature matrix
/// (seeded subsample above 10^4 coordinates). Returns the max relative error
/// between the analytic and numeric gradients.
inline double finite_diff_check(
    const std::function<LossResult(const MatrixXd&)>& loss_fn, const MatrixXd& point_features,
    double step, std::uint64_t subsample_seed = 0) {
    if (step <= 0) throw InvalidInput("finite_diff_check: step must be > 0");
    const LossResult base = loss_fn(point_features);

    const Eigen::Index total = point_features.size();
    std::vector<Eigen::Index> coords;
    if (total > 10000) {
        Rng rng(subsample_seed);
        coords.resize(10000);
        for (auto& c : coords) c = static_cast<Eigen::Index>(rng.uniform_int(total));
    } else {
        coords.resize(total);
        for (Eigen::Index c = 0; c < total; ++c) coords[c] = c;
    }

    // near-zero coordinates are judged against the gradient's overall scale,
    // where central differences are roundoff-limited
    const double floor =
        std::max(1e-8, 1e-6 * (1.0 + base.grad_points.cwiseAbs().maxCoeff()));
    double max_err = 0.0;
    MatrixXd f = point_features;
    for (Eigen::Index c : coords) {
        Eigen::Index row = c % f.rows(), col = c / f.rows();
        const double orig = f(row, col);
        f(row, col) = orig + step;
        double lp = loss_fn(f).value;
        f(row, col) = orig - step;
        double lm = loss_fn(f).value;
        f(row, col) = orig;
        double numeric = (lp - lm) / (2.0 * step);
        double analytic = base.grad_points(row, col);
        double denom = std::max({std::abs(numeric), std::abs(analytic), floor});
        max_err = std::max(max_err, std::abs(numeric - analytic) / denom);
    }
    return max_err;
}

}  // namespace rplc::learn
