#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cstdio>
#include <iterator>
#include <set>
#include <string>
#include <vector>

#include "rplc/common.hpp"

namespace rplc::eval {

using Eigen::MatrixXd;

/// Base/novel category split plus the background classes excluded from the
/// foreground-only metrics.
struct PartitionSpec {
    std::vector<std::string> categories;
    std::set<int> base;
    std::set<int> novel;
    std::set<int> foreground_excluded;

    void validate() const {
        std::set<int> all;
        for (int i = 0; i < static_cast<int>(categories.size()); ++i) all.insert(i);
        std::set<int> uni;
        std::set_union(base.begin(), base.end(), novel.begin(), novel.end(),
                       std::inserter(uni, uni.begin()));
        if (uni != all) throw InvalidConfig("partition: base ∪ novel must cover all categories");
        std::set<int> inter;
        std::set_intersection(base.begin(), base.end(), novel.begin(), novel.end(),
                              std::inserter(inter, inter.begin()));
        if (!inter.empty()) throw InvalidConfig("partition: base ∩ novel must be empty");
        for (int i : foreground_excluded)
            if (!all.count(i)) throw InvalidConfig("partition: excluded index out of range");
    }
};

struct MetricReport {
    std::vector<double> per_class_iou;  // percent; -1 for undefined classes
    double miou_base = 0, miou_novel = 0, hiou = 0;
    double miou_fg = 0, macc_fg = 0;
};

/// Row-softmax of lambda * (f^p · category_embeddings^T).
inline MatrixXd infer_scores(const MatrixXd& point_features, const MatrixXd& category_embeddings,
                             double lambda) {
    if (point_features.cols() != category_embeddings.cols())
        throw InvalidInput("infer_scores: dimension mismatch");
    if (lambda <= 0) throw InvalidInput("infer_scores: lambda must be > 0");
    MatrixXd z = lambda * (point_features * category_embeddings.transpose());
    MatrixXd s(z.rows(), z.cols());
    for (Eigen::Index i = 0; i < z.rows(); ++i) {
        Eigen::RowVectorXd e = (z.row(i).array() - z.row(i).maxCoeff()).exp();
        s.row(i) = e / e.sum();
    }
    return s;
}

/// Per-row argmax, ties broken toward the lowest class index.
inline std::vector<int> predict_labels(const MatrixXd& scores) {
    std::vector<int> labels(scores.rows());
    for (Eigen::Index i = 0; i < scores.rows(); ++i) {
        int best = 0;
        for (Eigen::Index k = 1; k < scores.cols(); ++k)
            if (scores(i, k) > scores(i, best)) best = static_cast<int>(k);
        labels[i] = best;
    }
    return labels;
}

/// counts[gt][pred], ignoring kIgnoreLabel ground truth.
inline Eigen::MatrixXi confusion_matrix(const std::vector<int>& pred, const std::vector<int>& gt,
                                        int num_classes) {
    if (pred.size() != gt.size()) throw InvalidInput("confusion_matrix: length mismatch");
    Eigen::MatrixXi conf = Eigen::MatrixXi::Zero(num_classes, num_classes);
    for (std::size_t i = 0; i < pred.size(); ++i) {
        if (gt[i] == kIgnoreLabel) continue;
        if (gt[i] < 0 || gt[i] >= num_classes || pred[i] < 0 || pred[i] >= num_classes)
            throw InvalidInput("confusion_matrix: label out of range");
        ++conf(gt[i], pred[i]);
    }
    return conf;
}

/// 2ab/(a+b), 0 when both terms vanish.
inline double harmonic_mean(double a, double b) {
    if (a + b <= 0) return 0.0;
    return 2.0 * a * b / (a + b);
}

inline MetricReport compute_metrics(const Eigen::MatrixXi& conf, const PartitionSpec& partition) {
    partition.validate();
    const int k = static_cast<int>(partition.categories.size());
    if (conf.rows() != k || conf.cols() != k)
        throw InvalidInput("compute_metrics: confusion matrix size mismatch");

    std::vector<double> iou(k, -1.0), recall(k, -1.0);
    for (int c = 0; c < k; ++c) {
        double tp = conf(c, c);
        double fn = conf.row(c).sum() - tp;
        double fp = conf.col(c).sum() - tp;
        if (tp + fp + fn > 0) iou[c] = 100.0 * tp / (tp + fp + fn);
        if (tp + fn > 0) recall[c] = 100.0 * tp / (tp + fn);
    }

    auto mean_over = [&](const std::set<int>& idx, const std::vector<double>& vals) {
        double sum = 0;
        int n = 0;
        for (int c : idx)
            if (vals[c] >= 0) {
                sum += vals[c];
                ++n;
            }
        return n > 0 ? sum / n : 0.0;
    };

    MetricReport rep;
    rep.per_class_iou = iou;
    rep.miou_base = mean_over(partition.base, iou);
    rep.miou_novel = mean_over(partition.novel, iou);
    rep.hiou = harmonic_mean(rep.miou_base, rep.miou_novel);

    std::set<int> fg;
    for (int c = 0; c < k; ++c)
        if (!partition.foreground_excluded.count(c)) fg.insert(c);
    rep.miou_fg = mean_over(fg, iou);
    rep.macc_fg = mean_over(fg, recall);
    return rep;
}

/// Aligned text table in hIoU / mIoU_base / mIoU_novel order.
inline std::string format_report(const MetricReport& rep, const PartitionSpec& partition) {
    char buf[256];
    std::string out;
    std::snprintf(buf, sizeof(buf), "%-12s %8s %8s %8s %8s %8s\n", "metric", "hIoU", "mIoU_B",
                  "mIoU_N", "mIoU_fg", "mAcc_fg");
    out += buf;
    std::snprintf(buf, sizeof(buf), "%-12s %8.2f %8.2f %8.2f %8.2f %8.2f\n", "overall", rep.hiou,
                  rep.miou_base, rep.miou_novel, rep.miou_fg, rep.macc_fg);
    out += buf;
    for (std::size_t c = 0; c < partition.categories.size(); ++c) {
        if (rep.per_class_iou[c] < 0) continue;
        std::snprintf(buf, sizeof(buf), "%-12s %8.2f%s\n", partition.categories[c].c_str(),
                      rep.per_class_iou[c], partition.novel.count(static_cast<int>(c)) ? "  (novel)" : "");
        out += buf;
    }
    return out;
}

}  // namespace rplc::eval
