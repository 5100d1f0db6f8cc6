#pragma once

#include <algorithm>
#include <map>
#include <vector>

#include "rplc/common.hpp"
#include "rplc/types.hpp"

namespace rplc::fusion {

struct FusionConfig {
    double t_low = 0.0;
    double t_high = 0.2;
    double epsilon = 0.72;  // minimum primary-source share of the fused set
    std::uint64_t seed = 0;
    std::vector<SourceTag> candidate_order;
    // When false, overlap is measured against the primary pairs only instead of
    // the growing fused set.
    bool compare_against_growing = true;

    void validate() const {
        if (!(t_low < t_high)) throw InvalidConfig("fusion: t_low must be < t_high");
        if (t_low < 0 || t_high > 1.0 + 1e-12) throw InvalidConfig("fusion: thresholds outside [0,1]");
        if (epsilon <= 0 || epsilon > 1) throw InvalidConfig("fusion: epsilon outside (0,1]");
    }
};

struct FusionReport {
    std::size_t kept_primary = 0;
    std::map<SourceTag, std::size_t> kept_per_source;
    std::size_t dropped_overlap = 0;
    std::size_t dropped_ratio = 0;
    double achieved_primary_ratio = 0.0;
};

/// |a ∩ b| / |a ∪ b| for sorted unique index sets.
inline double pointset_iou(const std::vector<std::uint32_t>& a, const std::vector<std::uint32_t>& b) {
    if (a.empty() || b.empty()) throw InvalidInput("pointset_iou: empty set");
    std::size_t inter = 0, i = 0, j = 0;
    while (i < a.size() && j < b.size()) {
        if (a[i] == b[j]) { ++inter; ++i; ++j; }
        else if (a[i] < b[j]) ++i;
        else ++j;
    }
    std::size_t uni = a.size() + b.size() - inter;
    return static_cast<double>(inter) / static_cast<double>(uni);
}

/// τ̂ for a candidate pair: its maximum IoU against a reference pair list.
inline double max_overlap_ratio(const RegionLanguagePair& candidate,
                                const std::vector<RegionLanguagePair>& reference_pairs) {
    double best = 0.0;
    for (const auto& ref : reference_pairs) {
        if (ref.scene_id != candidate.scene_id)
            throw InvalidInput("max_overlap_ratio: scene mismatch");
        best = std::max(best, pointset_iou(candidate.point_indices, ref.point_indices));
    }
    return best;
}

struct FusionResult {
    std::vector<RegionLanguagePair> fused;
    FusionReport report;
};

/// Supplementary-oriented fusion: keep candidate pairs whose max point-set IoU
/// against the (growing) fused set lies in [t_low, t_high), then subsample the
/// accepted candidates so the primary pairs keep at least an epsilon share.
inline FusionResult sfusion(const std::vector<RegionLanguagePair>& primary,
                            const std::map<SourceTag, std::vector<RegionLanguagePair>>& candidates_by_source,
                            const FusionConfig& cfg) {
    cfg.validate();
    for (const auto& [tag, list] : candidates_by_source) {
        bool covered = std::find(cfg.candidate_order.begin(), cfg.candidate_order.end(), tag) !=
                       cfg.candidate_order.end();
        if (!covered) throw InvalidConfig("sfusion: candidate source not in candidate_order");
        (void)list;
    }

    FusionResult res;
    res.fused = primary;
    res.report.kept_primary = primary.size();

    struct Accepted {
        RegionLanguagePair pair;
        SourceTag source;
    };
    std::vector<Accepted> accepted;

    for (SourceTag tag : cfg.candidate_order) {
        auto it = candidates_by_source.find(tag);
        if (it == candidates_by_source.end()) continue;
        for (const RegionLanguagePair& cand : it->second) {
            if (!primary.empty() && cand.scene_id != primary.front().scene_id)
                throw InvalidInput("sfusion: scene mismatch");
            double tau = cfg.compare_against_growing ? max_overlap_ratio(cand, res.fused)
                                                     : max_overlap_ratio(cand, primary);
            if (tau >= cfg.t_low && tau < cfg.t_high) {
                res.fused.push_back(cand);
                accepted.push_back({cand, tag});
            } else {
                ++res.report.dropped_overlap;
            }
        }
    }

    // Primary-ratio enforcement. With no primary pairs there is nothing to enforce.
    std::size_t np = primary.size();
    std::size_t na = accepted.size();
    std::vector<char> keep(na, 1);
    if (np > 0 && na > 0 &&
        static_cast<double>(np) / static_cast<double>(np + na) < cfg.epsilon) {
        auto n_keep = static_cast<std::size_t>(
            std::floor(static_cast<double>(np) * (1.0 - cfg.epsilon) / cfg.epsilon));
        n_keep = std::min(n_keep, na);
        std::vector<std::size_t> order(na);
        for (std::size_t i = 0; i < na; ++i) order[i] = i;
        Rng rng(cfg.seed);
        rng.shuffle(order);
        std::fill(keep.begin(), keep.end(), 0);
        for (std::size_t i = 0; i < n_keep; ++i) keep[order[i]] = 1;
        res.report.dropped_ratio = na - n_keep;

        res.fused = primary;
        for (std::size_t i = 0; i < na; ++i)
            if (keep[i]) res.fused.push_back(accepted[i].pair);
    }

    for (std::size_t i = 0; i < na; ++i)
        if (keep[i]) ++res.report.kept_per_source[accepted[i].source];
    res.report.achieved_primary_ratio =
        res.fused.empty() ? 0.0 : static_cast<double>(np) / static_cast<double>(res.fused.size());
    return res;
}

}  // namespace rplc::fusion
