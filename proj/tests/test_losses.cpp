#include <catch2/catch_amalgamated.hpp>

#include "rplc/losses.hpp"

using namespace rplc;
using namespace rplc::learn;

namespace {

LossInstance random_instance(std::uint64_t seed, int n_p, int n_t, int d, int n_regions) {
    Rng rng(seed);
    LossInstance inst;
    inst.point_features.resize(n_p, d);
    inst.caption_embeddings.resize(n_t, d);
    for (Eigen::Index i = 0; i < inst.point_features.size(); ++i)
        inst.point_features(i) = rng.gaussian();
    for (Eigen::Index i = 0; i < inst.caption_embeddings.size(); ++i)
        inst.caption_embeddings(i) = rng.gaussian();
    inst.point_features.rowwise().normalize();
    inst.caption_embeddings.rowwise().normalize();
    for (int r = 0; r < n_regions; ++r) {
        Region reg;
        for (int i = 0; i < n_p; ++i)
            if (rng.uniform() < 0.4) reg.point_indices.push_back(static_cast<std::uint32_t>(i));
        if (reg.point_indices.empty())
            reg.point_indices.push_back(static_cast<std::uint32_t>(rng.uniform_int(n_p)));
        reg.target = static_cast<int>(rng.uniform_int(n_t));
        inst.regions.push_back(std::move(reg));
    }
    return inst;
}

// Two orthogonal captions, one point aligned with neither: softmax is uniform
// and the loss is ln 2.
LossInstance orthogonal_instance() {
    LossInstance inst;
    inst.point_features = Eigen::MatrixXd::Zero(1, 3);
    inst.point_features(0, 2) = 1.0;
    inst.caption_embeddings = Eigen::MatrixXd::Zero(2, 3);
    inst.caption_embeddings(0, 0) = 1.0;
    inst.caption_embeddings(1, 1) = 1.0;
    inst.regions = {Region{{0}, 0}};
    return inst;
}

}  // namespace

TEST_CASE("orthogonal setup gives ln n_t for every contrastive loss") {
    auto inst = orthogonal_instance();
    CHECK(clip_style_loss(inst, 100.0).value == Catch::Approx(std::log(2.0)).epsilon(1e-12));
    CHECK(pdc_loss(inst, 100.0).value == Catch::Approx(std::log(2.0)).epsilon(1e-12));
    // a single region of one point has alpha = n_t * 1 / 1 = 2
    CHECK(rpdc_loss(inst, 50.0).value == Catch::Approx(2.0 * std::log(2.0)).epsilon(1e-12));
}

TEST_CASE("aligned feature with large lambda drives the loss to zero") {
    LossInstance inst;
    inst.point_features = Eigen::MatrixXd::Zero(1, 3);
    inst.point_features(0, 0) = 1.0;
    inst.caption_embeddings = Eigen::MatrixXd::Zero(2, 3);
    inst.caption_embeddings(0, 0) = 1.0;
    inst.caption_embeddings(1, 1) = 1.0;
    inst.regions = {Region{{0}, 0}};
    CHECK(clip_style_loss(inst, 100.0).value < 1e-12);
    CHECK(pdc_loss(inst, 100.0).value < 1e-12);
}

TEST_CASE("singleton regions make pdc identical to clip_style") {
    auto inst = random_instance(21, 12, 4, 8, 0);
    Rng rng(99);
    for (int r = 0; r < 5; ++r)
        inst.regions.push_back(Region{{static_cast<std::uint32_t>(rng.uniform_int(12))},
                                      static_cast<int>(rng.uniform_int(4))});
    auto a = clip_style_loss(inst, 40.0);
    auto b = pdc_loss(inst, 40.0);
    CHECK(std::abs(a.value - b.value) < 1e-9);
    CHECK((a.grad_points - b.grad_points).cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("equal cardinalities and n_t regions make rpdc identical to pdc") {
    // 4 regions of 3 points each, 4 captions: alpha = 4*3/12 = 1 for every region
    Rng rng(7);
    auto inst = random_instance(7, 12, 4, 8, 0);
    for (int r = 0; r < 4; ++r) {
        Region reg;
        for (int k = 0; k < 3; ++k) reg.point_indices.push_back(static_cast<std::uint32_t>(3 * r + k));
        reg.target = r;
        inst.regions.push_back(reg);
    }
    auto a = pdc_loss(inst, 30.0);
    auto b = rpdc_loss(inst, 30.0);
    CHECK(std::abs(a.value - b.value) < 1e-9);
    CHECK((a.grad_points - b.grad_points).cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("region_norm_factor worked example: sizes 10 and 30, two captions") {
    auto inst = random_instance(3, 40, 2, 6, 0);
    Region small, big;
    for (std::uint32_t i = 0; i < 10; ++i) small.point_indices.push_back(i);
    for (std::uint32_t i = 10; i < 40; ++i) big.point_indices.push_back(i);
    small.target = 0;
    big.target = 1;
    inst.regions = {small, big};
    CHECK(region_norm_factor(inst, 0) == Catch::Approx(0.5));
    CHECK(region_norm_factor(inst, 1) == Catch::Approx(1.5));
}

TEST_CASE("rpdc equalizes per-point gradient rows across region sizes") {
    // one instance, two regions with the same target; the second region's
    // points are k-fold feature duplicates of the first's
    for (int k : {2, 5, 10}) {
        const int c = 4, d = 8, n_t = 3;
        Rng rng(1000 + k);
        Eigen::MatrixXd feats(c + c * k, d);
        for (int i = 0; i < c; ++i) {
            Eigen::RowVectorXd row(d);
            for (int j = 0; j < d; ++j) row[j] = rng.gaussian();
            row.normalize();
            feats.row(i) = row;
            for (int rep = 0; rep < k; ++rep) feats.row(c + i * k + rep) = row;
        }
        LossInstance inst;
        inst.point_features = feats;
        inst.caption_embeddings.resize(n_t, d);
        for (Eigen::Index i = 0; i < inst.caption_embeddings.size(); ++i)
            inst.caption_embeddings(i) = rng.gaussian();
        inst.caption_embeddings.rowwise().normalize();
        Region a, b;
        for (std::uint32_t i = 0; i < c; ++i) a.point_indices.push_back(i);
        for (std::uint32_t i = c; i < static_cast<std::uint32_t>(c + c * k); ++i)
            b.point_indices.push_back(i);
        a.target = b.target = 1;
        inst.regions = {a, b};

        auto r = rpdc_loss(inst, 25.0);
        auto p = pdc_loss(inst, 25.0);
        // rpdc: a duplicated point's row matches its original's row
        for (int i = 0; i < c; ++i) {
            CHECK((r.grad_points.row(i) - r.grad_points.row(c + i * k)).cwiseAbs().maxCoeff() < 1e-9);
            // pdc: the larger region's rows are k times weaker
            CHECK((p.grad_points.row(i) - static_cast<double>(k) * p.grad_points.row(c + i * k))
                      .cwiseAbs()
                      .maxCoeff() < 1e-9);
        }
    }
}

TEST_CASE("pooled clip gradient is uniform within a region") {
    auto inst = random_instance(5, 20, 3, 8, 2);
    auto res = clip_style_loss(inst, 60.0);
    for (const auto& reg : inst.regions) {
        // points belonging to exactly this one region share a row
        for (auto i : reg.point_indices) {
            bool shared = false;
            for (const auto& other : inst.regions) {
                if (&other == &reg) continue;
                for (auto j : other.point_indices) shared |= (i == j);
            }
            if (shared) continue;
            std::uint32_t anchor = reg.point_indices[0];
            bool anchor_shared = false;
            for (const auto& other : inst.regions) {
                if (&other == &reg) continue;
                for (auto j : other.point_indices) anchor_shared |= (anchor == j);
            }
            if (anchor_shared) continue;
            CHECK((res.grad_points.row(i) - res.grad_points.row(anchor)).norm() < 1e-9);
        }
    }
    // points outside every region get zero gradient
    std::vector<char> covered(20, 0);
    for (const auto& reg : inst.regions)
        for (auto i : reg.point_indices) covered[i] = 1;
    for (int i = 0; i < 20; ++i)
        if (!covered[i]) CHECK(res.grad_points.row(i).norm() == 0.0);
}

TEST_CASE("analytic gradients pass finite differences") {
    for (std::uint64_t seed : {1u, 2u, 3u}) {
        auto inst = random_instance(seed, 24, 5, 10, 4);
        auto wrap = [&inst](auto fn) {
            return [&inst, fn](const Eigen::MatrixXd& f) {
                LossInstance v = inst;
                v.point_features = f;
                return fn(v, 35.0);
            };
        };
        CHECK(finite_diff_check(wrap([](const LossInstance& v, double l) { return clip_style_loss(v, l); }),
                                inst.point_features, 1e-5) < 1e-4);
        CHECK(finite_diff_check(wrap([](const LossInstance& v, double l) { return pdc_loss(v, l); }),
                                inst.point_features, 1e-5) < 1e-4);
        CHECK(finite_diff_check(wrap([](const LossInstance& v, double l) { return rpdc_loss(v, l); }),
                                inst.point_features, 1e-5) < 1e-4);
    }
}

TEST_CASE("finite differences flag a corrupted gradient") {
    auto inst = random_instance(9, 16, 4, 8, 3);
    auto fn = [&inst](const Eigen::MatrixXd& f) {
        LossInstance v = inst;
        v.point_features = f;
        auto res = pdc_loss(v, 35.0);
        res.grad_points(0, 0) += 0.1;
        return res;
    };
    CHECK(finite_diff_check(fn, inst.point_features, 1e-5) > 1e-2);
}

TEST_CASE("supervised loss matches finite differences and handles IGNORE") {
    Rng rng(12);
    const int n_p = 20, n_t = 4, d = 8;
    Eigen::MatrixXd feats(n_p, d), emb(n_t, d);
    for (Eigen::Index i = 0; i < feats.size(); ++i) feats(i) = rng.gaussian();
    for (Eigen::Index i = 0; i < emb.size(); ++i) emb(i) = rng.gaussian();
    feats.rowwise().normalize();
    emb.rowwise().normalize();
    std::vector<int> labels(n_p);
    for (auto& l : labels)
        l = rng.uniform() < 0.25 ? kIgnoreLabel : static_cast<int>(rng.uniform_int(n_t));

    auto fn = [&](const Eigen::MatrixXd& f) { return supervised_ce_loss(f, emb, labels, 25.0); };
    CHECK(finite_diff_check(fn, feats, 1e-5) < 1e-4);

    auto res = supervised_ce_loss(feats, emb, labels, 25.0);
    for (int i = 0; i < n_p; ++i)
        if (labels[i] == kIgnoreLabel) CHECK(res.grad_points.row(i).norm() == 0.0);

    std::vector<int> all_ignore(n_p, kIgnoreLabel);
    auto empty = supervised_ce_loss(feats, emb, all_ignore, 25.0);
    CHECK(empty.value == 0.0);
    CHECK(empty.grad_points.cwiseAbs().maxCoeff() == 0.0);

    std::vector<int> bad = labels;
    bad[0] = n_t;
    CHECK_THROWS_AS(supervised_ce_loss(feats, emb, bad, 25.0), InvalidInput);
    CHECK_THROWS_AS(supervised_ce_loss(feats, emb, std::vector<int>{0}, 25.0), InvalidInput);
}

TEST_CASE("loss input validation failures") {
    auto inst = random_instance(1, 10, 3, 8, 2);
    LossInstance no_regions = inst;
    no_regions.regions.clear();
    CHECK_THROWS_AS(clip_style_loss(no_regions, 10.0), InvalidInput);
    CHECK_THROWS_AS(pdc_loss(no_regions, 10.0), InvalidInput);
    CHECK_THROWS_AS(rpdc_loss(no_regions, 10.0), InvalidInput);

    LossInstance bad_target = inst;
    bad_target.regions[0].target = 3;
    CHECK_THROWS_AS(pdc_loss(bad_target, 10.0), InvalidInput);

    LossInstance bad_index = inst;
    bad_index.regions[0].point_indices.push_back(10);
    CHECK_THROWS_AS(pdc_loss(bad_index, 10.0), InvalidInput);

    LossInstance empty_region = inst;
    empty_region.regions[0].point_indices.clear();
    CHECK_THROWS_AS(pdc_loss(empty_region, 10.0), InvalidInput);
}

TEST_CASE("finite_diff_check rejects a non-positive step") {
    auto inst = random_instance(2, 6, 2, 4, 1);
    auto fn = [&inst](const Eigen::MatrixXd& f) {
        LossInstance v = inst;
        v.point_features = f;
        return pdc_loss(v, 10.0);
    };
    CHECK_THROWS_AS(finite_diff_check(fn, inst.point_features, 0.0), InvalidInput);
}
