#include <catch2/catch_amalgamated.hpp>

#include "rplc/lang.hpp"
#include "rplc/train.hpp"

using namespace rplc;
using namespace rplc::learn;

namespace {

PointScene tiny_scene(std::uint64_t seed, int n_per_cluster = 40) {
    Rng rng(seed);
    PointScene scene;
    scene.scene_id = "toy";
    for (int cluster = 0; cluster < 2; ++cluster) {
        Vec3 center = cluster == 0 ? Vec3(0.5, 0.5, 0.5) : Vec3(3.5, 3.5, 1.5);
        Vec3 color = cluster == 0 ? Vec3(0.8, 0.2, 0.2) : Vec3(0.2, 0.2, 0.8);
        for (int i = 0; i < n_per_cluster; ++i) {
            scene.points.push_back(center + Vec3(rng.gaussian(), rng.gaussian(), rng.gaussian()) * 0.2);
            scene.colors.push_back((color + Vec3::Constant(rng.uniform(-0.05, 0.05)))
                                       .cwiseMax(0.0)
                                       .cwiseMin(1.0));
            scene.labels.push_back(cluster);
        }
    }
    return scene;
}

TrainScene toy_train_scene(const PointScene& scene, const lang::EmbeddingProvider& provider,
                           int n_per_cluster = 40) {
    TrainScene ts;
    ts.inputs = point_input_features(scene);
    ts.base_labels.assign(scene.size(), kIgnoreLabel);
    CaptionGroup group;
    group.caption_embeddings.resize(2, provider.dim());
    group.caption_embeddings.row(0) = provider.embed_text("a red crate");
    group.caption_embeddings.row(1) = provider.embed_text("a blue barrel");
    for (int cluster = 0; cluster < 2; ++cluster) {
        Region reg;
        for (int i = 0; i < n_per_cluster; ++i)
            reg.point_indices.push_back(static_cast<std::uint32_t>(cluster * n_per_cluster + i));
        reg.target = cluster;
        group.regions.push_back(reg);
    }
    ts.caption_groups.push_back(group);
    return ts;
}

TrainConfig toy_config() {
    TrainConfig cfg;
    cfg.loss_kind = LossKind::rpdc;
    cfg.supervised_weight = 0.0;
    cfg.steps = 60;
    cfg.hidden_sizes = {32, 32};
    cfg.logit_scale = 50.0;
    cfg.seed = 5;
    return cfg;
}

}  // namespace

TEST_CASE("encoded point features are unit rows") {
    auto scene = tiny_scene(1);
    auto params = init_params({16, 16}, 8, 3);
    auto feats = encode_points(params, scene);
    REQUIRE(feats.rows() == static_cast<Eigen::Index>(scene.size()));
    REQUIRE(feats.cols() == 8);
    for (Eigen::Index i = 0; i < feats.rows(); ++i)
        CHECK(feats.row(i).norm() == Catch::Approx(1.0).margin(1e-9));
}

TEST_CASE("zeroed encoder collapses every feature to the adapter bias direction") {
    auto scene = tiny_scene(2);
    ModelParams p;
    DenseLayer l;
    l.w = Eigen::MatrixXd::Zero(kPointFeatureDim, 4);
    l.b = Eigen::VectorXd::Zero(4);
    p.encoder.push_back(l);
    p.adapter.w = Eigen::MatrixXd::Zero(4, 6);
    p.adapter.b = Eigen::VectorXd::LinSpaced(6, 1.0, 6.0);
    auto feats = encode_points(p, scene);
    Eigen::VectorXd expected = p.adapter.b.normalized();
    for (Eigen::Index i = 0; i < feats.rows(); ++i)
        CHECK((feats.row(i).transpose() - expected).norm() < 1e-12);
}

TEST_CASE("encode_points is equivariant under point permutation") {
    auto scene = tiny_scene(3);
    auto params = init_params({16}, 8, 9);
    auto feats = encode_points(params, scene);

    PointScene permuted = scene;
    std::vector<std::size_t> perm(scene.size());
    for (std::size_t i = 0; i < perm.size(); ++i) perm[i] = i;
    Rng rng(4);
    rng.shuffle(perm);
    for (std::size_t i = 0; i < perm.size(); ++i) {
        permuted.points[i] = scene.points[perm[i]];
        permuted.colors[i] = scene.colors[perm[i]];
        permuted.labels[i] = scene.labels[perm[i]];
    }
    auto feats_p = encode_points(params, permuted);
    for (std::size_t i = 0; i < perm.size(); ++i)
        CHECK((feats_p.row(static_cast<Eigen::Index>(i)) -
               feats.row(static_cast<Eigen::Index>(perm[i])))
                  .norm() < 1e-12);
}

TEST_CASE("model backward matches finite differences on a linear probe") {
    auto scene = tiny_scene(5, 12);
    auto inputs = point_input_features(scene);
    auto params = init_params({10, 8}, 6, 11);
    Rng rng(17);
    Eigen::MatrixXd probe(inputs.rows(), 6);
    for (Eigen::Index i = 0; i < probe.size(); ++i) probe(i) = rng.gaussian();

    auto loss_of = [&](const ModelParams& p) {
        return (forward(p, inputs).features.cwiseProduct(probe)).sum();
    };
    ForwardCache cache = forward(params, inputs);
    ParamGrads grads = backward(params, cache, probe);

    const double h = 1e-6;
    auto check_coord = [&](double* slot, double analytic) {
        double orig = *slot;
        *slot = orig + h;
        double lp = loss_of(params);
        *slot = orig - h;
        double lm = loss_of(params);
        *slot = orig;
        double numeric = (lp - lm) / (2 * h);
        CHECK(std::abs(numeric - analytic) <
              1e-5 * std::max({std::abs(numeric), std::abs(analytic), 1.0}));
    };
    for (int trial = 0; trial < 10; ++trial) {
        auto r = rng.uniform_int(params.encoder[0].w.rows());
        auto c = rng.uniform_int(params.encoder[0].w.cols());
        check_coord(&params.encoder[0].w(r, c), grads.encoder[0].w(r, c));
    }
    for (int trial = 0; trial < 10; ++trial) {
        auto r = rng.uniform_int(params.adapter.w.rows());
        auto c = rng.uniform_int(params.adapter.w.cols());
        check_coord(&params.adapter.w(r, c), grads.adapter.w(r, c));
    }
    check_coord(&params.adapter.b(2), grads.adapter.b(2));
    check_coord(&params.encoder[1].b(3), grads.encoder[1].b(3));
}

TEST_CASE("training on a separable toy drives the loss down") {
    auto provider = lang::EmbeddingProvider::synthetic(16, 2);
    auto scene = tiny_scene(7);
    std::vector<TrainScene> scenes = {toy_train_scene(scene, provider)};
    auto cfg = toy_config();
    cfg.steps = 250;
    auto result = train(cfg, scenes, Eigen::MatrixXd(), 16);
    REQUIRE(result.log.size() == 250);
    double initial = result.log.front().loss_total;
    double final_loss = result.log.back().loss_total;
    CHECK(final_loss < 0.2 * initial);
    CHECK(result.log.front().step == 1);
    CHECK(result.log.back().step == 250);
}

TEST_CASE("training is deterministic for a fixed config") {
    auto provider = lang::EmbeddingProvider::synthetic(16, 2);
    auto scene = tiny_scene(8);
    std::vector<TrainScene> scenes = {toy_train_scene(scene, provider)};
    auto cfg = toy_config();
    cfg.steps = 20;
    auto a = train(cfg, scenes, Eigen::MatrixXd(), 16);
    auto b = train(cfg, scenes, Eigen::MatrixXd(), 16);
    CHECK(a.params.adapter.w == b.params.adapter.w);
    CHECK(a.params.encoder[0].w == b.params.encoder[0].w);
    for (std::size_t i = 0; i < a.log.size(); ++i)
        CHECK(a.log[i].loss_total == b.log[i].loss_total);

    auto cfg2 = cfg;
    cfg2.seed = 6;
    auto c = train(cfg2, scenes, Eigen::MatrixXd(), 16);
    CHECK(a.params.adapter.w != c.params.adapter.w);
}

TEST_CASE("supervised term contributes when base labels are present") {
    auto provider = lang::EmbeddingProvider::synthetic(16, 2);
    auto scene = tiny_scene(9);
    auto ts = toy_train_scene(scene, provider);
    for (std::size_t i = 0; i < scene.size(); ++i) ts.base_labels[i] = scene.labels[i];
    Eigen::MatrixXd base_emb(2, 16);
    base_emb.row(0) = provider.embed_text("crate");
    base_emb.row(1) = provider.embed_text("barrel");

    auto cfg = toy_config();
    cfg.steps = 5;
    cfg.supervised_weight = 1.0;
    auto with_sup = train(cfg, {ts}, base_emb, 16);
    CHECK(with_sup.log.front().loss_sup > 0.0);

    cfg.supervised_weight = 0.0;
    auto without = train(cfg, {ts}, base_emb, 16);
    CHECK(without.log.front().loss_sup == 0.0);
    CHECK(with_sup.log.front().loss_total > without.log.front().loss_total);
}

TEST_CASE("an absurd learning rate raises DivergedError with the step index") {
    auto provider = lang::EmbeddingProvider::synthetic(16, 2);
    auto scene = tiny_scene(10);
    std::vector<TrainScene> scenes = {toy_train_scene(scene, provider)};
    auto cfg = toy_config();
    cfg.steps = 10;
    cfg.learning_rate = 1e150;
    CHECK_THROWS_AS(train(cfg, scenes, Eigen::MatrixXd(), 16), DivergedError);
}

TEST_CASE("train input validation") {
    auto provider = lang::EmbeddingProvider::synthetic(16, 2);
    auto cfg = toy_config();
    CHECK_THROWS_AS(train(cfg, {}, Eigen::MatrixXd(), 16), InvalidInput);

    auto scene = tiny_scene(11);
    TrainScene no_pairs;
    no_pairs.inputs = point_input_features(scene);
    no_pairs.base_labels.assign(scene.size(), kIgnoreLabel);
    CHECK_THROWS_AS(train(cfg, {no_pairs}, Eigen::MatrixXd(), 16), InvalidInput);

    std::vector<TrainScene> ok = {toy_train_scene(scene, provider)};
    auto bad = cfg;
    bad.steps = 0;
    CHECK_THROWS_AS(train(bad, ok, Eigen::MatrixXd(), 16), InvalidConfig);
    bad = cfg;
    bad.learning_rate = 0.0;
    CHECK_THROWS_AS(train(bad, ok, Eigen::MatrixXd(), 16), InvalidConfig);
    bad = cfg;
    bad.hidden_sizes.clear();
    CHECK_THROWS_AS(train(bad, ok, Eigen::MatrixXd(), 16), InvalidConfig);
}

TEST_CASE("loss kind string round-trip") {
    CHECK(loss_kind_from_string("rpdc") == LossKind::rpdc);
    CHECK(loss_kind_from_string("pdc") == LossKind::pdc);
    CHECK(loss_kind_from_string("clip") == LossKind::clip_style);
    CHECK(loss_kind_from_string("clip_style") == LossKind::clip_style);
    CHECK_THROWS_AS(loss_kind_from_string("mystery"), InvalidConfig);
    CHECK(std::string(to_string(LossKind::rpdc)) == "rpdc");
}
