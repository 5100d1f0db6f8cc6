#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <unordered_map>
#include <vector>

#include "rplc/common.hpp"
#include "rplc/types.hpp"

namespace rplc::learn {

using Eigen::MatrixXd;
using Eigen::VectorXd;

constexpr int kPointFeatureDim = 9;  // normalized xyz + rgb + voxel mean rgb

/// Per-point input features: coordinates normalized to the scene's bounding
/// box, point color, and the mean color of the point's 0.25 m voxel.
inline MatrixXd point_input_features(const PointScene& scene, double voxel_size = 0.25) {
    const auto n = static_cast<Eigen::Index>(scene.size());
    Vec3 lo = scene.points.front(), hi = scene.points.front();
    for (const auto& p : scene.points) {
        lo = lo.cwiseMin(p);
        hi = hi.cwiseMax(p);
    }
    Vec3 extent = (hi - lo).cwiseMax(1e-9);

    struct VoxelAcc {
        Vec3 sum{0, 0, 0};
        int count = 0;
    };
    std::unordered_map<std::uint64_t, VoxelAcc> voxels;
    auto voxel_key = [&](const Vec3& p) {
        auto qx = static_cast<std::uint64_t>(std::floor((p.x() - lo.x()) / voxel_size));
        auto qy = static_cast<std::uint64_t>(std::floor((p.y() - lo.y()) / voxel_size));
        auto qz = static_cast<std::uint64_t>(std::floor((p.z() - lo.z()) / voxel_size));
        return (qx << 42) ^ (qy << 21) ^ qz;
    };
    for (std::size_t i = 0; i < scene.size(); ++i) {
        auto& acc = voxels[voxel_key(scene.points[i])];
        acc.sum += scene.colors[i];
        ++acc.count;
    }

    MatrixXd x(n, kPointFeatureDim);
    for (Eigen::Index i = 0; i < n; ++i) {
        Vec3 rel = (scene.points[i] - lo).cwiseQuotient(extent);
        const auto& acc = voxels.at(voxel_key(scene.points[i]));
        Vec3 mean = acc.sum / acc.count;
        x.row(i) << rel.x(), rel.y(), rel.z(), scene.colors[i].x(), scene.colors[i].y(),
            scene.colors[i].z(), mean.x(), mean.y(), mean.z();
    }
    return x;
}

struct DenseLayer {
    MatrixXd w;  // in x out
    VectorXd b;  // out
};

/// Point encoder (ReLU MLP) plus the affine VL adapter mapping hidden features
/// into the caption embedding space.
struct ModelParams {
    std::vector<DenseLayer> encoder;  // hidden layers, ReLU
    DenseLayer adapter;               // hidden -> d, no activation
    double logit_scale = 100.0;

    int input_dim() const { return static_cast<int>(encoder.front().w.rows()); }
    int embed_dim() const { return static_cast<int>(adapter.w.cols()); }

    void validate() const {
        if (encoder.empty()) throw InvalidParams("ModelParams: no encoder layers");
        if (logit_scale <= 0) throw InvalidParams("ModelParams: logit_scale must be > 0");
        for (const auto& l : encoder)
            if (!l.w.allFinite() || !l.b.allFinite()) throw InvalidParams("ModelParams: non-finite weights");
        if (!adapter.w.allFinite() || !adapter.b.allFinite())
            throw InvalidParams("ModelParams: non-finite adapter");
    }
};

inline ModelParams init_params(const std::vector<int>& hidden_sizes, int embed_dim,
                               std::uint64_t seed, int input_dim = kPointFeatureDim,
                               double logit_scale = 100.0) {
    if (hidden_sizes.empty()) throw InvalidConfig("init_params: need at least one hidden layer");
    Rng rng(seed);
    ModelParams p;
    p.logit_scale = logit_scale;
    int in = input_dim;
    for (int h : hidden_sizes) {
        DenseLayer l;
        l.w.resize(in, h);
        double scale = std::sqrt(2.0 / in);
        for (Eigen::Index i = 0; i < l.w.size(); ++i) l.w(i) = rng.gaussian() * scale;
        l.b = VectorXd::Zero(h);
        p.encoder.push_back(std::move(l));
        in = h;
    }
    p.adapter.w.resize(in, embed_dim);
    double scale = std::sqrt(1.0 / in);
    for (Eigen::Index i = 0; i < p.adapter.w.size(); ++i) p.adapter.w(i) = rng.gaussian() * scale;
    p.adapter.b = VectorXd::Zero(embed_dim);
    return p;
}

struct ForwardCache {
    std::vector<MatrixXd> activations;  // input + post-ReLU per layer
    MatrixXd raw;                       // pre-normalization adapter output
    VectorXd inv_norm;                  // 1/||raw row||
    MatrixXd features;                  // unit rows
};

inline ForwardCache forward(const ModelParams& params, const MatrixXd& inputs) {
    params.validate();
    ForwardCache c;
    c.activations.push_back(inputs);
    for (const auto& l : params.encoder) {
        MatrixXd z = (c.activations.back() * l.w).rowwise() + l.b.transpose();
        c.activations.push_back(z.cwiseMax(0.0));
    }
    c.raw = (c.activations.back() * params.adapter.w).rowwise() + params.adapter.b.transpose();
    c.inv_norm.resize(c.raw.rows());
    c.features.resizeLike(c.raw);
    for (Eigen::Index i = 0; i < c.raw.rows(); ++i) {
        double n = c.raw.row(i).norm();
        c.inv_norm[i] = 1.0 / std::max(n, 1e-12);
        c.features.row(i) = c.raw.row(i) * c.inv_norm[i];
    }
    return c;
}

/// Deterministic forward pass producing unit-norm point embeddings f^p.
inline MatrixXd encode_points(const ModelParams& params, const PointScene& scene) {
    return forward(params, point_input_features(scene)).features;
}

struct ParamGrads {
    std::vector<DenseLayer> encoder;
    DenseLayer adapter;

    static ParamGrads zeros_like(const ModelParams& p) {
        ParamGrads g;
        for (const auto& l : p.encoder)
            g.encoder.push_back({MatrixXd::Zero(l.w.rows(), l.w.cols()), VectorXd::Zero(l.b.size())});
        g.adapter = {MatrixXd::Zero(p.adapter.w.rows(), p.adapter.w.cols()),
                     VectorXd::Zero(p.adapter.b.size())};
        return g;
    }

    void add(const ParamGrads& o) {
        for (std::size_t i = 0; i < encoder.size(); ++i) {
            encoder[i].w += o.encoder[i].w;
            encoder[i].b += o.encoder[i].b;
        }
        adapter.w += o.adapter.w;
        adapter.b += o.adapter.b;
    }
};

/// Backpropagate dL/d(unit features) through the row normalization, adapter,
/// and encoder.
inline ParamGrads backward(const ModelParams& params, const ForwardCache& cache,
                           const MatrixXd& grad_features) {
    ParamGrads g = ParamGrads::zeros_like(params);

    MatrixXd grad_raw(cache.raw.rows(), cache.raw.cols());
    for (Eigen::Index i = 0; i < cache.raw.rows(); ++i) {
        const auto f = cache.features.row(i);
        const auto gf = grad_features.row(i);
        grad_raw.row(i) = (gf - f * gf.dot(f)) * cache.inv_norm[i];
    }

    const MatrixXd& last_hidden = cache.activations.back();
    g.adapter.w = last_hidden.transpose() * grad_raw;
    g.adapter.b = grad_raw.colwise().sum();
    MatrixXd grad_h = grad_raw * params.adapter.w.transpose();

    for (int l = static_cast<int>(params.encoder.size()) - 1; l >= 0; --l) {
        // ReLU mask from the stored post-activation
        MatrixXd grad_z =
            ((cache.activations[l + 1].array() > 0.0).cast<double>() * grad_h.array()).matrix();
        g.encoder[l].w = cache.activations[l].transpose() * grad_z;
        g.encoder[l].b = grad_z.colwise().sum();
        if (l > 0) grad_h = grad_z * params.encoder[l].w.transpose();
    }
    return g;
}

}  // namespace rplc::learn
