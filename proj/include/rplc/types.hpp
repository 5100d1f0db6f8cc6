#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "rplc/common.hpp"

namespace rplc {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;
using Mat4 = Eigen::Matrix4d;
using DepthMap = Eigen::Matrix<float, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

enum class SourceTag : std::uint8_t {
    det_t = 0,
    det_c = 1,
    sw = 2,
    grit_like = 3,
    kos_like = 4,
    synthetic = 5,
};

inline const char* to_string(SourceTag t) {
    switch (t) {
        case SourceTag::det_t: return "det_t";
        case SourceTag::det_c: return "det_c";
        case SourceTag::sw: return "sw";
        case SourceTag::grit_like: return "grit_like";
        case SourceTag::kos_like: return "kos_like";
        case SourceTag::synthetic: return "synthetic";
    }
    throw InvalidInput("unknown SourceTag");
}

inline SourceTag source_tag_from_string(const std::string& s) {
    if (s == "det_t") return SourceTag::det_t;
    if (s == "det_c") return SourceTag::det_c;
    if (s == "sw") return SourceTag::sw;
    if (s == "grit_like") return SourceTag::grit_like;
    if (s == "kos_like") return SourceTag::kos_like;
    if (s == "synthetic") return SourceTag::synthetic;
    throw InvalidInput("unknown source tag: " + s);
}

/// A posed pinhole camera with a depth map (0 = no surface).
struct CameraView {
    Mat3 intrinsics = Mat3::Identity();
    Mat4 world_to_cam = Mat4::Identity();
    int width = 0;
    int height = 0;
    DepthMap depth;  // height x width, meters

    void validate() const {
        if (width <= 0 || height <= 0) throw InvalidInput("CameraView: non-positive image size");
        if (intrinsics(0, 0) <= 0 || intrinsics(1, 1) <= 0)
            throw InvalidInput("CameraView: non-positive focal length");
        Mat3 r = world_to_cam.topLeftCorner<3, 3>();
        if ((r * r.transpose() - Mat3::Identity()).cwiseAbs().maxCoeff() > 1e-6)
            throw InvalidInput("CameraView: rotation block not orthonormal");
        if (depth.rows() != height || depth.cols() != width)
            throw InvalidInput("CameraView: depth map shape mismatch");
        if (depth.size() > 0 && depth.minCoeff() < 0.0f)
            throw InvalidInput("CameraView: negative depth");
    }
};

struct PointScene {
    std::string scene_id;
    std::vector<Vec3> points;   // world frame, meters
    std::vector<Vec3> colors;   // rgb in [0,1]
    std::vector<int> labels;    // category index or kIgnoreLabel
    std::vector<CameraView> views;

    std::size_t size() const { return points.size(); }

    void validate(int category_count = -1) const {
        if (points.empty()) throw InvalidInput("PointScene: empty point cloud");
        if (colors.size() != points.size() || labels.size() != points.size())
            throw InvalidInput("PointScene: array length mismatch");
        for (const auto& p : points)
            if (!p.allFinite()) throw InvalidInput("PointScene: non-finite coordinate");
        for (int l : labels)
            if (l != kIgnoreLabel && (l < 0 || (category_count >= 0 && l >= category_count)))
                throw InvalidInput("PointScene: label out of range");
        for (const auto& v : views) v.validate();
    }
};

/// 2D caption region, pixel coordinates, half-open box.
struct Region2D {
    double x_min = 0, y_min = 0, x_max = 0, y_max = 0;
    std::string caption;
    SourceTag source = SourceTag::synthetic;
    int view_id = 0;

    void validate(int width, int height) const {
        if (!(x_min < x_max) || !(y_min < y_max)) throw InvalidInput("Region2D: degenerate box");
        if (x_min < 0 || y_min < 0 || x_max > width || y_max > height)
            throw InvalidInput("Region2D: box outside image bounds");
        if (caption.empty()) throw InvalidInput("Region2D: empty caption");
    }
};

/// A region-level 3D-language pair: point indices of one scene tied to a caption.
struct RegionLanguagePair {
    std::string scene_id;
    std::vector<std::uint32_t> point_indices;  // sorted, unique
    std::string caption;
    SourceTag source = SourceTag::synthetic;
    int view_id = 0;

    void validate(std::size_t point_count) const {
        if (point_indices.empty()) throw InvalidInput("RegionLanguagePair: empty point set");
        for (std::size_t i = 0; i < point_indices.size(); ++i) {
            if (point_indices[i] >= point_count)
                throw InvalidInput("RegionLanguagePair: point index out of range");
            if (i > 0 && point_indices[i] <= point_indices[i - 1])
                throw InvalidInput("RegionLanguagePair: indices not sorted unique");
        }
        if (caption.empty()) throw InvalidInput("RegionLanguagePair: empty caption");
    }
};

}  // namespace rplc
