#pragma once

#include <cmath>
#include <vector>

#include "rplc/types.hpp"

namespace rplc::geom {

struct ProjectedPoint {
    double u = 0, v = 0;      // continuous pixel coordinates
    double cam_depth = 0;     // meters along the camera z axis
    bool visible = false;
};

/// Project every scene point into a view and run the z-buffer visibility test.
/// A point is visible iff it lies in front of the camera, inside the image,
/// and within z_tolerance of the view's depth map at its pixel.
inline std::vector<ProjectedPoint> project_points(const PointScene& scene, int view_id,
                                                  double z_tolerance) {
    if (view_id < 0 || static_cast<std::size_t>(view_id) >= scene.views.size())
        throw NotFound("project_points: invalid view_id");
    if (z_tolerance <= 0) throw InvalidInput("project_points: z_tolerance must be > 0");
    const CameraView& view = scene.views[view_id];

    const Mat3 r = view.world_to_cam.topLeftCorner<3, 3>();
    const Vec3 t = view.world_to_cam.topRightCorner<3, 1>();
    const Mat3& k = view.intrinsics;

    std::vector<ProjectedPoint> out(scene.size());
    for (std::size_t i = 0; i < scene.size(); ++i) {
        const Vec3& p = scene.points[i];
        if (!p.allFinite()) throw InvalidInput("project_points: non-finite point");
        Vec3 pc = r * p + t;
        ProjectedPoint& pp = out[i];
        pp.cam_depth = pc.z();
        if (pc.z() <= 0) continue;
        Vec3 h = k * pc;
        pp.u = h.x() / h.z();
        pp.v = h.y() / h.z();
        if (pp.u < 0 || pp.u >= view.width || pp.v < 0 || pp.v >= view.height) continue;
        int xi = static_cast<int>(std::floor(pp.u));
        int yi = static_cast<int>(std::floor(pp.v));
        pp.visible = std::abs(pp.cam_depth - static_cast<double>(view.depth(yi, xi))) <= z_tolerance;
    }
    return out;
}

/// Inverse of project_points for a single pixel observation.
inline Vec3 back_project(const CameraView& view, double u, double v, double cam_depth) {
    Vec3 pc = view.intrinsics.inverse() * Vec3(u, v, 1.0) * cam_depth;
    const Mat3 r = view.world_to_cam.topLeftCorner<3, 3>();
    const Vec3 t = view.world_to_cam.topRightCorner<3, 1>();
    return r.transpose() * (pc - t);
}

struct AssociationResult {
    std::vector<RegionLanguagePair> pairs;
    std::size_t dropped_small = 0;  // regions below min_points
};

/// Associate the visible projected points falling inside each region's box
/// with the region's caption. Boxes are half-open: u == x_max is outside.
inline AssociationResult associate_regions(const PointScene& scene, int view_id,
                                           const std::vector<Region2D>& regions, int min_points,
                                           double z_tolerance) {
    if (min_points < 1) throw InvalidInput("associate_regions: min_points must be >= 1");
    const std::vector<ProjectedPoint> proj = project_points(scene, view_id, z_tolerance);

    AssociationResult res;
    for (const Region2D& reg : regions) {
        reg.validate(scene.views[view_id].width, scene.views[view_id].height);
        RegionLanguagePair pair;
        pair.scene_id = scene.scene_id;
        pair.caption = reg.caption;
        pair.source = reg.source;
        pair.view_id = view_id;
        for (std::size_t i = 0; i < proj.size(); ++i) {
            const ProjectedPoint& pp = proj[i];
            if (!pp.visible) continue;
            if (pp.u >= reg.x_min && pp.u < reg.x_max && pp.v >= reg.y_min && pp.v < reg.y_max)
                pair.point_indices.push_back(static_cast<std::uint32_t>(i));
        }
        if (pair.point_indices.size() < static_cast<std::size_t>(min_points)) {
            ++res.dropped_small;
            continue;
        }
        res.pairs.push_back(std::move(pair));
    }
    return res;
}

}  // namespace rplc::geom
