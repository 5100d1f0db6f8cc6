#include <catch2/catch_amalgamated.hpp>

#include "rplc/geom.hpp"

using namespace rplc;

namespace {

// Camera at the origin looking down +z, world frame == camera frame.
PointScene axis_scene(double focal = 100.0, int w = 100, int h = 80) {
    PointScene scene;
    scene.scene_id = "axis";
    CameraView view;
    view.width = w;
    view.height = h;
    view.intrinsics << focal, 0, w / 2.0, 0, focal, h / 2.0, 0, 0, 1;
    view.world_to_cam.setIdentity();
    view.depth = DepthMap::Constant(h, w, 2.0f);
    scene.views.push_back(view);
    return scene;
}

void add_point(PointScene& scene, const Vec3& p, int label = 0) {
    scene.points.push_back(p);
    scene.colors.push_back(Vec3(0.5, 0.5, 0.5));
    scene.labels.push_back(label);
}

// Independent projection math for the oracle tests.
struct OracleProj {
    double u, v, z;
};
OracleProj oracle_project(const CameraView& view, const Vec3& p) {
    Eigen::Vector4d ph(p.x(), p.y(), p.z(), 1.0);
    Eigen::Vector4d pc = view.world_to_cam * ph;
    double z = pc.z();
    double u = view.intrinsics(0, 0) * pc.x() / z + view.intrinsics(0, 2);
    double v = view.intrinsics(1, 1) * pc.y() / z + view.intrinsics(1, 2);
    return {u, v, z};
}

PointScene random_scene(std::uint64_t seed, int n_points = 100) {
    Rng rng(seed);
    PointScene scene = axis_scene(120.0, 120, 90);
    for (int i = 0; i < n_points; ++i)
        add_point(scene, Vec3(rng.uniform(-0.6, 0.6), rng.uniform(-0.4, 0.4), rng.uniform(1.0, 3.0)));
    // z-buffer: nearest point per pixel
    auto& view = scene.views[0];
    view.depth.setZero();
    for (const auto& p : scene.points) {
        auto pr = oracle_project(view, p);
        if (pr.u < 0 || pr.u >= view.width || pr.v < 0 || pr.v >= view.height) continue;
        int xi = static_cast<int>(std::floor(pr.u));
        int yi = static_cast<int>(std::floor(pr.v));
        float& d = view.depth(yi, xi);
        if (d == 0.0f || pr.z < d) d = static_cast<float>(pr.z);
    }
    return scene;
}

}  // namespace

TEST_CASE("optical-axis point projects to the principal point") {
    PointScene scene = axis_scene();
    add_point(scene, {0, 0, 2});
    auto proj = geom::project_points(scene, 0, 0.01);
    REQUIRE(proj[0].visible);
    CHECK(proj[0].u == Catch::Approx(50.0));
    CHECK(proj[0].v == Catch::Approx(40.0));
    CHECK(proj[0].cam_depth == Catch::Approx(2.0));
}

TEST_CASE("point behind the camera is invisible") {
    PointScene scene = axis_scene();
    add_point(scene, {0, 0, -1});
    add_point(scene, {0, 0, 0});
    auto proj = geom::project_points(scene, 0, 0.01);
    CHECK_FALSE(proj[0].visible);
    CHECK_FALSE(proj[1].visible);
}

TEST_CASE("z-buffer resolves two points on the same ray") {
    PointScene scene = axis_scene();
    scene.views[0].depth.setConstant(1.0f);
    add_point(scene, {0, 0, 1});
    add_point(scene, {0, 0, 3});
    auto proj = geom::project_points(scene, 0, 0.01);
    CHECK(proj[0].visible);
    CHECK_FALSE(proj[1].visible);
}

TEST_CASE("project_points error paths") {
    PointScene scene = axis_scene();
    add_point(scene, {0, 0, 2});
    CHECK_THROWS_AS(geom::project_points(scene, 5, 0.01), NotFound);
    CHECK_THROWS_AS(geom::project_points(scene, -1, 0.01), NotFound);
    CHECK_THROWS_AS(geom::project_points(scene, 0, 0.0), InvalidInput);
    scene.points[0].x() = std::numeric_limits<double>::quiet_NaN();
    CHECK_THROWS_AS(geom::project_points(scene, 0, 0.01), InvalidInput);
}

TEST_CASE("projection round-trip recovers the world point") {
    for (std::uint64_t seed : {11u, 12u, 13u}) {
        PointScene scene = random_scene(seed);
        // give the view a nontrivial pose
        Rng rng(seed + 100);
        Mat3 rot = Eigen::AngleAxisd(rng.uniform(-0.4, 0.4), Vec3::UnitY()).toRotationMatrix() *
                   Eigen::AngleAxisd(rng.uniform(-0.3, 0.3), Vec3::UnitX()).toRotationMatrix();
        scene.views[0].world_to_cam.topLeftCorner<3, 3>() = rot;
        scene.views[0].world_to_cam.topRightCorner<3, 1>() = Vec3(0.1, -0.2, 0.05);
        auto proj = geom::project_points(scene, 0, 1e9);  // visibility not the concern here
        for (std::size_t i = 0; i < scene.size(); ++i) {
            if (proj[i].cam_depth <= 0) continue;
            if (proj[i].u < 0 || proj[i].u >= scene.views[0].width || proj[i].v < 0 ||
                proj[i].v >= scene.views[0].height)
                continue;
            Vec3 rec = geom::back_project(scene.views[0], proj[i].u, proj[i].v, proj[i].cam_depth);
            CHECK((rec - scene.points[i]).norm() < 1e-5);
        }
    }
}

TEST_CASE("full-image region collects every visible point") {
    PointScene scene = random_scene(42);
    Region2D reg;
    reg.x_min = 0;
    reg.y_min = 0;
    reg.x_max = scene.views[0].width;
    reg.y_max = scene.views[0].height;
    reg.caption = "everything";
    auto res = geom::associate_regions(scene, 0, {reg}, 1, 0.01);
    auto proj = geom::project_points(scene, 0, 0.01);
    std::size_t visible = 0;
    for (const auto& p : proj) visible += p.visible ? 1 : 0;
    REQUIRE(res.pairs.size() == 1);
    CHECK(res.pairs[0].point_indices.size() == visible);
    CHECK(res.dropped_small == 0);
}

TEST_CASE("regions below min_points are dropped and tallied") {
    PointScene scene = axis_scene();
    scene.views[0].depth.setConstant(2.0f);
    add_point(scene, {0.0, 0.0, 2.0});
    add_point(scene, {0.01, 0.0, 2.0});
    Region2D reg{0, 0, 100, 80, "small", SourceTag::synthetic, 0};
    auto res = geom::associate_regions(scene, 0, {reg}, 5, 0.01);
    CHECK(res.pairs.empty());
    CHECK(res.dropped_small == 1);
}

TEST_CASE("association equals the brute-force per-point oracle") {
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        PointScene scene = random_scene(seed);
        Rng rng(seed * 977);
        Region2D reg;
        reg.x_min = rng.uniform(0, 50);
        reg.y_min = rng.uniform(0, 40);
        reg.x_max = reg.x_min + rng.uniform(10, 60);
        reg.y_max = reg.y_min + rng.uniform(10, 40);
        reg.caption = "box";
        auto res = geom::associate_regions(scene, 0, {reg}, 1, 0.01);

        // oracle: loop all points with independent projection math
        std::vector<std::uint32_t> expected;
        const auto& view = scene.views[0];
        for (std::size_t i = 0; i < scene.size(); ++i) {
            auto pr = oracle_project(view, scene.points[i]);
            if (pr.z <= 0) continue;
            if (pr.u < 0 || pr.u >= view.width || pr.v < 0 || pr.v >= view.height) continue;
            int xi = static_cast<int>(std::floor(pr.u)), yi = static_cast<int>(std::floor(pr.v));
            if (std::abs(pr.z - view.depth(yi, xi)) > 0.01) continue;
            if (pr.u >= reg.x_min && pr.u < reg.x_max && pr.v >= reg.y_min && pr.v < reg.y_max)
                expected.push_back(static_cast<std::uint32_t>(i));
        }
        if (expected.empty()) {
            CHECK(res.pairs.empty());
        } else {
            REQUIRE(res.pairs.size() == 1);
            CHECK(res.pairs[0].point_indices == expected);
        }
    }
}

TEST_CASE("boxes are half-open at the max edges") {
    PointScene scene = axis_scene();
    scene.views[0].depth.setConstant(2.0f);
    add_point(scene, {0, 0, 2});  // projects to exactly (50, 40)
    Region2D left{40, 30, 50, 40, "l", SourceTag::synthetic, 0};
    Region2D right{50, 40, 60, 50, "r", SourceTag::synthetic, 0};
    auto res = geom::associate_regions(scene, 0, {left, right}, 1, 0.01);
    REQUIRE(res.pairs.size() == 1);
    CHECK(res.pairs[0].caption == "r");
}

TEST_CASE("enlarging a region never removes points") {
    PointScene scene = random_scene(77);
    Region2D small{20, 15, 60, 50, "s", SourceTag::synthetic, 0};
    Region2D big{10, 5, 80, 70, "b", SourceTag::synthetic, 0};
    auto rs = geom::associate_regions(scene, 0, {small}, 1, 0.01);
    auto rb = geom::associate_regions(scene, 0, {big}, 1, 0.01);
    if (!rs.pairs.empty()) {
        REQUIRE_FALSE(rb.pairs.empty());
        for (auto idx : rs.pairs[0].point_indices) {
            bool found = std::find(rb.pairs[0].point_indices.begin(),
                                   rb.pairs[0].point_indices.end(),
                                   idx) != rb.pairs[0].point_indices.end();
            CHECK(found);
        }
    }
}

TEST_CASE("association is deterministic and every pair index is visible") {
    PointScene scene = random_scene(5);
    Region2D reg{10, 10, 100, 80, "r", SourceTag::synthetic, 0};
    auto a = geom::associate_regions(scene, 0, {reg}, 1, 0.01);
    auto b = geom::associate_regions(scene, 0, {reg}, 1, 0.01);
    REQUIRE(a.pairs.size() == b.pairs.size());
    for (std::size_t i = 0; i < a.pairs.size(); ++i)
        CHECK(a.pairs[i].point_indices == b.pairs[i].point_indices);

    auto proj = geom::project_points(scene, 0, 0.01);
    for (const auto& pair : a.pairs)
        for (auto idx : pair.point_indices) CHECK(proj[idx].visible);
}
