#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "rplc/geom.hpp"
#include "rplc/lang.hpp"
#include "rplc/types.hpp"

namespace rplc::synth {

// Fixed background categories; foreground categories follow at index 3+.
constexpr int kWall = 0;
constexpr int kFloor = 1;
constexpr int kCeiling = 2;
constexpr int kBackgroundCount = 3;

enum class SizeClass { small, large };
enum class ShapeKind { box, sphere, cylinder };

struct SynthCategory {
    std::string name;
    SizeClass size_class = SizeClass::large;
    bool salient = true;
};

struct SceneConfig {
    Vec3 room_extent{6.0, 5.0, 3.0};
    int object_count_min = 4;
    int object_count_max = 8;
    std::vector<SynthCategory> categories;  // foreground categories
    double points_per_m2 = 24.0;            // background surfaces
    double object_points_per_m2 = 120.0;    // object surfaces
    int view_count = 6;
    int image_width = 160;
    int image_height = 120;
    double focal = 150.0;
    std::uint64_t seed = 0;

    void validate() const {
        if (room_extent.minCoeff() <= 0) throw InvalidConfig("scene: non-positive room extent");
        if (object_count_min > object_count_max || object_count_min < 0)
            throw InvalidConfig("scene: bad object count range");
        if (categories.empty()) throw InvalidConfig("scene: no foreground categories");
        if (points_per_m2 <= 0 || object_points_per_m2 <= 0)
            throw InvalidConfig("scene: non-positive point density");
        if (view_count < 1) throw InvalidConfig("scene: view_count must be >= 1");
        if (image_width < 8 || image_height < 8 || focal <= 0)
            throw InvalidConfig("scene: bad camera parameters");
    }

    /// Full label table: wall, floor, ceiling, then the foreground categories.
    std::vector<std::string> category_names() const {
        std::vector<std::string> names{"wall", "floor", "ceiling"};
        for (const auto& c : categories) names.push_back(c.name);
        return names;
    }
};

struct ObjectInfo {
    int category = 0;  // index into the full label table
    ShapeKind shape = ShapeKind::box;
    Vec3 center{0, 0, 0};
    Vec3 half{0, 0, 0};  // box: half extents; sphere: x = radius; cylinder: x = radius, z = half height
    bool salient = true;
    Vec3 color{0.5, 0.5, 0.5};
    std::string color_name;
};

struct SynthScene {
    PointScene scene;
    std::vector<ObjectInfo> objects;
    std::vector<int> point_object;  // object index per point, -1 for background
    std::vector<std::string> category_names;
    Vec3 room_extent{0, 0, 0};
};

namespace detail {

struct Palette {
    const char* name;
    Vec3 rgb;
};

inline const std::vector<Palette>& palette() {
    static const std::vector<Palette> p = {
        {"red", {0.75, 0.15, 0.15}},   {"green", {0.15, 0.65, 0.2}},
        {"blue", {0.2, 0.3, 0.75}},    {"yellow", {0.8, 0.75, 0.2}},
        {"purple", {0.55, 0.2, 0.65}}, {"orange", {0.85, 0.5, 0.15}},
        {"cyan", {0.2, 0.7, 0.7}},     {"brown", {0.5, 0.35, 0.2}},
    };
    return p;
}

// Ray-primitive intersections. Rays are o + t*d with unnormalized d;
// the renderer picks d so that camera depth equals t.
constexpr double kRayEps = 1e-9;

inline double ray_aabb(const Vec3& o, const Vec3& d, const Vec3& lo, const Vec3& hi) {
    double t0 = 0.0, t1 = std::numeric_limits<double>::infinity();
    for (int a = 0; a < 3; ++a) {
        if (std::abs(d[a]) < 1e-15) {
            if (o[a] < lo[a] || o[a] > hi[a]) return -1.0;
            continue;
        }
        double ta = (lo[a] - o[a]) / d[a];
        double tb = (hi[a] - o[a]) / d[a];
        if (ta > tb) std::swap(ta, tb);
        t0 = std::max(t0, ta);
        t1 = std::min(t1, tb);
        if (t0 > t1) return -1.0;
    }
    return t0 > kRayEps ? t0 : -1.0;
}

// Exit distance out of the room box, for a ray starting inside.
inline double ray_room_exit(const Vec3& o, const Vec3& d, const Vec3& extent) {
    double t_exit = std::numeric_limits<double>::infinity();
    for (int a = 0; a < 3; ++a) {
        if (std::abs(d[a]) < 1e-15) continue;
        double t = d[a] > 0 ? (extent[a] - o[a]) / d[a] : (0.0 - o[a]) / d[a];
        if (t > kRayEps) t_exit = std::min(t_exit, t);
    }
    return std::isfinite(t_exit) ? t_exit : -1.0;
}

inline double ray_sphere(const Vec3& o, const Vec3& d, const Vec3& c, double r) {
    Vec3 oc = o - c;
    double a = d.dot(d);
    double b = 2.0 * oc.dot(d);
    double cc = oc.dot(oc) - r * r;
    double disc = b * b - 4 * a * cc;
    if (disc < 0) return -1.0;
    double s = std::sqrt(disc);
    double t = (-b - s) / (2 * a);
    if (t > kRayEps) return t;
    t = (-b + s) / (2 * a);
    return t > kRayEps ? t : -1.0;
}

inline double ray_cylinder(const Vec3& o, const Vec3& d, const Vec3& c, double r, double hh) {
    double best = -1.0;
    // side surface
    double dx = d.x(), dy = d.y();
    double ox = o.x() - c.x(), oy = o.y() - c.y();
    double a = dx * dx + dy * dy;
    if (a > 1e-15) {
        double b = 2.0 * (ox * dx + oy * dy);
        double cc = ox * ox + oy * oy - r * r;
        double disc = b * b - 4 * a * cc;
        if (disc >= 0) {
            double s = std::sqrt(disc);
            for (double t : {(-b - s) / (2 * a), (-b + s) / (2 * a)}) {
                if (t <= kRayEps) continue;
                double z = o.z() + t * d.z();
                if (std::abs(z - c.z()) <= hh && (best < 0 || t < best)) best = t;
            }
        }
    }
    // caps
    if (std::abs(d.z()) > 1e-15) {
        for (double zc : {c.z() - hh, c.z() + hh}) {
            double t = (zc - o.z()) / d.z();
            if (t <= kRayEps) continue;
            double x = o.x() + t * d.x() - c.x();
            double y = o.y() + t * d.y() - c.y();
            if (x * x + y * y <= r * r && (best < 0 || t < best)) best = t;
        }
    }
    return best;
}

inline double ray_object(const Vec3& o, const Vec3& d, const ObjectInfo& obj) {
    switch (obj.shape) {
        case ShapeKind::box: return ray_aabb(o, d, obj.center - obj.half, obj.center + obj.half);
        case ShapeKind::sphere: return ray_sphere(o, d, obj.center, obj.half.x());
        case ShapeKind::cylinder: return ray_cylinder(o, d, obj.center, obj.half.x(), obj.half.z());
    }
    return -1.0;
}

inline void sample_rect(Rng& rng, const Vec3& origin, const Vec3& ua, const Vec3& ub, int count,
                        std::vector<Vec3>& out) {
    for (int i = 0; i < count; ++i) out.push_back(origin + rng.uniform() * ua + rng.uniform() * ub);
}

inline int area_count(double area, double density, int min_count = 1) {
    return std::max(min_count, static_cast<int>(std::llround(area * density)));
}

inline void sample_object_surface(Rng& rng, const ObjectInfo& obj, double density,
                                  std::vector<Vec3>& out) {
    if (obj.shape == ShapeKind::box) {
        Vec3 h = obj.half;
        // face areas: two each of yz, xz, xy
        double axz = 4 * h.x() * h.z(), ayz = 4 * h.y() * h.z(), axy = 4 * h.x() * h.y();
        double faces[6] = {ayz, ayz, axz, axz, axy, axy};
        for (int f = 0; f < 6; ++f) {
            int n = area_count(faces[f], density, 4);
            for (int i = 0; i < n; ++i) {
                double a = rng.uniform(-1, 1), b = rng.uniform(-1, 1);
                Vec3 p = obj.center;
                switch (f) {
                    case 0: p += Vec3(-h.x(), a * h.y(), b * h.z()); break;
                    case 1: p += Vec3(h.x(), a * h.y(), b * h.z()); break;
                    case 2: p += Vec3(a * h.x(), -h.y(), b * h.z()); break;
                    case 3: p += Vec3(a * h.x(), h.y(), b * h.z()); break;
                    case 4: p += Vec3(a * h.x(), b * h.y(), -h.z()); break;
                    case 5: p += Vec3(a * h.x(), b * h.y(), h.z()); break;
                }
                out.push_back(p);
            }
        }
    } else if (obj.shape == ShapeKind::sphere) {
        double r = obj.half.x();
        int n = area_count(4 * M_PI * r * r, density, 24);
        for (int i = 0; i < n; ++i) {
            Vec3 dir(rng.gaussian(), rng.gaussian(), rng.gaussian());
            double len = dir.norm();
            if (len < 1e-9) { --i; continue; }
            out.push_back(obj.center + dir / len * r);
        }
    } else {
        double r = obj.half.x(), hh = obj.half.z();
        int n_side = area_count(2 * M_PI * r * 2 * hh, density, 16);
        for (int i = 0; i < n_side; ++i) {
            double a = rng.uniform(0, 2 * M_PI);
            out.push_back(obj.center + Vec3(r * std::cos(a), r * std::sin(a), rng.uniform(-hh, hh)));
        }
        int n_cap = area_count(M_PI * r * r, density, 6);
        for (int cap = 0; cap < 2; ++cap) {
            double z = cap == 0 ? -hh : hh;
            for (int i = 0; i < n_cap; ++i) {
                double a = rng.uniform(0, 2 * M_PI);
                double rr = r * std::sqrt(rng.uniform());
                out.push_back(obj.center + Vec3(rr * std::cos(a), rr * std::sin(a), z));
            }
        }
    }
}

}  // namespace detail

/// Camera depth along the pixel ray (u, v) of a view; the same intersection
/// code the depth maps are rendered with.
inline double raycast_depth(const SynthScene& ss, const CameraView& view, double u, double v) {
    const Mat3 r = view.world_to_cam.topLeftCorner<3, 3>();
    const Vec3 t = view.world_to_cam.topRightCorner<3, 1>();
    const Vec3 cam_center = -r.transpose() * t;
    Vec3 dir_cam = view.intrinsics.inverse() * Vec3(u, v, 1.0);  // z component is 1
    Vec3 dir_world = r.transpose() * dir_cam;

    double best = detail::ray_room_exit(cam_center, dir_world, ss.room_extent);
    for (const auto& obj : ss.objects) {
        double th = detail::ray_object(cam_center, dir_world, obj);
        if (th > 0 && (best < 0 || th < best)) best = th;
    }
    return best > 0 ? best : 0.0;
}

/// Deterministic room scene: labeled background shell, non-overlapping
/// primitive objects, and ring cameras with exact ray-cast depth.
inline SynthScene generate_scene(const SceneConfig& cfg, const std::string& scene_id) {
    cfg.validate();
    Rng rng(cfg.seed);
    const Vec3 e = cfg.room_extent;

    SynthScene ss;
    ss.room_extent = e;
    ss.category_names = cfg.category_names();
    ss.scene.scene_id = scene_id;

    // Object placement, bounded retries on footprint overlap.
    int n_objects = cfg.object_count_min +
                    static_cast<int>(rng.uniform_int(cfg.object_count_max - cfg.object_count_min + 1));
    const auto& pal = detail::palette();
    for (int k = 0; k < n_objects; ++k) {
        int cat_local = static_cast<int>(rng.uniform_int(cfg.categories.size()));
        const SynthCategory& cat = cfg.categories[cat_local];
        ObjectInfo obj;
        obj.category = kBackgroundCount + cat_local;
        obj.salient = cat.salient;
        obj.shape = static_cast<ShapeKind>(rng.uniform_int(3));
        int pal_idx = static_cast<int>(rng.uniform_int(pal.size()));
        obj.color_name = pal[pal_idx].name;

        bool placed = false;
        for (int attempt = 0; attempt < 100 && !placed; ++attempt) {
            double s = cat.size_class == SizeClass::small ? rng.uniform(0.15, 0.35)
                                                          : rng.uniform(0.5, 1.0);
            switch (obj.shape) {
                case ShapeKind::box:
                    obj.half = Vec3(s * rng.uniform(0.6, 1.0), s * rng.uniform(0.6, 1.0),
                                    s * rng.uniform(0.5, 1.0));
                    break;
                case ShapeKind::sphere:
                    obj.half = Vec3(s * 0.6, s * 0.6, s * 0.6);
                    break;
                case ShapeKind::cylinder:
                    obj.half = Vec3(s * 0.5, s * 0.5, s * rng.uniform(0.6, 1.2));
                    break;
            }
            double margin = 0.3;
            double rx = obj.half.x(), ry = obj.shape == ShapeKind::box ? obj.half.y() : obj.half.x();
            if (e.x() - 2 * (margin + rx) <= 0 || e.y() - 2 * (margin + ry) <= 0) continue;
            obj.center = Vec3(rng.uniform(margin + rx, e.x() - margin - rx),
                              rng.uniform(margin + ry, e.y() - margin - ry), obj.half.z());
            bool overlap = false;
            for (const auto& other : ss.objects) {
                double orx = other.half.x();
                double ory = other.shape == ShapeKind::box ? other.half.y() : other.half.x();
                if (std::abs(obj.center.x() - other.center.x()) < rx + orx + 0.1 &&
                    std::abs(obj.center.y() - other.center.y()) < ry + ory + 0.1) {
                    overlap = true;
                    break;
                }
            }
            placed = !overlap;
        }
        if (!placed) throw PlacementFailure("generate_scene: could not place object " + std::to_string(k));

        // per-object color: category palette hue shifted a little per object
        Vec3 base = pal[pal_idx].rgb;
        obj.color = (base + Vec3::Constant(rng.uniform(-0.05, 0.05))).cwiseMax(0.0).cwiseMin(1.0);
        ss.objects.push_back(obj);
    }

    // Background shell.
    auto add_points = [&](const std::vector<Vec3>& pts, const Vec3& base_color, int label, int obj_idx) {
        for (const Vec3& p : pts) {
            ss.scene.points.push_back(p);
            Vec3 c = base_color + Vec3(rng.gaussian(), rng.gaussian(), rng.gaussian()) * 0.02;
            ss.scene.colors.push_back(c.cwiseMax(0.0).cwiseMin(1.0));
            ss.scene.labels.push_back(label);
            ss.point_object.push_back(obj_idx);
        }
    };

    {
        std::vector<Vec3> pts;
        using detail::sample_rect;
        double d = cfg.points_per_m2;
        // floor / ceiling
        pts.clear();
        sample_rect(rng, {0, 0, 0}, {e.x(), 0, 0}, {0, e.y(), 0},
                    detail::area_count(e.x() * e.y(), d), pts);
        add_points(pts, {0.35, 0.33, 0.3}, kFloor, -1);
        pts.clear();
        sample_rect(rng, {0, 0, e.z()}, {e.x(), 0, 0}, {0, e.y(), 0},
                    detail::area_count(e.x() * e.y(), d), pts);
        add_points(pts, {0.9, 0.9, 0.88}, kCeiling, -1);
        // four walls
        pts.clear();
        sample_rect(rng, {0, 0, 0}, {e.x(), 0, 0}, {0, 0, e.z()},
                    detail::area_count(e.x() * e.z(), d), pts);
        sample_rect(rng, {0, e.y(), 0}, {e.x(), 0, 0}, {0, 0, e.z()},
                    detail::area_count(e.x() * e.z(), d), pts);
        sample_rect(rng, {0, 0, 0}, {0, e.y(), 0}, {0, 0, e.z()},
                    detail::area_count(e.y() * e.z(), d), pts);
        sample_rect(rng, {e.x(), 0, 0}, {0, e.y(), 0}, {0, 0, e.z()},
                    detail::area_count(e.y() * e.z(), d), pts);
        add_points(pts, {0.75, 0.74, 0.7}, kWall, -1);
    }

    // Object surfaces.
    for (std::size_t k = 0; k < ss.objects.size(); ++k) {
        std::vector<Vec3> pts;
        detail::sample_object_surface(rng, ss.objects[k], cfg.object_points_per_m2, pts);
        add_points(pts, ss.objects[k].color, ss.objects[k].category, static_cast<int>(k));
    }

    // Ring cameras looking inward.
    const Vec3 center(e.x() / 2, e.y() / 2, e.z() * 0.35);
    const double ring_r = 0.42 * std::min(e.x(), e.y());
    for (int k = 0; k < cfg.view_count; ++k) {
        double a = 2.0 * M_PI * k / cfg.view_count;
        Vec3 pos = Vec3(e.x() / 2 + ring_r * std::cos(a), e.y() / 2 + ring_r * std::sin(a),
                        e.z() * 0.62);
        Vec3 fwd = (center - pos).normalized();
        Vec3 up(0, 0, 1);
        Vec3 xc = fwd.cross(up).normalized();
        Vec3 yc = fwd.cross(xc);
        CameraView view;
        view.width = cfg.image_width;
        view.height = cfg.image_height;
        view.intrinsics << cfg.focal, 0, cfg.image_width / 2.0, 0, cfg.focal,
            cfg.image_height / 2.0, 0, 0, 1;
        Mat3 rot;
        rot.row(0) = xc;
        rot.row(1) = yc;
        rot.row(2) = fwd;
        view.world_to_cam.setIdentity();
        view.world_to_cam.topLeftCorner<3, 3>() = rot;
        view.world_to_cam.topRightCorner<3, 1>() = -rot * pos;
        view.depth.resize(view.height, view.width);
        ss.scene.views.push_back(view);  // push first so raycast sees final extrinsics
        CameraView& v = ss.scene.views.back();
        for (int y = 0; y < v.height; ++y)
            for (int x = 0; x < v.width; ++x)
                v.depth(y, x) = static_cast<float>(raycast_depth(ss, v, x + 0.5, y + 0.5));
    }

    ss.scene.validate(static_cast<int>(ss.category_names.size()));
    return ss;
}

enum class CaptionStyle { template_fill, phrase };

struct SourceProfile {
    SourceTag kind = SourceTag::det_t;
    std::vector<std::string> vocabulary;  // category names the source can name
    bool salient_only = false;
    double min_pixel_area = 0.0;  // pixels^2, salience proxy
    CaptionStyle caption_style = CaptionStyle::template_fill;
    double label_noise = 0.0;  // probability of a wrong-category caption
    double box_jitter = 0.0;   // corner perturbation, fraction of box size
    int sw_grid = 3;           // sliding-window grid (sw kind only), 50% overlap

    void validate() const {
        if (vocabulary.empty()) throw InvalidConfig("source: empty vocabulary");
        if (label_noise < 0 || label_noise > 1) throw InvalidConfig("source: label_noise outside [0,1]");
        if (box_jitter < 0 || box_jitter > 1) throw InvalidConfig("source: box_jitter outside [0,1]");
        if (sw_grid < 1) throw InvalidConfig("source: sw_grid must be >= 1");
    }
};

namespace detail {

inline std::string make_caption(CaptionStyle style, const std::string& category,
                                const std::string& color_name) {
    if (style == CaptionStyle::phrase) {
        if (color_name.empty()) return "an area of " + category + " surface";
        return "a " + color_name + " " + category + " in the room";
    }
    return "a photo of a " + category;
}

inline std::string maybe_flip(Rng& rng, const std::string& category,
                              const std::vector<std::string>& vocabulary, double noise) {
    if (noise <= 0 || vocabulary.size() < 2 || rng.uniform() >= noise) return category;
    std::string pick = category;
    while (pick == category)
        pick = vocabulary[rng.uniform_int(vocabulary.size())];
    return pick;
}

inline Region2D jitter_and_clamp(Rng& rng, double x0, double y0, double x1, double y1,
                                 double jitter, int w, int h) {
    if (jitter > 0) {
        double bw = x1 - x0, bh = y1 - y0;
        x0 += rng.uniform(-jitter, jitter) * bw;
        x1 += rng.uniform(-jitter, jitter) * bw;
        y0 += rng.uniform(-jitter, jitter) * bh;
        y1 += rng.uniform(-jitter, jitter) * bh;
    }
    Region2D reg;
    reg.x_min = std::clamp(x0, 0.0, static_cast<double>(w) - 1.0);
    reg.y_min = std::clamp(y0, 0.0, static_cast<double>(h) - 1.0);
    reg.x_max = std::clamp(x1, reg.x_min + 1.0, static_cast<double>(w));
    reg.y_max = std::clamp(y1, reg.y_min + 1.0, static_cast<double>(h));
    return reg;
}

}  // namespace detail

/// Simulate one caption stream over every view of a scene.
/// det_t: tight boxes + template captions for all in-vocabulary objects.
/// grit_like / kos_like / det_c: boxes around salient objects, phrase captions.
/// sw: overlapping window grid captioned by the dominant visible category.
inline std::vector<std::vector<Region2D>> simulate_source(const SynthScene& ss,
                                                          const SourceProfile& profile,
                                                          std::uint64_t seed,
                                                          double z_tolerance = 0.01) {
    profile.validate();
    Rng rng(seed);
    const PointScene& scene = ss.scene;

    auto in_vocab = [&](const std::string& name) {
        return std::find(profile.vocabulary.begin(), profile.vocabulary.end(), name) !=
               profile.vocabulary.end();
    };

    std::vector<std::vector<Region2D>> per_view(scene.views.size());
    for (std::size_t vid = 0; vid < scene.views.size(); ++vid) {
        const CameraView& view = scene.views[vid];
        auto proj = geom::project_points(scene, static_cast<int>(vid), z_tolerance);

        if (profile.kind == SourceTag::sw) {
            double ww = static_cast<double>(view.width) / ((profile.sw_grid + 1) / 2.0);
            double wh = static_cast<double>(view.height) / ((profile.sw_grid + 1) / 2.0);
            for (int gy = 0; gy < profile.sw_grid; ++gy) {
                for (int gx = 0; gx < profile.sw_grid; ++gx) {
                    double x0 = gx * ww / 2.0, y0 = gy * wh / 2.0;
                    double x1 = std::min(x0 + ww, static_cast<double>(view.width));
                    double y1 = std::min(y0 + wh, static_cast<double>(view.height));
                    // dominant in-vocabulary category among visible points
                    std::vector<int> counts(ss.category_names.size(), 0);
                    for (std::size_t i = 0; i < proj.size(); ++i) {
                        if (!proj[i].visible) continue;
                        if (proj[i].u < x0 || proj[i].u >= x1 || proj[i].v < y0 || proj[i].v >= y1)
                            continue;
                        if (scene.labels[i] >= 0) ++counts[scene.labels[i]];
                    }
                    int best = -1, best_count = 0;
                    for (std::size_t c = 0; c < counts.size(); ++c) {
                        if (counts[c] > best_count && in_vocab(ss.category_names[c])) {
                            best = static_cast<int>(c);
                            best_count = counts[c];
                        }
                    }
                    if (best < 0) continue;
                    std::string cat = detail::maybe_flip(rng, ss.category_names[best],
                                                         profile.vocabulary, profile.label_noise);
                    Region2D reg = detail::jitter_and_clamp(rng, x0, y0, x1, y1, profile.box_jitter,
                                                            view.width, view.height);
                    reg.caption = detail::make_caption(profile.caption_style, cat, "");
                    reg.source = profile.kind;
                    reg.view_id = static_cast<int>(vid);
                    per_view[vid].push_back(reg);
                }
            }
            continue;
        }

        // Object-anchored streams.
        for (std::size_t k = 0; k < ss.objects.size(); ++k) {
            const ObjectInfo& obj = ss.objects[k];
            const std::string& cat_name = ss.category_names[obj.category];
            if (!in_vocab(cat_name)) continue;

            double u0 = 1e30, v0 = 1e30, u1 = -1e30, v1 = -1e30;
            int visible = 0;
            for (std::size_t i = 0; i < proj.size(); ++i) {
                if (ss.point_object[i] != static_cast<int>(k) || !proj[i].visible) continue;
                u0 = std::min(u0, proj[i].u);
                u1 = std::max(u1, proj[i].u);
                v0 = std::min(v0, proj[i].v);
                v1 = std::max(v1, proj[i].v);
                ++visible;
            }
            if (visible == 0) continue;
            double area = (u1 - u0) * (v1 - v0);
            if (profile.salient_only && (!obj.salient || area < profile.min_pixel_area)) continue;

            std::string cat = detail::maybe_flip(rng, cat_name, profile.vocabulary, profile.label_noise);
            Region2D reg = detail::jitter_and_clamp(rng, u0 - 0.5, v0 - 0.5, u1 + 0.5, v1 + 0.5,
                                                    profile.box_jitter, view.width, view.height);
            reg.caption = detail::make_caption(profile.caption_style, cat, obj.color_name);
            reg.source = profile.kind;
            reg.view_id = static_cast<int>(vid);
            per_view[vid].push_back(reg);
        }
    }
    return per_view;
}

}  // namespace rplc::synth
