#include "scanrec/scan_sim.hpp"

#include "scanrec/sac.hpp"  // mix_seed

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>

namespace scanrec {

using json = nlohmann::json;

namespace {

constexpr std::uint64_t kAnalyticTag = 0x616e616cull;
constexpr std::uint64_t kCloudTag = 0x636c6f75ull;

bool in_volume(const Vec3& p) {
    return p.x() >= -kVolumeHalfWidth && p.x() <= kVolumeHalfWidth &&
           p.y() >= -kVolumeHalfWidth && p.y() <= kVolumeHalfWidth && p.z() >= kVolumeNear &&
           p.z() <= kVolumeFar;
}

Vec3 any_orthogonal(const Vec3& v) {
    Vec3 o = std::abs(v.z()) < 0.9 ? Vec3::UnitZ().cross(v) : Vec3::UnitX().cross(v);
    return o.normalized();
}

std::optional<double> ray_sphere(const Vec3& o, const Vec3& d, const TrueSphere& s) {
    const Vec3 oc = o - s.center;
    const double b = oc.dot(d);
    const double c = oc.squaredNorm() - s.radius * s.radius;
    const double disc = b * b - c;
    if (disc < 0.0) return std::nullopt;
    const double sq = std::sqrt(disc);
    const double t0 = -b - sq, t1 = -b + sq;
    if (t0 > 1e-9) return t0;
    if (t1 > 1e-9) return t1;
    return std::nullopt;
}

std::optional<double> ray_cylinder(const Vec3& o, const Vec3& d, const TrueCylinder& cy) {
    const double hl = cy.length / 2.0;
    std::optional<double> best;
    const auto consider = [&](double t) {
        if (t > 1e-9 && (!best || t < *best)) best = t;
    };

    // Lateral surface.
    const Vec3 oc = o - cy.center;
    const Vec3 q = oc - oc.dot(cy.axis) * cy.axis;
    const Vec3 m = d - d.dot(cy.axis) * cy.axis;
    const double a = m.squaredNorm();
    if (a > 1e-15) {
        const double b = q.dot(m);
        const double c = q.squaredNorm() - cy.radius * cy.radius;
        const double disc = b * b - a * c;
        if (disc >= 0.0) {
            const double sq = std::sqrt(disc);
            for (const double t : {(-b - sq) / a, (-b + sq) / a}) {
                const double s = oc.dot(cy.axis) + t * d.dot(cy.axis);
                if (std::abs(s) <= hl) consider(t);
            }
        }
    }

    // End caps.
    const double da = d.dot(cy.axis);
    if (std::abs(da) > 1e-15) {
        for (const double sign : {1.0, -1.0}) {
            const Vec3 cc = cy.center + sign * hl * cy.axis;
            const double t = (cc - o).dot(cy.axis) / da;
            if (t > 1e-9) {
                const Vec3 hit = o + t * d;
                if ((hit - cc).squaredNorm() <= cy.radius * cy.radius) consider(t);
            }
        }
    }
    return best;
}

std::optional<double> ray_box(const Vec3& o, const Vec3& d, const TrueBox& bx) {
    const Vec3 ol = bx.rot.transpose() * (o - bx.center);
    const Vec3 dl = bx.rot.transpose() * d;
    double tmin = -1e300, tmax = 1e300;
    for (int i = 0; i < 3; ++i) {
        const double h = bx.extents(i) / 2.0;
        if (std::abs(dl(i)) < 1e-15) {
            if (ol(i) < -h || ol(i) > h) return std::nullopt;
            continue;
        }
        double t0 = (-h - ol(i)) / dl(i);
        double t1 = (h - ol(i)) / dl(i);
        if (t0 > t1) std::swap(t0, t1);
        tmin = std::max(tmin, t0);
        tmax = std::min(tmax, t1);
        if (tmin > tmax) return std::nullopt;
    }
    if (tmin > 1e-9) return tmin;
    if (tmax > 1e-9) return tmax;
    return std::nullopt;
}

// Sensor-frame copies of the scene shapes.
TrueShape to_sensor_frame(const TrueShape& shape, const SensorPose& pose) {
    const Eigen::Matrix3d rt = pose.rotation.transpose();
    if (const auto* s = std::get_if<TrueSphere>(&shape)) {
        return TrueSphere{pose.world_to_sensor(s->center), s->radius};
    }
    if (const auto* c = std::get_if<TrueCylinder>(&shape)) {
        return TrueCylinder{pose.world_to_sensor(c->center), rt * c->axis, c->radius, c->length};
    }
    const auto& b = std::get<TrueBox>(shape);
    return TrueBox{pose.world_to_sensor(b.center), rt * b.rot, b.extents};
}

struct SensorScene {
    std::vector<TrueShape> shapes;

    std::optional<double> first_hit(const Vec3& o, const Vec3& d) const {
        std::optional<double> best;
        for (const auto& sh : shapes) {
            const auto t = ray_first_hit(o, d, sh);
            if (t && (!best || *t < *best)) best = t;
        }
        return best;
    }

    // A surface point is kept when nothing occludes it and it lies inside the
    // capture volume.
    bool keeps(const Vec3& p) const {
        if (!in_volume(p)) return false;
        const double range = p.norm();
        if (range < 1e-9) return false;
        const auto t = first_hit(Vec3::Zero(), p / range);
        return !t || *t >= range - 1e-6;
    }
};

// Samples one intersection curve at the requested arc spacing and refines
// every visibility/volume/extent transition by bisection so that curve
// endpoints are exact. `at` maps the curve parameter to a candidate surface
// point; `on_surface` restricts parametrizations that overrun the solid
// (finite cylinder cuts).
void emit_curve(const std::function<Vec3(double)>& at,
                const std::function<bool(double)>& on_surface, double t0, double t1, bool closed,
                double spacing, const SensorScene& scene, std::vector<Vec3>& out) {
    const auto kept = [&](double t) { return on_surface(t) && scene.keeps(at(t)); };

    std::vector<double> params;
    double t = t0;
    const double h = 1e-5 * (t1 - t0);
    while (t < t1) {
        params.push_back(t);
        const double speed = (at(std::min(t + h, t1)) - at(std::max(t - h, t0))).norm() /
                             (std::min(t + h, t1) - std::max(t - h, t0));
        t += spacing / std::max(speed, 1e-6);
    }
    if (!closed) params.push_back(t1);

    if (params.size() < 2) return;

    const auto refine = [&](double a, double b) {
        // a kept, b not (or vice versa); returns the boundary on the kept side.
        const bool a_kept = kept(a);
        for (int i = 0; i < 60 && std::abs(b - a) > 1e-13 * std::max(1.0, std::abs(t1)); ++i) {
            const double mid = (a + b) / 2.0;
            if (kept(mid) == a_kept) {
                a = mid;
            } else {
                b = mid;
            }
        }
        return a_kept ? a : b;
    };

    const std::size_t n = params.size();
    const std::size_t edges = closed ? n : n - 1;
    for (std::size_t i = 0; i < n; ++i) {
        if (kept(params[i])) out.push_back(at(params[i]));
    }
    for (std::size_t i = 0; i < edges; ++i) {
        double pa = params[i];
        double pb = params[(i + 1) % n];
        if (closed && i + 1 == n) pb = t1;  // wrap segment re-parametrized
        const bool ka = kept(pa);
        if (ka == kept(pb)) continue;
        out.push_back(at(refine(pa, pb)));
    }
}

void scan_sphere(const TrueSphere& s, const ScanPlane& plane, double spacing,
                 const SensorScene& scene, std::vector<Vec3>& out) {
    const double d = plane.normal.dot(s.center);
    if (std::abs(d) >= s.radius) return;
    const double rc = std::sqrt(s.radius * s.radius - d * d);
    const Vec3 center = s.center - d * plane.normal;
    const Vec3 e1 = plane.lateral_dir();
    const Vec3 e2 = Vec3::UnitZ();
    emit_curve([&](double t) { return Vec3(center + rc * std::cos(t) * e1 + rc * std::sin(t) * e2); },
               [](double) { return true; }, 0.0, 2.0 * kPi, true, spacing, scene, out);
}

void scan_cylinder(const TrueCylinder& cy, const ScanPlane& plane, double spacing,
                   const SensorScene& scene, std::vector<Vec3>& out) {
    const Vec3 n = plane.normal;
    const Vec3 b1 = any_orthogonal(cy.axis);
    const Vec3 b2 = cy.axis.cross(b1);
    const double hl = cy.length / 2.0;
    const double na = n.dot(cy.axis);
    const double c0 = n.dot(cy.center);
    const double c1 = n.dot(b1), c2 = n.dot(b2);

    if (std::abs(na) > 1e-9) {
        // Oblique or perpendicular cut of the lateral surface.
        const auto axial = [&](double th) {
            return -(c0 + cy.radius * (c1 * std::cos(th) + c2 * std::sin(th))) / na;
        };
        const auto at = [&](double th) {
            return Vec3(cy.center + axial(th) * cy.axis +
                        cy.radius * (std::cos(th) * b1 + std::sin(th) * b2));
        };
        emit_curve(at, [&](double th) { return std::abs(axial(th)) <= hl; }, 0.0, 2.0 * kPi, true,
                   spacing, scene, out);
    } else {
        // Plane parallel to the axis: up to two surface lines.
        const double amp = cy.radius * std::hypot(c1, c2);
        if (amp > 1e-12 && std::abs(c0) < amp) {
            const double phase = std::atan2(c2, c1);
            const double delta = std::acos(std::clamp(-c0 / amp, -1.0, 1.0));
            for (const double th : {phase + delta, phase - delta}) {
                const Vec3 base =
                    cy.center + cy.radius * (std::cos(th) * b1 + std::sin(th) * b2);
                emit_curve([&](double s) { return Vec3(base + s * cy.axis); },
                           [](double) { return true; }, -hl, hl, false, spacing, scene, out);
            }
        }
    }

    // End-cap chords.
    const Vec3 u = n.cross(cy.axis);
    if (u.norm() > 1e-9) {
        const Vec3 ud = u.normalized();
        for (const double sign : {1.0, -1.0}) {
            const Vec3 cc = cy.center + sign * hl * cy.axis;
            const double denom = 1.0 - na * na;
            if (denom < 1e-12) continue;
            const Vec3 q = cc - (n.dot(cc) / denom) * (n - na * cy.axis);
            const Vec3 v = q - cc;
            // |v + t*ud| = radius
            const double b = v.dot(ud);
            const double c = v.squaredNorm() - cy.radius * cy.radius;
            const double disc = b * b - c;
            if (disc <= 0.0) continue;
            const double sq = std::sqrt(disc);
            emit_curve([&](double s) { return Vec3(q + s * ud); }, [](double) { return true; },
                       -b - sq, -b + sq, false, spacing, scene, out);
        }
    }
}

void scan_box(const TrueBox& bx, const ScanPlane& plane, double spacing, const SensorScene& scene,
              std::vector<Vec3>& out) {
    const Vec3 n = plane.normal;
    for (int axis = 0; axis < 3; ++axis) {
        const int ju = (axis + 1) % 3, jv = (axis + 2) % 3;
        const Vec3 fn = bx.rot.col(axis);
        const Vec3 eu = bx.rot.col(ju), ev = bx.rot.col(jv);
        const double hu = bx.extents(ju) / 2.0, hv = bx.extents(jv) / 2.0;
        const double nf = n.dot(fn);
        const double denom = 1.0 - nf * nf;
        if (denom < 1e-12) continue;  // face parallel to the scan plane
        for (const double sign : {1.0, -1.0}) {
            const Vec3 fc = bx.center + sign * (bx.extents(axis) / 2.0) * fn;
            const Vec3 q = fc - (n.dot(fc) / denom) * (n - nf * fn);
            const Vec3 dir = n.cross(fn).normalized();
            // Clip the in-face line q + t*dir to |u| <= hu, |v| <= hv.
            double tmin = -1e300, tmax = 1e300;
            bool ok = true;
            const Vec3 rel = q - fc;
            for (const auto& [e, half] : {std::pair{eu, hu}, std::pair{ev, hv}}) {
                const double p0 = e.dot(rel), pd = e.dot(dir);
                if (std::abs(pd) < 1e-15) {
                    if (std::abs(p0) > half) ok = false;
                    continue;
                }
                double lo = (-half - p0) / pd, hi = (half - p0) / pd;
                if (lo > hi) std::swap(lo, hi);
                tmin = std::max(tmin, lo);
                tmax = std::min(tmax, hi);
            }
            if (!ok || tmin >= tmax) continue;
            emit_curve([&](double s) { return Vec3(q + s * dir); }, [](double) { return true; },
                       tmin, tmax, false, spacing, scene, out);
        }
    }
}

void append_scan_curves(const TrueShape& shape, const ScanPlane& plane, double spacing,
                        const SensorScene& scene, std::vector<Vec3>& out) {
    if (const auto* s = std::get_if<TrueSphere>(&shape)) {
        scan_sphere(*s, plane, spacing, scene, out);
    } else if (const auto* c = std::get_if<TrueCylinder>(&shape)) {
        scan_cylinder(*c, plane, spacing, scene, out);
    } else {
        scan_box(std::get<TrueBox>(shape), plane, spacing, scene, out);
    }
}

json vec_to_json(const Vec3& v) { return json::array({v.x(), v.y(), v.z()}); }

Vec3 vec_from_json(const json& j) { return Vec3(j.at(0), j.at(1), j.at(2)); }

json rot_to_json(const Eigen::Matrix3d& r) {
    json a = json::array();
    for (int i = 0; i < 3; ++i)
        for (int k = 0; k < 3; ++k) a.push_back(r(i, k));
    return a;
}

Eigen::Matrix3d rot_from_json(const json& j) {
    Eigen::Matrix3d r;
    for (int i = 0; i < 3; ++i)
        for (int k = 0; k < 3; ++k) r(i, k) = j.at(3 * i + k);
    return r;
}

}  // namespace

ShapeKind SceneObject::kind() const {
    if (std::holds_alternative<TrueSphere>(shape)) return ShapeKind::Sphere;
    if (std::holds_alternative<TrueCylinder>(shape)) return ShapeKind::Cylinder;
    return ShapeKind::Cuboid;
}

double SceneObject::grasp_dimension_mm() const {
    if (const auto* s = std::get_if<TrueSphere>(&shape)) return 2.0 * s->radius;
    if (const auto* c = std::get_if<TrueCylinder>(&shape)) return 2.0 * c->radius;
    const auto& b = std::get<TrueBox>(shape);
    // Frontal face: the local axis most aligned with the optical axis is the
    // depth direction; the other two span the face.
    int depth = 0;
    double best = -1.0;
    for (int i = 0; i < 3; ++i) {
        const double a = std::abs(b.rot.col(i).dot(Vec3::UnitZ()));
        if (a > best) {
            best = a;
            depth = i;
        }
    }
    double dims[2];
    int k = 0;
    for (int i = 0; i < 3; ++i)
        if (i != depth) dims[k++] = b.extents(i);
    return std::min(dims[0], dims[1]);
}

std::vector<Vec3> SceneObject::principal_axes() const {
    if (std::holds_alternative<TrueSphere>(shape)) return {};
    if (const auto* c = std::get_if<TrueCylinder>(&shape)) return {c->axis};
    const auto& b = std::get<TrueBox>(shape);
    int depth = 0;
    double best = -1.0;
    for (int i = 0; i < 3; ++i) {
        const double a = std::abs(b.rot.col(i).dot(Vec3::UnitZ()));
        if (a > best) {
            best = a;
            depth = i;
        }
    }
    std::vector<Vec3> axes;
    for (int i = 0; i < 3; ++i)
        if (i != depth) axes.push_back(b.rot.col(i));
    return axes;
}

std::optional<Vec3> SceneObject::grasp_alignment_axis() const {
    if (std::holds_alternative<TrueSphere>(shape)) return std::nullopt;
    if (const auto* c = std::get_if<TrueCylinder>(&shape)) return c->axis;
    const auto& b = std::get<TrueBox>(shape);
    int depth = 0;
    double best = -1.0;
    for (int i = 0; i < 3; ++i) {
        const double a = std::abs(b.rot.col(i).dot(Vec3::UnitZ()));
        if (a > best) {
            best = a;
            depth = i;
        }
    }
    int longer = -1;
    double longest = -1.0;
    for (int i = 0; i < 3; ++i) {
        if (i == depth) continue;
        if (b.extents(i) > longest) {
            longest = b.extents(i);
            longer = i;
        }
    }
    return b.rot.col(longer);
}

std::optional<double> ray_first_hit(const Vec3& origin, const Vec3& dir, const TrueShape& shape) {
    if (const auto* s = std::get_if<TrueSphere>(&shape)) return ray_sphere(origin, dir, *s);
    if (const auto* c = std::get_if<TrueCylinder>(&shape)) return ray_cylinder(origin, dir, *c);
    return ray_box(origin, dir, std::get<TrueBox>(shape));
}

std::vector<ScanLine> analytic_scan(const Scene& scene, int n_lines, double spacing) {
    if (n_lines != 1 && n_lines != 2 && n_lines != 4)
        throw DegenerateInput("analytic_scan: n_lines must be 1, 2 or 4");

    SensorScene ss;
    for (const auto& obj : scene.objects) ss.shapes.push_back(to_sensor_frame(obj.shape, scene.sensor_pose));

    std::vector<int> plane_indices;
    if (n_lines == 1) plane_indices = {0};
    else if (n_lines == 2) plane_indices = {0, 2};
    else plane_indices = {0, 1, 2, 3};

    std::mt19937_64 rng(mix_seed(scene.rng_seed ^ kAnalyticTag));
    std::normal_distribution<double> gauss(0.0, 1.0);

    std::vector<ScanLine> scans;
    scans.reserve(plane_indices.size());
    for (int idx : plane_indices) {
        const ScanPlane plane = ScanPlane::from_index(idx);
        std::vector<Vec3> pts;
        for (const auto& sh : ss.shapes) append_scan_curves(sh, plane, spacing, ss, pts);
        if (scene.noise_sigma > 0.0) {
            std::vector<Vec3> noisy;
            noisy.reserve(pts.size());
            for (const auto& p : pts) {
                const Vec3 q = p + scene.noise_sigma * Vec3(gauss(rng), gauss(rng), gauss(rng));
                // The 1 mm scan-membership tolerance and the capture volume
                // are enforced after perturbation, as extraction would.
                if (plane.distance(q) <= kScanTolerance && in_volume(q)) noisy.push_back(q);
            }
            pts = std::move(noisy);
        }
        scans.push_back(ScanLine{plane, std::move(pts)});
    }
    return scans;
}

std::vector<Vec3> emulate_depth_cloud(const Scene& scene, int width, int height) {
    if (width <= 0 || height <= 0) throw DegenerateInput("emulate_depth_cloud: bad resolution");

    SensorScene ss;
    for (const auto& obj : scene.objects) ss.shapes.push_back(to_sensor_frame(obj.shape, scene.sensor_pose));

    std::mt19937_64 rng(mix_seed(scene.rng_seed ^ kCloudTag));
    std::normal_distribution<double> gauss(0.0, 1.0);

    const double tan_x = std::tan(deg2rad(kFovXDeg / 2.0));
    const double tan_y = std::tan(deg2rad(kFovYDeg / 2.0));

    std::vector<Vec3> cloud;
    for (int j = 0; j < height; ++j) {
        const double y = (1.0 - 2.0 * (j + 0.5) / height) * tan_y;
        for (int i = 0; i < width; ++i) {
            const double x = (2.0 * (i + 0.5) / width - 1.0) * tan_x;
            const Vec3 dir = Vec3(x, y, 1.0).normalized();
            const auto t = ss.first_hit(Vec3::Zero(), dir);
            if (!t) continue;
            double range = *t;
            if (scene.noise_sigma > 0.0) range += scene.noise_sigma * gauss(rng);
            cloud.push_back(range * dir);
        }
    }
    return cloud;
}

std::vector<Vec3> truncate_to_volume(const std::vector<Vec3>& cloud) {
    std::vector<Vec3> out;
    out.reserve(cloud.size());
    for (const auto& p : cloud)
        if (in_volume(p)) out.push_back(p);
    return out;
}

std::vector<ScanLine> extract_scan_lines(const std::vector<Vec3>& cloud) {
    std::vector<ScanLine> scans;
    scans.reserve(4);
    for (int i = 0; i < 4; ++i) {
        const ScanPlane plane = ScanPlane::from_index(i);
        ScanLine line{plane, {}};
        for (const auto& p : cloud)
            if (plane.distance(p) <= kScanTolerance) line.points.push_back(p);
        scans.push_back(std::move(line));
    }
    return scans;
}

Vec3 orientation_axis(const std::string& keyword) {
    // Tilted poses are 45 degrees off vertical: those cuts stay within the
    // finite cylinder length at capture-volume scale.
    const double s = std::sin(deg2rad(45.0)), c = std::cos(deg2rad(45.0));
    if (keyword == "upright") return Vec3(0, 1, 0);
    if (keyword == "laying") return Vec3(1, 0, 0);
    if (keyword == "tilted_left") return Vec3(-s, c, 0);
    if (keyword == "tilted_right") return Vec3(s, c, 0);
    throw DegenerateInput("unknown orientation keyword: " + keyword);
}

Eigen::Matrix3d orientation_rotation(const std::string& keyword) {
    double deg = 0.0;
    if (keyword == "upright") deg = 0.0;
    else if (keyword == "laying") deg = 90.0;
    else if (keyword == "tilted_left") deg = 30.0;
    else if (keyword == "tilted_right") deg = -30.0;
    else throw DegenerateInput("unknown orientation keyword: " + keyword);
    return Eigen::AngleAxisd(deg2rad(deg), Vec3::UnitZ()).toRotationMatrix();
}

Eigen::Matrix3d rpy_to_rotation(double roll_deg, double pitch_deg, double yaw_deg) {
    return (Eigen::AngleAxisd(deg2rad(yaw_deg), Vec3::UnitY()) *
            Eigen::AngleAxisd(deg2rad(pitch_deg), Vec3::UnitX()) *
            Eigen::AngleAxisd(deg2rad(roll_deg), Vec3::UnitZ()))
        .toRotationMatrix();
}

Scene parse_scene(const std::string& json_text) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::exception& e) {
        throw DegenerateInput(std::string("scene parse error: ") + e.what());
    }

    Scene scene;
    scene.noise_sigma = j.value("noise_sigma", 0.0);
    scene.rng_seed = j.value("seed", std::uint64_t{0});

    if (j.contains("sensor")) {
        const auto& s = j["sensor"];
        if (s.contains("position")) scene.sensor_pose.position = vec_from_json(s["position"]);
        if (s.contains("rotation")) {
            scene.sensor_pose.rotation = rot_from_json(s["rotation"]);
        } else if (s.contains("rpy_deg")) {
            const auto& r = s["rpy_deg"];
            scene.sensor_pose.rotation = rpy_to_rotation(r.at(0), r.at(1), r.at(2));
        }
    }

    int auto_name = 0;
    for (const auto& o : j.value("objects", json::array())) {
        SceneObject obj;
        obj.name = o.value("name", "obj" + std::to_string(auto_name));
        ++auto_name;
        const std::string shape = o.at("shape");
        const Vec3 center = vec_from_json(o.at("center"));
        if (shape == "sphere") {
            obj.shape = TrueSphere{center, o.at("radius_mm")};
        } else if (shape == "cylinder") {
            Vec3 axis;
            if (o.contains("axis")) axis = vec_from_json(o["axis"]).normalized();
            else axis = orientation_axis(o.value("orientation", "upright"));
            obj.shape = TrueCylinder{center, axis, o.at("radius_mm"), o.at("length_mm")};
        } else if (shape == "cuboid") {
            Eigen::Matrix3d rot;
            if (o.contains("rotation")) rot = rot_from_json(o["rotation"]);
            else if (o.contains("rotation_rpy_deg")) {
                const auto& r = o["rotation_rpy_deg"];
                rot = rpy_to_rotation(r.at(0), r.at(1), r.at(2));
            } else {
                rot = orientation_rotation(o.value("orientation", "upright"));
            }
            obj.shape = TrueBox{center, rot, vec_from_json(o.at("extents_mm"))};
        } else {
            throw DegenerateInput("unknown shape: " + shape);
        }
        scene.objects.push_back(std::move(obj));
    }
    return scene;
}

Scene load_scene(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open scene file: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_scene(ss.str());
}

std::string serialize_scene(const Scene& scene) {
    json j;
    j["noise_sigma"] = scene.noise_sigma;
    j["seed"] = scene.rng_seed;
    j["sensor"] = {{"position", vec_to_json(scene.sensor_pose.position)},
                   {"rotation", rot_to_json(scene.sensor_pose.rotation)}};
    j["objects"] = json::array();
    for (const auto& obj : scene.objects) {
        json o;
        o["name"] = obj.name;
        if (const auto* s = std::get_if<TrueSphere>(&obj.shape)) {
            o["shape"] = "sphere";
            o["center"] = vec_to_json(s->center);
            o["radius_mm"] = s->radius;
        } else if (const auto* c = std::get_if<TrueCylinder>(&obj.shape)) {
            o["shape"] = "cylinder";
            o["center"] = vec_to_json(c->center);
            o["axis"] = vec_to_json(c->axis);
            o["radius_mm"] = c->radius;
            o["length_mm"] = c->length;
        } else {
            const auto& b = std::get<TrueBox>(obj.shape);
            o["shape"] = "cuboid";
            o["center"] = vec_to_json(b.center);
            o["rotation"] = rot_to_json(b.rot);
            o["extents_mm"] = vec_to_json(b.extents);
        }
        j["objects"].push_back(std::move(o));
    }
    return j.dump(2);
}

std::vector<Scene> protocol_scenes(double noise_sigma, std::uint64_t seed) {
    struct Entry {
        std::string name;
        TrueShape shape;
    };
    const Vec3 at(0.0, 0.0, 200.0);
    const std::vector<Entry> entries = {
        {"sphere_35", TrueSphere{at, 17.5}},
        {"sphere_85", TrueSphere{at, 42.5}},
        {"cyl_upright_60", TrueCylinder{at, orientation_axis("upright"), 30.0, 90.0}},
        {"cyl_laying_50", TrueCylinder{at, orientation_axis("laying"), 25.0, 90.0}},
        {"cyl_tilted_left_35", TrueCylinder{at, orientation_axis("tilted_left"), 17.5, 80.0}},
        {"cyl_tilted_right_40", TrueCylinder{at, orientation_axis("tilted_right"), 20.0, 80.0}},
        {"box_upright_80", TrueBox{at, orientation_rotation("upright"), Vec3(80, 95, 40)}},
        {"box_laying_45", TrueBox{at, orientation_rotation("laying"), Vec3(65, 45, 40)}},
        {"box_tilted_left_40", TrueBox{at, orientation_rotation("tilted_left"), Vec3(40, 85, 40)}},
        {"box_tilted_right_35", TrueBox{at, orientation_rotation("tilted_right"), Vec3(35, 75, 40)}},
    };

    std::vector<Scene> scenes;
    scenes.reserve(entries.size());
    for (std::size_t i = 0; i < entries.size(); ++i) {
        Scene s;
        s.noise_sigma = noise_sigma;
        s.rng_seed = mix_seed(seed ^ (0x50524f54ull + i));
        s.objects.push_back(SceneObject{entries[i].name, entries[i].shape});
        scenes.push_back(std::move(s));
    }
    return scenes;
}

}  // namespace scanrec
