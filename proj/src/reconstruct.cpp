#include "scanrec/reconstruct.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>

namespace scanrec {

namespace {

enum class Slot { None, Circle, CircleEquivalent, Line, Ellipse };

bool is_curved(Slot s) {
    return s == Slot::Circle || s == Slot::CircleEquivalent || s == Slot::Ellipse;
}

bool counts_as_circle(Slot s) { return s == Slot::Circle || s == Slot::CircleEquivalent; }

double pct(const std::optional<PrimitiveFit>& f) { return f ? f->fit_percentage : -1.0; }

/// Best primitive kind for one scan: argmax fit percentage. Circle-vs-ellipse
/// ties are adjudicated by the fitted ellipse's own axis ratio (a circle is
/// an ellipse with equal semi-axes, so equal consensus means the ratio is the
/// only evidence). A straight line keeps the scan against an extremely
/// elongated ellipse within a small margin (thin ellipses can hug noisy
/// chords), and a winning near-circular ellipse is counted as a circle.
Slot slot_of(const AllKindsFit& fits, const ReconConfig& cfg) {
    const double c = pct(fits.circle), l = pct(fits.line), e = pct(fits.ellipse);
    if (c < 0.0 && l < 0.0 && e < 0.0) return Slot::None;

    Slot best;
    if (l >= 0.0 && l > c && l > e) {
        best = Slot::Line;
    } else if (c >= 0.0 && e >= 0.0 && c == e) {
        best = fits.ellipse->ellipse().axis_ratio() < cfg.tie_ellipse_ratio ? Slot::Circle
                                                                            : Slot::Ellipse;
    } else if (c >= l && c >= e) {
        best = Slot::Circle;
    } else if (l >= e) {
        best = Slot::Line;
    } else {
        best = Slot::Ellipse;
    }

    // Degenerate-looking curved winners hand the scan to a nearly-as-good
    // line: elongated ellipses and large circles hug straight chords.
    if (best == Slot::Ellipse && l >= 0.0 && fits.ellipse->ellipse().axis_ratio() > 2.5 &&
        l >= e - cfg.kind_margin_pct)
        best = Slot::Line;
    if (best == Slot::Circle && l >= 0.0 && l >= c - cfg.kind_margin_pct) best = Slot::Line;
    if (best == Slot::Ellipse && fits.ellipse->ellipse().axis_ratio() < cfg.circle_equiv_ratio)
        best = Slot::CircleEquivalent;
    return best;
}

std::vector<Slot> slots_of(const std::vector<ScanData>& scans, const ReconConfig& cfg) {
    std::vector<Slot> slots;
    slots.reserve(scans.size());
    for (const auto& s : scans) slots.push_back(slot_of(s.fits, cfg));
    return slots;
}

const std::optional<PrimitiveFit>& fit_for_slot(const ScanData& scan, Slot slot) {
    static const std::optional<PrimitiveFit> none;
    switch (slot) {
        case Slot::Circle: return scan.fits.circle;
        case Slot::Line: return scan.fits.line;
        case Slot::CircleEquivalent:
        case Slot::Ellipse: return scan.fits.ellipse;
        default: return none;
    }
}

struct Pattern {
    int fitted = 0;
    int circles = 0;  // incl. circle-equivalent ellipses
    int lines = 0;
    int ellipses = 0;
};

Pattern pattern_of(const std::vector<Slot>& slots) {
    Pattern p;
    for (Slot s : slots) {
        if (s == Slot::None) continue;
        ++p.fitted;
        if (counts_as_circle(s)) ++p.circles;
        else if (s == Slot::Line) ++p.lines;
        else ++p.ellipses;
    }
    return p;
}

std::vector<Circle3> circle_fits_of(const std::vector<ScanData>& scans) {
    std::vector<Circle3> circles;
    for (const auto& s : scans)
        if (s.fits.circle) circles.push_back(s.fits.circle->circle());
    return circles;
}

/// Extreme point for the sphere radius: first extreme of the first fitted
/// circle (scan order).
std::optional<Vec3> first_circle_extreme(const std::vector<ScanData>& scans) {
    for (const auto& s : scans) {
        if (s.fits.circle && s.fits.circle->inlier_indices.size() >= 2)
            return extreme_inliers(*s.fits.circle, s.scan.points).first;
    }
    return std::nullopt;
}

double dist_to_sphere(const Vec3& p, const Sphere& s) {
    return std::abs((p - s.center).norm() - s.radius);
}

double dist_to_cylinder_surface(const Vec3& p, const Cylinder& c) {
    const Vec3 r = p - c.center;
    const double radial = (r - c.axis.dot(r) * c.axis).norm();
    return std::abs(radial - c.radius);
}

/// Mean over scans of the percentage of scan points within the threshold of
/// the hypothesis surface.
template <typename Model, typename DistFn>
double hypothesis_aggregate(const std::vector<ScanData>& scans, const Model& model, DistFn dist,
                            double threshold) {
    double sum = 0.0;
    int n_scans = 0;
    for (const auto& s : scans) {
        if (s.scan.points.empty()) continue;
        int inl = 0;
        for (const auto& p : s.scan.points)
            if (dist(p, model) <= threshold) ++inl;
        sum += 100.0 * inl / static_cast<double>(s.scan.points.size());
        ++n_scans;
    }
    return n_scans ? sum / n_scans : 0.0;
}

Plane max_area_plane(const std::vector<Vec3>& pts) {
    const std::size_t n = pts.size();
    double best_area = -1.0;
    std::array<std::size_t, 3> best{};
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            for (std::size_t k = j + 1; k < n; ++k) {
                const double area = 0.5 * (pts[j] - pts[i]).cross(pts[k] - pts[i]).norm();
                if (area > best_area) {
                    best_area = area;
                    best = {i, j, k};
                }
            }
    if (best_area <= 1e-9) throw DegenerateGeometry("extreme points are collinear");
    return plane_from_three_points(pts[best[0]], pts[best[1]], pts[best[2]]);
}

SeedPoints build_seeds(const std::vector<ScanData>& scans, const std::vector<Slot>& slots,
                       const Plane& plane) {
    std::vector<Vec3> projected;
    for (std::size_t i = 0; i < scans.size(); ++i) {
        const auto& fit = fit_for_slot(scans[i], slots[i]);
        if (!fit) throw DegenerateGeometry("missing per-scan fit for seed construction");
        const auto [a, b] = extreme_inliers(*fit, scans[i].scan.points);
        projected.push_back(project_onto_plane(a, plane));
        projected.push_back(project_onto_plane(b, plane));
    }
    if (projected.size() != 8) throw DegenerateGeometry("seed construction needs 4 scans");
    const auto sorted = sort_counter_clockwise(projected, plane);
    SeedPoints seeds;
    std::copy_n(sorted.begin(), 8, seeds.points.begin());
    seeds.plane = plane;
    return seeds;
}

Vec3 canonical_axis(Vec3 a) {
    if (a.y() < 0.0 || (a.y() == 0.0 && (a.x() < 0.0 || (a.x() == 0.0 && a.z() < 0.0)))) a = -a;
    return a;
}

Cylinder cylinder_from_slots(const std::vector<ScanData>& scans, const std::vector<Slot>& slots,
                             const ReconConfig& cfg) {
    // Longitudinal plane from the curved fits' extreme points only.
    std::vector<Vec3> curved_extremes;
    std::vector<Vec3> curved_centers;
    std::vector<double> circle_radii;
    std::vector<double> semi_minors;
    for (std::size_t i = 0; i < scans.size(); ++i) {
        if (!is_curved(slots[i])) continue;
        const auto& fit = fit_for_slot(scans[i], slots[i]);
        const auto [a, b] = extreme_inliers(*fit, scans[i].scan.points);
        curved_extremes.push_back(a);
        curved_extremes.push_back(b);
        if (slots[i] == Slot::Circle) {
            curved_centers.push_back(fit->circle().center);
            circle_radii.push_back(fit->circle().radius);
        } else {
            curved_centers.push_back(fit->ellipse().center);
            semi_minors.push_back(fit->ellipse().semi_minor);
        }
    }
    if (curved_extremes.size() < 3) throw DegenerateGeometry("cylinder needs >= 2 curved fits");

    Plane plane = max_area_plane(curved_extremes);
    Vec3 centroid = std::accumulate(curved_extremes.begin(), curved_extremes.end(),
                                    Vec3(Vec3::Zero())) /
                    static_cast<double>(curved_extremes.size());
    plane = orient_toward(plane, centroid);

    const SeedPoints seeds = build_seeds(scans, slots, plane);
    const Vec3 axis = canonical_axis(principal_direction(seeds, cfg.alpha_max_deg));

    Cylinder cyl;
    cyl.axis = axis;
    cyl.center = std::accumulate(curved_centers.begin(), curved_centers.end(),
                                 Vec3(Vec3::Zero())) /
                 static_cast<double>(curved_centers.size());
    if (!circle_radii.empty()) {
        cyl.radius = std::accumulate(circle_radii.begin(), circle_radii.end(), 0.0) /
                     static_cast<double>(circle_radii.size());
    } else {
        cyl.radius = std::accumulate(semi_minors.begin(), semi_minors.end(), 0.0) /
                     static_cast<double>(semi_minors.size());
    }
    double lo = 1e300, hi = -1e300;
    for (const auto& s : seeds.points) {
        const double t = axis.dot(s - cyl.center);
        lo = std::min(lo, t);
        hi = std::max(hi, t);
    }
    cyl.length = hi - lo;
    return cyl;
}

struct Classified {
    ShapeKind kind;
    std::vector<Slot> slots;
};

Classified classify_impl(const std::vector<ScanData>& scans, const ReconConfig& cfg) {
    const auto slots = slots_of(scans, cfg);
    const Pattern p = pattern_of(slots);

    if (p.fitted < 2) throw AmbiguousShape("fewer than two scans produced a fit");

    // i) all circles -> sphere.
    if (p.ellipses == 0 && p.lines == 0) {
        if (circle_fits_of(scans).size() < 2)
            throw AmbiguousShape("sphere pattern without two usable circle fits");
        return {ShapeKind::Sphere, slots};
    }

    // ii) all lines -> cuboid (all four scans required for the seed walk).
    if (p.circles == 0 && p.ellipses == 0 && p.lines == 4 && p.fitted == 4)
        return {ShapeKind::Cuboid, slots};

    // Curved mix on fewer than four scans: only the sphere is reconstructable.
    if (p.lines == 0 && p.fitted < 4) {
        if (circle_fits_of(scans).size() < 2)
            throw AmbiguousShape("curved pattern without two usable circle fits");
        return {ShapeKind::Sphere, slots};
    }

    // iii) all ellipses, or one line plus curved fits -> cylinder. The
    // canonical form is one circle, one line and two ellipses; any curved
    // mix beside a single line is accepted since a line rules the sphere out.
    if (p.fitted == 4 && ((p.lines == 1 && p.circles + p.ellipses == 3) || p.lines == 0)) {
        if (p.lines == 1) return {ShapeKind::Cylinder, slots};

        // All-curved pattern: a circle is an ellipse with equal semi-axes, so
        // the sphere hypothesis competes. The cylinder wins only if its
        // aggregate fit percentage more than doubles the sphere's.
        double sphere_agg = 0.0;
        std::optional<Sphere> sphere;
        const auto circles = circle_fits_of(scans);
        const auto extreme = first_circle_extreme(scans);
        if (circles.size() >= 2 && extreme) {
            try {
                sphere = sphere_from_circles(circles, *extreme);
                sphere_agg = hypothesis_aggregate(
                    scans, *sphere, [](const Vec3& q, const Sphere& s) { return dist_to_sphere(q, s); },
                    cfg.sac.distance_threshold);
            } catch (const Error&) {
            }
        }
        double cylinder_agg = 0.0;
        bool cylinder_ok = false;
        try {
            const Cylinder cyl = cylinder_from_slots(scans, slots, cfg);
            cylinder_agg = hypothesis_aggregate(
                scans, cyl,
                [](const Vec3& q, const Cylinder& c) { return dist_to_cylinder_surface(q, c); },
                cfg.sac.distance_threshold);
            cylinder_ok = true;
        } catch (const Error&) {
        }

        if (cylinder_ok && cylinder_beats_sphere(cylinder_agg, sphere_agg))
            return {ShapeKind::Cylinder, slots};
        if (sphere) return {ShapeKind::Sphere, slots};
        throw AmbiguousShape("all-curved pattern resolved to neither cylinder nor sphere");
    }

    throw AmbiguousShape("per-scan primitive pattern matches no shape rule");
}

double slot_confidence(const std::vector<ScanData>& scans, const std::vector<Slot>& slots) {
    double sum = 0.0;
    int n = 0;
    for (std::size_t i = 0; i < scans.size(); ++i) {
        const auto& fit = fit_for_slot(scans[i], slots[i]);
        if (fit) {
            sum += fit->fit_percentage;
            ++n;
        }
    }
    return n ? sum / (100.0 * n) : 0.0;
}

}  // namespace

double grasp_dimension(const ShapeModel& model) {
    if (const auto* s = std::get_if<Sphere>(&model)) return 2.0 * s->radius;
    if (const auto* c = std::get_if<Cylinder>(&model)) return 2.0 * c->radius;
    const auto& b = std::get<Cuboid>(model);
    return std::min(b.extent_u, b.extent_v);
}

std::optional<Vec3> principal_axis(const ShapeModel& model) {
    if (const auto* c = std::get_if<Cylinder>(&model)) return c->axis;
    if (const auto* b = std::get_if<Cuboid>(&model)) return b->principal_u;
    return std::nullopt;
}

Vec3 principal_direction(const SeedPoints& seeds, double alpha_max_deg) {
    const double alpha = deg2rad(alpha_max_deg);
    constexpr int n = 8;
    for (int i = 0; i < n; ++i) {
        const Vec3& prev = seeds.points[(i + n - 1) % n];
        const Vec3& cur = seeds.points[i];
        const Vec3& next = seeds.points[(i + 1) % n];
        const Vec3 inbound = cur - prev;
        const Vec3 outbound = next - cur;
        if (inbound.norm() < 1e-9 || outbound.norm() < 1e-9) continue;
        if (angle_between(inbound, outbound) <= alpha) return (next - prev).normalized();
    }
    throw NoPrincipalDirection("no seed with a near-straight turn");
}

ShapeKind classify(const std::vector<ScanData>& scans, const ReconConfig& cfg) {
    return classify_impl(scans, cfg).kind;
}

std::pair<Vec3, Vec3> extreme_inliers(const PrimitiveFit& fit, const std::vector<Vec3>& points) {
    const auto& inl = fit.inlier_indices;
    if (inl.size() < 2) throw InsufficientInput("extreme_inliers: need >= 2 inliers");

    if (fit.kind == PrimitiveKind::Line) {
        // Near-ties on the signed projection (e.g. points wrapping a face
        // corner at right angles) resolve toward the point closest to the
        // line, then toward the lower index.
        const Line3& line = fit.line();
        const auto better = [&](int idx, double t, int cur, double tcur, bool lower) {
            const double eps = 1e-9;
            if (lower ? t < tcur - eps : t > tcur + eps) return true;
            if (lower ? t > tcur + eps : t < tcur - eps) return false;
            const double d = distance_to_primitive(points[idx], line);
            const double dc = distance_to_primitive(points[cur], line);
            return d < dc - 1e-12;
        };
        int lo = inl[0], hi = inl[0];
        double tlo = line.direction.dot(points[inl[0]] - line.point), thi = tlo;
        for (int idx : inl) {
            const double t = line.direction.dot(points[idx] - line.point);
            if (better(idx, t, lo, tlo, true)) {
                tlo = t;
                lo = idx;
            }
            if (better(idx, t, hi, thi, false)) {
                thi = t;
                hi = idx;
            }
        }
        return {points[lo], points[hi]};
    }

    // Curved fit: the inlier arc's endpoints bound the largest angular gap.
    Vec3 center, ex, ey;
    double sx = 1.0, sy = 1.0;
    if (fit.kind == PrimitiveKind::Circle) {
        const Circle3& c = fit.circle();
        center = c.center;
        ex = std::abs(c.normal.z()) < 0.9 ? Vec3(Vec3::UnitZ().cross(c.normal)).normalized()
                                          : Vec3(Vec3::UnitX().cross(c.normal)).normalized();
        ey = c.normal.cross(ex);
    } else {
        const Ellipse3& e = fit.ellipse();
        center = e.center;
        ex = e.local_x;
        ey = e.local_y();
        sx = e.semi_major;
        sy = e.semi_minor;
    }

    std::vector<std::pair<double, int>> angles;
    angles.reserve(inl.size());
    for (int idx : inl) {
        const Vec3 r = points[idx] - center;
        angles.emplace_back(std::atan2(ey.dot(r) / sy, ex.dot(r) / sx), idx);
    }
    std::sort(angles.begin(), angles.end());

    std::size_t gap_at = angles.size() - 1;  // gap between angles[gap_at] and its successor
    double best_gap = angles.front().first + 2.0 * kPi - angles.back().first;
    for (std::size_t i = 0; i + 1 < angles.size(); ++i) {
        const double gap = angles[i + 1].first - angles[i].first;
        if (gap > best_gap) {
            best_gap = gap;
            gap_at = i;
        }
    }
    const int start = angles[(gap_at + 1) % angles.size()].second;  // arc start after the gap
    const int end = angles[gap_at].second;                          // arc end before the gap
    return {points[start], points[end]};
}

Sphere sphere_from_circles(const std::vector<Circle3>& circles, const Vec3& extreme_point) {
    if (circles.size() < 2) throw InsufficientInput("sphere_from_circles: need >= 2 circles");

    // The sphere center lies on each circle's normal line; intersect them in
    // the least-squares sense.
    Eigen::Matrix3d a = Eigen::Matrix3d::Zero();
    Vec3 b = Vec3::Zero();
    for (const auto& c : circles) {
        const Eigen::Matrix3d proj =
            Eigen::Matrix3d::Identity() - c.normal * c.normal.transpose();
        a += proj;
        b += proj * c.center;
    }
    Eigen::FullPivLU<Eigen::Matrix3d> lu(a);
    if (!lu.isInvertible())
        throw DegenerateGeometry("sphere_from_circles: parallel circle planes");
    Sphere s;
    s.center = lu.solve(b);
    s.radius = (s.center - extreme_point).norm();
    if (s.radius <= 0.0) throw DegenerateGeometry("sphere_from_circles: zero radius");
    return s;
}

Sphere reconstruct_sphere(const std::vector<ScanData>& scans, const ReconConfig&) {
    const auto circles = circle_fits_of(scans);
    const auto extreme = first_circle_extreme(scans);
    if (circles.size() < 2 || !extreme)
        throw InsufficientInput("reconstruct_sphere: need circle fits on >= 2 scans");
    return sphere_from_circles(circles, *extreme);
}

Cuboid reconstruct_cuboid(const std::vector<ScanData>& scans, const ReconConfig& cfg) {
    if (scans.size() != 4) throw InsufficientInput("reconstruct_cuboid: need 4 scans");
    std::vector<Slot> slots(4, Slot::Line);
    std::vector<Vec3> extremes;
    for (const auto& s : scans) {
        if (!s.fits.line) throw InsufficientInput("reconstruct_cuboid: missing line fit");
        const auto [a, b] = extreme_inliers(*s.fits.line, s.scan.points);
        extremes.push_back(a);
        extremes.push_back(b);
    }

    Plane plane = max_area_plane(extremes);
    Vec3 centroid =
        std::accumulate(extremes.begin(), extremes.end(), Vec3(Vec3::Zero())) / 8.0;
    plane = orient_toward(plane, centroid);

    const SeedPoints seeds = build_seeds(scans, slots, plane);
    Vec3 u = principal_direction(seeds, cfg.alpha_max_deg);
    u = (u - plane.normal.dot(u) * plane.normal).normalized();
    const Vec3 v = plane.normal.cross(u).normalized();

    Vec3 seed_centroid = Vec3::Zero();
    double ulo = 1e300, uhi = -1e300, vlo = 1e300, vhi = -1e300;
    for (const auto& s : seeds.points) {
        seed_centroid += s;
        const double tu = u.dot(s), tv = v.dot(s);
        ulo = std::min(ulo, tu);
        uhi = std::max(uhi, tu);
        vlo = std::min(vlo, tv);
        vhi = std::max(vhi, tv);
    }
    seed_centroid /= 8.0;

    Cuboid box;
    box.face_center = seed_centroid;
    box.face_normal = plane.normal;
    box.principal_u = u;
    box.principal_v = v;
    box.extent_u = uhi - ulo;
    box.extent_v = vhi - vlo;
    return box;
}

Cylinder reconstruct_cylinder(const std::vector<ScanData>& scans, const ReconConfig& cfg) {
    if (scans.size() != 4) throw InsufficientInput("reconstruct_cylinder: need 4 scans");
    const auto slots = slots_of(scans, cfg);
    for (const auto s : slots)
        if (s == Slot::None) throw InsufficientInput("reconstruct_cylinder: unfitted scan");
    bool any_curved = false;
    for (const auto s : slots) any_curved |= is_curved(s);
    if (!any_curved)
        throw Error("reconstruct_cylinder: all-line fits reached the cylinder path");
    return cylinder_from_slots(scans, slots, cfg);
}

ReconstructionResult reconstruct(const std::vector<ScanLine>& scans, const ReconConfig& cfg) {
    const auto t_start = std::chrono::steady_clock::now();
    ReconstructionResult result;

    std::vector<ScanData> data;
    data.reserve(scans.size());
    std::size_t total_points = 0;
    for (const auto& scan : scans) {
        ScanData d;
        d.scan = scan;
        total_points += scan.points.size();
        if (scan.points.size() >= 2) d.fits = fit_all_kinds(scan.points, cfg.sac);
        data.push_back(std::move(d));
    }
    for (const auto& d : data) result.per_scan_diagnostics.push_back(d.fits);

    const auto finish = [&](ReconstructionResult r) {
        r.elapsed_ms = std::chrono::duration<double, std::milli>(
                           std::chrono::steady_clock::now() - t_start)
                           .count();
        if (r.report) r.report->elapsed_ms = r.elapsed_ms;
        return r;
    };

    if (total_points == 0) {
        result.failure = FailureCause::NoData;
        result.detail = "no scan points in the capture volume";
        return finish(std::move(result));
    }

    // Single-line degraded mode: a lone circle yields a sphere whose radius
    // is the circle's (underestimates off-equator aims).
    if (data.size() == 1) {
        if (data[0].fits.circle) {
            const Circle3& c = data[0].fits.circle->circle();
            ReconstructionReport rep;
            rep.model = Sphere{c.center, c.radius};
            rep.per_scan_fits = {data[0].fits.circle};
            rep.shape_confidence = data[0].fits.circle->fit_percentage / 100.0;
            rep.degraded_single_line = true;
            result.report = std::move(rep);
        } else {
            result.failure = FailureCause::FitFailure;
            result.detail = "single scan produced no circle fit";
        }
        return finish(std::move(result));
    }

    try {
        const Classified cls = classify_impl(data, cfg);
        ReconstructionReport rep;
        switch (cls.kind) {
            case ShapeKind::Sphere: rep.model = reconstruct_sphere(data, cfg); break;
            case ShapeKind::Cuboid: rep.model = reconstruct_cuboid(data, cfg); break;
            case ShapeKind::Cylinder:
                rep.model = cylinder_from_slots(data, cls.slots, cfg);
                break;
        }
        rep.per_scan_fits.reserve(data.size());
        if (cls.kind == ShapeKind::Sphere) {
            for (const auto& d : data) rep.per_scan_fits.push_back(d.fits.circle);
        } else if (cls.kind == ShapeKind::Cuboid) {
            for (const auto& d : data) rep.per_scan_fits.push_back(d.fits.line);
        } else {
            for (std::size_t i = 0; i < data.size(); ++i)
                rep.per_scan_fits.push_back(fit_for_slot(data[i], cls.slots[i]));
        }
        rep.shape_confidence = slot_confidence(data, cls.slots);
        result.report = std::move(rep);
    } catch (const AmbiguousShape& e) {
        result.failure = FailureCause::AmbiguousShape;
        result.detail = e.what();
    } catch (const NoPrincipalDirection& e) {
        result.failure = FailureCause::AmbiguousShape;
        result.detail = e.what();
    } catch (const DegenerateGeometry& e) {
        result.failure = FailureCause::DegenerateGeometry;
        result.detail = e.what();
    } catch (const DegenerateInput& e) {
        result.failure = FailureCause::DegenerateGeometry;
        result.detail = e.what();
    } catch (const Error& e) {
        result.failure = FailureCause::FitFailure;
        result.detail = e.what();
    }
    return finish(std::move(result));
}

}  // namespace scanrec
