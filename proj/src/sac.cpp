#include "scanrec/sac.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace scanrec {

namespace {

// Plausibility bounds for fitted primitives at capture-volume scale; samples
// producing models outside these bounds are treated as degenerate draws.
constexpr double kMinRadius = 2.0;      // mm
constexpr double kMaxRadius = 60.0;      // mm (no graspable cross-section is larger)
constexpr double kMaxSemiMajor = 150.0;  // mm
constexpr double kMinSemiMinor = 2.0;    // mm
constexpr double kMaxAxisRatio = 8.0;   // beyond this an "ellipse" is a line in disguise

std::uint64_t kind_tag(PrimitiveKind k) {
    switch (k) {
        case PrimitiveKind::Circle: return 0x63697263ull;
        case PrimitiveKind::Line: return 0x6c696e65ull;
        case PrimitiveKind::Ellipse: return 0x656c6c69ull;
    }
    return 0;
}

// Least-squares plane through the samples (normal = smallest PCA axis),
// anchored at the first sample point.
Plane average_plane(const std::vector<Vec3>& pts, const std::vector<int>& sample) {
    Vec3 centroid = Vec3::Zero();
    for (int i : sample) centroid += pts[i];
    centroid /= static_cast<double>(sample.size());
    Eigen::Matrix3d cov = Eigen::Matrix3d::Zero();
    for (int i : sample) {
        const Vec3 r = pts[i] - centroid;
        cov += r * r.transpose();
    }
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> eig(cov);
    const Vec3 normal = eig.eigenvectors().col(0);
    // Degenerate when the points do not span a plane (rank < 2).
    if (eig.eigenvalues()(1) < 1e-12) throw DegenerateInput("samples do not span a plane");
    return Plane{pts[sample.front()], normal.normalized()};
}

PlaneFrame frame_of(const Plane& plane) {
    Vec3 ex = std::abs(plane.normal.z()) < 0.9 ? Vec3::UnitZ().cross(plane.normal)
                                               : Vec3::UnitX().cross(plane.normal);
    ex.normalize();
    return PlaneFrame{plane.point, plane.normal, ex};
}

Circle3 circle_from_sample(const std::vector<Vec3>& pts, const std::vector<int>& sample) {
    const Plane plane = plane_from_three_points(pts[sample[0]], pts[sample[1]], pts[sample[2]]);
    const PlaneFrame frame = frame_of(plane);
    const Vec2 a = frame.to_local(pts[sample[0]]);
    const Vec2 b = frame.to_local(pts[sample[1]]);
    const Vec2 c = frame.to_local(pts[sample[2]]);

    // 2-D circumcenter.
    const double d = 2.0 * (a.x() * (b.y() - c.y()) + b.x() * (c.y() - a.y()) +
                            c.x() * (a.y() - b.y()));
    if (std::abs(d) < 1e-12) throw DegenerateInput("collinear circle sample");
    const double a2 = a.squaredNorm(), b2 = b.squaredNorm(), c2 = c.squaredNorm();
    const double ux = (a2 * (b.y() - c.y()) + b2 * (c.y() - a.y()) + c2 * (a.y() - b.y())) / d;
    const double uy = (a2 * (c.x() - b.x()) + b2 * (a.x() - c.x()) + c2 * (b.x() - a.x())) / d;
    const Vec2 center(ux, uy);
    const double radius = (a - center).norm();
    if (radius < kMinRadius || radius > kMaxRadius)
        throw DegenerateInput("circle sample radius out of range");
    return Circle3{frame.to_world(center), radius, plane.normal};
}

Line3 line_from_sample(const std::vector<Vec3>& pts, const std::vector<int>& sample) {
    const Vec3 d = pts[sample[1]] - pts[sample[0]];
    if (d.norm() < 1e-9) throw DegenerateInput("coincident line sample");
    return Line3{pts[sample[0]], d.normalized()};
}

Ellipse3 ellipse_from_sample(const std::vector<Vec3>& pts, const std::vector<int>& sample) {
    const Plane plane = average_plane(pts, sample);
    const PlaneFrame frame = frame_of(plane);
    std::vector<Vec2> local;
    local.reserve(sample.size());
    for (int i : sample) local.push_back(frame.to_local(pts[i]));
    const Conic conic = fit_conic_direct(local);
    const Ellipse3 e = conic_to_parametric(conic, frame);
    if (e.semi_major > kMaxSemiMajor || e.semi_minor < kMinSemiMinor ||
        e.axis_ratio() > kMaxAxisRatio)
        throw DegenerateInput("ellipse sample axes out of range");
    return e;
}

struct Candidate {
    std::variant<Circle3, Line3, Ellipse3> params;
    std::vector<int> inliers;
};

}  // namespace

double distance_to_primitive(const Vec3& p, const Circle3& c) {
    const Vec3 r = p - c.center;
    const double out = c.normal.dot(r);
    const double in = (r - out * c.normal).norm();
    return std::hypot(in - c.radius, out);
}

double distance_to_primitive(const Vec3& p, const Line3& l) {
    const Vec3 r = p - l.point;
    return (r - l.direction.dot(r) * l.direction).norm();
}

double distance_to_primitive(const Vec3& p, const Ellipse3& e) {
    return distance_to_ellipse(p, e);
}

double distance_to_primitive(const Vec3& p, const PrimitiveFit& fit) {
    return std::visit([&](const auto& m) { return distance_to_primitive(p, m); }, fit.params);
}

PrimitiveFit ransac_fit(const std::vector<Vec3>& points, PrimitiveKind kind, const SacConfig& cfg) {
    if (cfg.distance_threshold <= 0.0) throw DegenerateInput("ransac_fit: threshold must be > 0");
    if (cfg.max_iterations < 1) throw DegenerateInput("ransac_fit: max_iterations must be >= 1");
    if (cfg.min_inlier_fraction < 0.0 || cfg.min_inlier_fraction > 1.0)
        throw DegenerateInput("ransac_fit: min_inlier_fraction outside [0, 1]");
    const int k = sample_size(kind);
    const int n = static_cast<int>(points.size());
    if (n < k) throw InsufficientInput("ransac_fit: not enough points for model kind");

    std::mt19937_64 rng(mix_seed(cfg.rng_seed ^ kind_tag(kind)));
    const auto draw_index = [&] { return static_cast<int>(rng() % static_cast<std::uint64_t>(n)); };

    std::optional<Candidate> best;
    const long draw_cap = 10L * cfg.max_iterations;
    long draws = 0;
    int iteration = 0;
    double needed = cfg.max_iterations;
    std::vector<int> sample(k);

    while (iteration < cfg.max_iterations && iteration < needed && draws < draw_cap) {
        ++draws;
        for (int i = 0; i < k; ++i) {
            int idx;
            bool dup;
            do {
                idx = draw_index();
                dup = false;
                for (int j = 0; j < i; ++j) dup |= sample[j] == idx;
            } while (dup);
            sample[i] = idx;
        }

        Candidate cand;
        try {
            switch (kind) {
                case PrimitiveKind::Circle: cand.params = circle_from_sample(points, sample); break;
                case PrimitiveKind::Line: cand.params = line_from_sample(points, sample); break;
                case PrimitiveKind::Ellipse:
                    cand.params = ellipse_from_sample(points, sample);
                    break;
            }
        } catch (const Error&) {
            // Degenerate draw: does not consume an iteration.
            continue;
        }
        ++iteration;

        for (int i = 0; i < n; ++i) {
            const double d = std::visit(
                [&](const auto& m) { return distance_to_primitive(points[i], m); }, cand.params);
            if (d <= cfg.distance_threshold) cand.inliers.push_back(i);
        }

        if (!best || cand.inliers.size() > best->inliers.size()) {
            best = std::move(cand);
            // Standard adaptive stopping at 99% confidence.
            const double w = static_cast<double>(best->inliers.size()) / n;
            const double wk = std::pow(w, k);
            if (wk >= 1.0 - 1e-12) {
                needed = iteration;  // full consensus, cannot improve
            } else if (wk > 0.0) {
                needed = std::log(0.01) / std::log(1.0 - wk);
            }
        }
    }

    if (!best || static_cast<double>(best->inliers.size()) < cfg.min_inlier_fraction * n ||
        static_cast<int>(best->inliers.size()) < k) {
        throw FitFailure("ransac_fit: no consensus above min_inlier_fraction");
    }

    PrimitiveFit fit;
    fit.kind = kind;
    fit.params = best->params;
    fit.inlier_indices = std::move(best->inliers);
    fit.fit_percentage = 100.0 * static_cast<double>(fit.inlier_indices.size()) / n;
    return fit;
}

AllKindsFit fit_all_kinds(const std::vector<Vec3>& points, const SacConfig& cfg) {
    AllKindsFit out;
    const auto try_kind = [&](PrimitiveKind kind) -> std::optional<PrimitiveFit> {
        try {
            return ransac_fit(points, kind, cfg);
        } catch (const Error&) {
            return std::nullopt;
        }
    };
    out.circle = try_kind(PrimitiveKind::Circle);
    out.line = try_kind(PrimitiveKind::Line);
    out.ellipse = try_kind(PrimitiveKind::Ellipse);
    return out;
}

}  // namespace scanrec
