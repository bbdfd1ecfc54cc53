#include "scanrec/ellipse_fit.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>

namespace scanrec {

namespace {

// Normalizes so that the constraint form 4ac - b^2 equals 1 and a + c > 0.
Conic normalize_constraint(Conic k) {
    const double form = 4.0 * k.a * k.c - k.b * k.b;
    if (form <= 0.0) throw NotAnEllipse("conic does not satisfy the ellipse constraint");
    double s = 1.0 / std::sqrt(form);
    if (k.a + k.c < 0.0) s = -s;
    k.a *= s;
    k.b *= s;
    k.c *= s;
    k.d *= s;
    k.e *= s;
    k.f *= s;
    return k;
}

// Rewrites a conic fitted on u = (x - tx)/s, v = (y - ty)/s back to (x, y).
Conic denormalize(const Conic& k, double tx, double ty, double s) {
    const double s2 = s * s;
    Conic r;
    r.a = k.a / s2;
    r.b = k.b / s2;
    r.c = k.c / s2;
    r.d = -2.0 * k.a * tx / s2 - k.b * ty / s2 + k.d / s;
    r.e = -k.b * tx / s2 - 2.0 * k.c * ty / s2 + k.e / s;
    r.f = (k.a * tx * tx + k.b * tx * ty + k.c * ty * ty) / s2 - k.d * tx / s - k.e * ty / s + k.f;
    return r;
}

}  // namespace

Conic fit_conic_direct(const std::vector<Vec2>& points) {
    const int n = static_cast<int>(points.size());
    if (n < 6) throw InsufficientInput("fit_conic_direct: need >= 6 points");

    // Center and scale the data; the quadratic design matrix is badly
    // conditioned in raw millimetre coordinates.
    double tx = 0.0, ty = 0.0;
    for (const auto& p : points) {
        tx += p.x();
        ty += p.y();
    }
    tx /= n;
    ty /= n;
    double scale = 0.0;
    for (const auto& p : points) scale += std::hypot(p.x() - tx, p.y() - ty);
    scale /= n;
    if (scale < 1e-12) throw FitFailure("fit_conic_direct: coincident points");

    Eigen::MatrixXd d1(n, 3), d2(n, 3);
    for (int i = 0; i < n; ++i) {
        const double x = (points[i].x() - tx) / scale;
        const double y = (points[i].y() - ty) / scale;
        d1(i, 0) = x * x;
        d1(i, 1) = x * y;
        d1(i, 2) = y * y;
        d2(i, 0) = x;
        d2(i, 1) = y;
        d2(i, 2) = 1.0;
    }

    const Eigen::Matrix3d s1 = d1.transpose() * d1;
    const Eigen::Matrix3d s2 = d1.transpose() * d2;
    const Eigen::Matrix3d s3 = d2.transpose() * d2;

    Eigen::FullPivLU<Eigen::Matrix3d> lu(s3);
    if (!lu.isInvertible()) throw FitFailure("fit_conic_direct: degenerate point configuration");
    const Eigen::Matrix3d t = -lu.solve(s2.transpose());
    const Eigen::Matrix3d m0 = s1 + s2 * t;

    // Premultiply by the inverse of the constraint matrix [[0,0,2],[0,-1,0],[2,0,0]].
    Eigen::Matrix3d m;
    m.row(0) = m0.row(2) / 2.0;
    m.row(1) = -m0.row(1);
    m.row(2) = m0.row(0) / 2.0;

    Eigen::EigenSolver<Eigen::Matrix3d> eig(m);
    if (eig.info() != Eigen::Success) throw FitFailure("fit_conic_direct: eigensolver failed");

    int best = -1;
    for (int i = 0; i < 3; ++i) {
        if (std::abs(eig.eigenvalues()[i].imag()) > 1e-12) continue;
        const Eigen::Vector3d v = eig.eigenvectors().col(i).real();
        const double cond = 4.0 * v(0) * v(2) - v(1) * v(1);
        if (cond > 0.0) {
            best = i;
            break;
        }
    }
    if (best < 0) throw FitFailure("fit_conic_direct: no ellipse solution");

    const Eigen::Vector3d a1 = eig.eigenvectors().col(best).real();
    const Eigen::Vector3d a2 = t * a1;

    Conic local{a1(0), a1(1), a1(2), a2(0), a2(1), a2(2)};
    return normalize_constraint(denormalize(local, tx, ty, scale));
}

Ellipse3 conic_to_parametric(const Conic& conic, const PlaneFrame& frame) {
    if (conic.discriminant() >= 0.0) throw NotAnEllipse("conic_to_parametric: not an ellipse");

    // Center from the gradient zero of the quadratic form.
    const double det = 4.0 * conic.a * conic.c - conic.b * conic.b;
    const double cx = (conic.b * conic.e - 2.0 * conic.c * conic.d) / det;
    const double cy = (conic.b * conic.d - 2.0 * conic.a * conic.e) / det;

    // Constant term after translating to the center.
    const double g = -(conic.a * cx * cx + conic.b * cx * cy + conic.c * cy * cy + conic.d * cx +
                       conic.e * cy + conic.f);

    // Eigen-decomposition of [[a, b/2], [b/2, c]].
    const double tr = conic.a + conic.c;
    const double gap = std::sqrt((conic.a - conic.c) * (conic.a - conic.c) + conic.b * conic.b);
    const double l_min = (tr - gap) / 2.0;
    const double l_max = (tr + gap) / 2.0;
    if (l_min <= 0.0 || g <= 0.0) throw NotAnEllipse("conic_to_parametric: degenerate ellipse");

    const double semi_major = std::sqrt(g / l_min);
    const double semi_minor = std::sqrt(g / l_max);

    // Eigenvector of the smaller eigenvalue is the major-axis direction.
    Vec2 dir;
    if (std::abs(conic.b) > 1e-15) {
        dir = Vec2(conic.b / 2.0, l_min - conic.a);
    } else if (conic.a <= conic.c) {
        dir = Vec2(1.0, 0.0);
    } else {
        dir = Vec2(0.0, 1.0);
    }
    dir.normalize();
    if (dir.x() < 0.0 || (dir.x() == 0.0 && dir.y() < 0.0)) dir = -dir;

    Ellipse3 e;
    e.center = frame.to_world(Vec2(cx, cy));
    e.semi_major = semi_major;
    e.semi_minor = semi_minor;
    e.plane_normal = frame.normal;
    e.local_x = (dir.x() * frame.local_x + dir.y() * frame.local_y()).normalized();
    return e;
}

int quadrant_of(const Vec3& point, const Ellipse3& ellipse) {
    const Vec3 r = point - ellipse.center;
    const double u = ellipse.local_x.dot(r);
    const double v = ellipse.local_y().dot(r);
    if (u >= 0.0 && v >= 0.0) return 1;
    if (u < 0.0 && v >= 0.0) return 2;
    if (u <= 0.0) return 3;
    return 4;
}

double distance_to_ellipse(const Vec3& point, const Ellipse3& ellipse) {
    const Vec3 r = point - ellipse.center;
    const double u = ellipse.local_x.dot(r);
    const double v = ellipse.local_y().dot(r);
    const double w = ellipse.plane_normal.dot(r);
    const double a = ellipse.semi_major, b = ellipse.semi_minor;

    const auto dist2 = [&](double t) {
        const double du = u - a * std::cos(t);
        const double dv = v - b * std::sin(t);
        return du * du + dv * dv + w * w;
    };

    const int quadrant = quadrant_of(point, ellipse);
    double lo = (quadrant - 1) * kPi / 2.0;
    double hi = quadrant * kPi / 2.0;

    const double guard = std::min(dist2(lo), dist2(hi));

    // Golden-section search; the in-quadrant distance is unimodal.
    constexpr double kInvPhi = 0.6180339887498949;
    double x1 = hi - kInvPhi * (hi - lo);
    double x2 = lo + kInvPhi * (hi - lo);
    double f1 = dist2(x1);
    double f2 = dist2(x2);
    while (hi - lo > 1e-9) {
        if (f1 <= f2) {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - kInvPhi * (hi - lo);
            f1 = dist2(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + kInvPhi * (hi - lo);
            f2 = dist2(x2);
        }
    }
    return std::sqrt(std::min({f1, f2, guard}));
}

}  // namespace scanrec
