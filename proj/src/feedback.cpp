#include "scanrec/feedback.hpp"

#include <algorithm>
#include <cmath>

namespace scanrec {

namespace {

double cross2(const Vec2& a, const Vec2& b) { return a.x() * b.y() - a.y() * b.x(); }

// Recursive half: points strictly right of a->b, farthest-first.
void hull_side(const Vec2& a, const Vec2& b, const std::vector<Vec2>& pts,
               std::vector<Vec2>& out) {
    int far_idx = -1;
    double far_d = 0.0;
    const Vec2 ab = b - a;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        const double d = cross2(ab, pts[i] - a);
        if (d < far_d) {  // right side, most negative is farthest
            far_d = d;
            far_idx = static_cast<int>(i);
        }
    }
    if (far_idx < 0) {
        out.push_back(b);
        return;
    }
    const Vec2 far = pts[far_idx];
    std::vector<Vec2> right_af, right_fb;
    for (const auto& p : pts) {
        if (cross2(far - a, p - a) < 0.0) right_af.push_back(p);
        else if (cross2(b - far, p - far) < 0.0) right_fb.push_back(p);
    }
    hull_side(a, far, right_af, out);
    hull_side(far, b, right_fb, out);
}

bool strictly_inside(const Hull2& hull, const Vec2& q) {
    const auto& v = hull.vertices;
    if (v.size() < 3) return false;
    for (std::size_t i = 0; i < v.size(); ++i) {
        const Vec2& a = v[i];
        const Vec2& b = v[(i + 1) % v.size()];
        if (cross2(b - a, q - a) <= 0.0) return false;
    }
    return true;
}

}  // namespace

std::vector<Vec2> project_xy(const std::vector<Vec3>& points) {
    std::vector<Vec2> out;
    out.reserve(points.size());
    for (const auto& p : points) out.emplace_back(p.x(), p.y());
    return out;
}

Hull2 quickhull(const std::vector<Vec2>& points) {
    if (points.empty()) throw InsufficientInput("quickhull: no points");

    const auto lt = [](const Vec2& a, const Vec2& b) {
        return a.x() < b.x() || (a.x() == b.x() && a.y() < b.y());
    };
    Vec2 lo = points[0], hi = points[0];
    for (const auto& p : points) {
        if (lt(p, lo)) lo = p;
        if (lt(hi, p)) hi = p;
    }

    Hull2 hull;
    if (lo == hi) {  // all coincident
        hull.vertices = {lo};
        return hull;
    }

    std::vector<Vec2> lower_set, upper_set;
    for (const auto& p : points) {
        const double side = cross2(hi - lo, p - lo);
        if (side < 0.0) lower_set.push_back(p);
        else if (side > 0.0) upper_set.push_back(p);
    }

    if (lower_set.empty() && upper_set.empty()) {  // collinear: 2-vertex hull
        hull.vertices = {lo, hi};
        return hull;
    }

    // CCW: walk the lower chain lo->hi, then the upper chain hi->lo.
    std::vector<Vec2> chain;
    chain.push_back(lo);
    hull_side(lo, hi, lower_set, chain);
    hull_side(hi, lo, upper_set, chain);
    chain.pop_back();  // closing lo repeated
    hull.vertices = std::move(chain);
    return hull;
}

HullVector shortest_vector_to_hull(const Hull2& hull, const Vec2& query) {
    if (hull.vertices.empty()) throw InsufficientInput("shortest_vector_to_hull: empty hull");

    HullVector r;
    if (strictly_inside(hull, query)) {
        r.inside = true;
        return r;
    }

    const auto& v = hull.vertices;
    double best = 1e300;
    Vec2 best_pt = v[0];
    if (v.size() == 1) {
        best_pt = v[0];
        best = (v[0] - query).norm();
    } else {
        const std::size_t edges = v.size() == 2 ? 1 : v.size();
        for (std::size_t i = 0; i < edges; ++i) {
            const Vec2& a = v[i];
            const Vec2& b = v[(i + 1) % v.size()];
            const Vec2 ab = b - a;
            const double t =
                std::clamp(ab.squaredNorm() > 0.0 ? ab.dot(query - a) / ab.squaredNorm() : 0.0,
                           0.0, 1.0);
            const Vec2 p = a + t * ab;
            const double d = (p - query).norm();
            if (d < best) {
                best = d;
                best_pt = p;
            }
        }
    }
    r.vector = best_pt - query;
    r.distance = best;
    return r;
}

std::array<double, 4> tactor_amplitudes(const Vec2& vector, double distance,
                                        double volume_width) {
    if (distance <= 0.0)
        throw DegenerateInput("tactor_amplitudes: zero distance belongs to the locked path");

    const double base = std::clamp(1.0 - distance / volume_width, 0.0, 1.0);
    std::array<double, 4> amp{};  // up, right, down, left
    if (base == 0.0) return amp;

    // Tactor axes: right = 0deg, up = 90deg, left = 180deg, down = 270deg.
    const double angle = std::atan2(vector.y(), vector.x());
    constexpr double kSnapDeg = 10.0;
    const int tactor_of[4] = {1, 0, 3, 2};  // axis k*90deg -> amplitude slot

    for (int k = 0; k < 4; ++k) {
        double diff = rad2deg(std::abs(std::remainder(angle - k * kPi / 2.0, 2.0 * kPi)));
        if (diff <= kSnapDeg) {
            amp[tactor_of[k]] = base;
            return amp;
        }
    }

    // Between two tactors: weight the flanking pair by the in-quadrant polar
    // angle projections.
    const double a = std::fmod(angle + 2.0 * kPi, 2.0 * kPi);
    const int k0 = static_cast<int>(a / (kPi / 2.0)) % 4;
    const int k1 = (k0 + 1) % 4;
    const double theta = a - k0 * (kPi / 2.0);
    amp[tactor_of[k0]] = base * std::abs(std::cos(theta));
    amp[tactor_of[k1]] = base * std::abs(std::sin(theta));
    return amp;
}

FeedbackState feedback_step(const std::vector<ScanLine>& scans, bool recon_ok) {
    std::vector<Vec3> all;
    for (const auto& s : scans) all.insert(all.end(), s.points.begin(), s.points.end());
    if (all.empty()) return NoObject{};

    const Hull2 hull = quickhull(project_xy(all));
    const HullVector hv = shortest_vector_to_hull(hull);

    if (hv.inside || hv.distance < 1e-9) {
        if (recon_ok) return Locked{};
        // Aim is on target but the model fit failed: steady low-level hold
        // cue, distinct from both Directional aiming and Locked.
        return Directional{{0.2, 0.2, 0.2, 0.2}};
    }
    return Directional{tactor_amplitudes(hv.vector, hv.distance)};
}

}  // namespace scanrec
