// Test-only independent oracles: brute-force / dense-sampling references the
// implementation is checked against. These must stay independent of the
// library code paths they verify.
#pragma once

#include "scanrec/geometry.hpp"

#include <algorithm>
#include <random>
#include <vector>

namespace oracles {

using scanrec::Vec2;
using scanrec::Vec3;

/// Dense-sampling shortest distance from a point to a parametric ellipse.
inline double ellipse_distance_dense(const Vec3& p, const Vec3& center, double a, double b,
                                     const Vec3& ex, const Vec3& ey, int samples = 100000) {
    double best = 1e300;
    for (int i = 0; i < samples; ++i) {
        const double t = 2.0 * scanrec::kPi * i / samples;
        const Vec3 q = center + a * std::cos(t) * ex + b * std::sin(t) * ey;
        best = std::min(best, (p - q).norm());
    }
    return best;
}

/// O(n^3) convex hull: an edge (i, j) is on the hull iff every other point
/// lies strictly to its left; hull vertices are the edge endpoints.
inline std::vector<Vec2> brute_force_hull(const std::vector<Vec2>& pts) {
    const auto cross = [](const Vec2& o, const Vec2& a, const Vec2& b) {
        return (a.x() - o.x()) * (b.y() - o.y()) - (a.y() - o.y()) * (b.x() - o.x());
    };
    std::vector<Vec2> verts;
    const std::size_t n = pts.size();
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            if (i == j) continue;
            bool edge = true;
            for (std::size_t k = 0; k < n && edge; ++k) {
                if (k == i || k == j) continue;
                if (cross(pts[i], pts[j], pts[k]) <= 0.0) edge = false;
            }
            if (edge) {
                verts.push_back(pts[i]);
                verts.push_back(pts[j]);
            }
        }
    }
    std::sort(verts.begin(), verts.end(), [](const Vec2& a, const Vec2& b) {
        return a.x() < b.x() || (a.x() == b.x() && a.y() < b.y());
    });
    verts.erase(std::unique(verts.begin(), verts.end(),
                            [](const Vec2& a, const Vec2& b) { return a == b; }),
                verts.end());
    return verts;
}

/// Winding-number point-in-polygon (CCW polygon).
inline bool winding_inside(const std::vector<Vec2>& poly, const Vec2& q) {
    int winding = 0;
    const std::size_t n = poly.size();
    for (std::size_t i = 0; i < n; ++i) {
        const Vec2& a = poly[i];
        const Vec2& b = poly[(i + 1) % n];
        const double is_left = (b.x() - a.x()) * (q.y() - a.y()) - (q.x() - a.x()) * (b.y() - a.y());
        if (a.y() <= q.y()) {
            if (b.y() > q.y() && is_left > 0.0) ++winding;
        } else {
            if (b.y() <= q.y() && is_left < 0.0) --winding;
        }
    }
    return winding != 0;
}

/// Uniform double in [lo, hi) from a seeded engine.
inline double uniform(std::mt19937_64& rng, double lo, double hi) {
    return lo + (hi - lo) * std::uniform_real_distribution<double>(0.0, 1.0)(rng);
}

inline Vec3 random_unit(std::mt19937_64& rng) {
    while (true) {
        const Vec3 v(uniform(rng, -1.0, 1.0), uniform(rng, -1.0, 1.0), uniform(rng, -1.0, 1.0));
        const double n = v.norm();
        if (n > 1e-3 && n < 1.0) return v / n;
    }
}

}  // namespace oracles
