#pragma once

#include "scanrec/geometry.hpp"

#include <vector>

namespace scanrec {

/// Coefficients of the conic a x^2 + b xy + c y^2 + d x + e y + f = 0 in a
/// local 2-D plane frame. For a valid ellipse b^2 - 4ac < 0; fitted conics
/// are normalized so that 4ac - b^2 = 1 and a + c > 0.
struct Conic {
    double a = 0, b = 0, c = 0, d = 0, e = 0, f = 0;

    double discriminant() const { return b * b - 4.0 * a * c; }
    double evaluate(double x, double y) const {
        return a * x * x + b * x * y + c * y * y + d * x + e * y + f;
    }
};

/// Local frame used to lift 2-D fits back into 3-D.
struct PlaneFrame {
    Vec3 origin;
    Vec3 normal;   // unit
    Vec3 local_x;  // unit, orthogonal to normal
    Vec3 local_y() const { return normal.cross(local_x); }

    Vec2 to_local(const Vec3& p) const {
        const Vec3 r = p - origin;
        return Vec2(local_x.dot(r), local_y().dot(r));
    }
    Vec3 to_world(const Vec2& q) const { return origin + q.x() * local_x + q.y() * local_y(); }
};

/// Direct least-squares ellipse fit (constrained generalized eigensystem,
/// solved through the reduced 3x3 form). Needs >= 6 points; throws
/// InsufficientInput or FitFailure on degenerate data.
Conic fit_conic_direct(const std::vector<Vec2>& points);

/// Converts an ellipse conic in the given plane frame to the 11-parameter
/// parametric form. Throws NotAnEllipse for parabolic/hyperbolic conics.
Ellipse3 conic_to_parametric(const Conic& conic, const PlaneFrame& frame);

/// Ellipse quadrant of a point in the ellipse's local frame (1..4,
/// counter-clockwise from +x,+y). Boundary points go to the lower-numbered
/// adjacent quadrant.
int quadrant_of(const Vec3& point, const Ellipse3& ellipse);

/// Shortest Euclidean 3-D distance from a point to the ellipse curve,
/// computed by a golden-section line search restricted to the arc of the
/// point's quadrant (both quadrant endpoints are evaluated as guards).
double distance_to_ellipse(const Vec3& point, const Ellipse3& ellipse);

}  // namespace scanrec
