#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <stdexcept>
#include <variant>
#include <vector>

namespace scanrec {

// All lengths are millimetres, all public angles degrees.
using Vec3 = Eigen::Vector3d;
using Vec2 = Eigen::Vector2d;

inline constexpr double kPi = 3.14159265358979323846;

inline double deg2rad(double d) { return d * kPi / 180.0; }
inline double rad2deg(double r) { return r * 180.0 / kPi; }

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct DegenerateInput : Error {
    using Error::Error;
};
struct InsufficientInput : Error {
    using Error::Error;
};
struct FitFailure : Error {
    using Error::Error;
};
struct NotAnEllipse : Error {
    using Error::Error;
};
struct DegenerateGeometry : Error {
    using Error::Error;
};
struct NoPrincipalDirection : Error {
    using Error::Error;
};
struct AmbiguousShape : Error {
    using Error::Error;
};

/// Infinite plane through `point` with unit `normal`.
struct Plane {
    Vec3 point;
    Vec3 normal;

    double signed_distance(const Vec3& p) const { return normal.dot(p - point); }
    double distance(const Vec3& p) const { return std::abs(signed_distance(p)); }
};

/// One of the four laser scan planes. Every scan plane contains the optical
/// z-axis (the +z ray from the sensor origin); consecutive dihedral angles
/// differ by 45 degrees.
struct ScanPlane {
    int index = 0;              // 0..3
    double dihedral_deg = 0.0;  // 0, 45, 90, 135
    Vec3 normal;                // unit, z-component zero

    static ScanPlane from_index(int i) {
        if (i < 0 || i > 3) throw DegenerateInput("scan plane index out of range");
        const double a = deg2rad(45.0 * i);
        return ScanPlane{i, 45.0 * i, Vec3(std::sin(a), -std::cos(a), 0.0)};
    }

    /// In-plane direction orthogonal to the optical z-axis.
    Vec3 lateral_dir() const {
        const double a = deg2rad(dihedral_deg);
        return Vec3(std::cos(a), std::sin(a), 0.0);
    }

    Plane as_plane() const { return Plane{Vec3::Zero(), normal}; }
    double distance(const Vec3& p) const { return std::abs(normal.dot(p)); }
};

struct Circle3 {
    Vec3 center;
    double radius = 0.0;  // > 0
    Vec3 normal;          // unit
};

struct Line3 {
    Vec3 point;
    Vec3 direction;  // unit
};

/// Parametric ellipse embedded in 3-D; 11 scalar parameters in total:
/// center (3), semi-axes (2), plane normal (3), local x-axis (3).
struct Ellipse3 {
    Vec3 center;
    double semi_major = 0.0;  // >= semi_minor > 0
    double semi_minor = 0.0;
    Vec3 plane_normal;  // unit
    Vec3 local_x;       // unit, orthogonal to plane_normal

    Vec3 local_y() const { return plane_normal.cross(local_x); }

    /// Point on the ellipse at parameter angle t (radians).
    Vec3 point_at(double t) const {
        return center + semi_major * std::cos(t) * local_x + semi_minor * std::sin(t) * local_y();
    }

    double axis_ratio() const { return semi_major / semi_minor; }
};

struct Sphere {
    Vec3 center;
    double radius = 0.0;
};

struct Cylinder {
    Vec3 center;
    Vec3 axis;  // unit
    double radius = 0.0;
    double length = 0.0;
};

/// Frontal-face cuboid model: only the face pierced by the optical z-axis is
/// observable from a single view, so the model carries the face frame and the
/// two in-face extents.
struct Cuboid {
    Vec3 face_center;
    Vec3 face_normal;  // unit
    Vec3 principal_u;  // unit, in-face
    Vec3 principal_v;  // unit, in-face, = face_normal x principal_u
    double extent_u = 0.0;
    double extent_v = 0.0;
};

using ShapeModel = std::variant<Sphere, Cylinder, Cuboid>;

enum class ShapeKind { Sphere, Cylinder, Cuboid };

inline ShapeKind kind_of(const ShapeModel& m) {
    if (std::holds_alternative<Sphere>(m)) return ShapeKind::Sphere;
    if (std::holds_alternative<Cylinder>(m)) return ShapeKind::Cylinder;
    return ShapeKind::Cuboid;
}

inline const char* to_string(ShapeKind k) {
    switch (k) {
        case ShapeKind::Sphere: return "sphere";
        case ShapeKind::Cylinder: return "cylinder";
        case ShapeKind::Cuboid: return "cuboid";
    }
    return "?";
}

/// Orthogonal projection of p onto the plane.
inline Vec3 project_onto_plane(const Vec3& p, const Plane& plane) {
    const double n2 = plane.normal.squaredNorm();
    if (n2 < 1e-18) throw DegenerateInput("project_onto_plane: zero-normal plane");
    const Vec3 n = plane.normal / std::sqrt(n2);
    return p - n.dot(p - plane.point) * n;
}

/// Plane through three non-collinear points; normal is unit-norm. The normal
/// sign follows the cross product of (b-a) x (c-a).
inline Plane plane_from_three_points(const Vec3& a, const Vec3& b, const Vec3& c) {
    const Vec3 n = (b - a).cross(c - a);
    const double area2 = n.norm();  // twice the triangle area
    if (area2 * 0.5 <= 1e-9) throw DegenerateInput("plane_from_three_points: collinear points");
    return Plane{a, n / area2};
}

/// Orients a plane normal so it has non-negative dot product with the
/// direction from the sensor origin toward the surface (the plane point).
inline Plane orient_toward(const Plane& plane, const Vec3& surface_hint) {
    if (plane.normal.dot(surface_hint) < 0.0) return Plane{plane.point, -plane.normal};
    return plane;
}

/// Sorts coplanar points counter-clockwise around their centroid with respect
/// to the plane normal. The cycle starts at the smallest polar angle measured
/// in an arbitrary-but-fixed in-plane basis, so equal inputs yield identical
/// output.
inline std::vector<Vec3> sort_counter_clockwise(std::vector<Vec3> points, const Plane& plane) {
    if (points.size() < 3) throw InsufficientInput("sort_counter_clockwise: need >= 3 points");
    const Vec3 n = plane.normal.normalized();
    Vec3 ex = std::abs(n.z()) < 0.9 ? Vec3::UnitZ().cross(n) : Vec3::UnitX().cross(n);
    ex.normalize();
    const Vec3 ey = n.cross(ex);
    Vec3 centroid = Vec3::Zero();
    for (const auto& p : points) centroid += p;
    centroid /= static_cast<double>(points.size());
    std::sort(points.begin(), points.end(), [&](const Vec3& a, const Vec3& b) {
        const Vec3 ra = a - centroid, rb = b - centroid;
        const double ta = std::atan2(ey.dot(ra), ex.dot(ra));
        const double tb = std::atan2(ey.dot(rb), ex.dot(rb));
        if (ta != tb) return ta < tb;
        return ra.squaredNorm() < rb.squaredNorm();
    });
    return points;
}

/// Unsigned angle between two vectors, radians in [0, pi].
inline double angle_between(const Vec3& a, const Vec3& b) {
    const double na = a.norm(), nb = b.norm();
    if (na < 1e-15 || nb < 1e-15) throw DegenerateInput("angle_between: zero vector");
    const double c = std::clamp(a.dot(b) / (na * nb), -1.0, 1.0);
    return std::acos(c);
}

/// Angle between two axes ignoring sign, folded to [0, 90] degrees.
inline double axis_angle_deg(const Vec3& a, const Vec3& b) {
    const double c = std::clamp(std::abs(a.normalized().dot(b.normalized())), 0.0, 1.0);
    return rad2deg(std::acos(c));
}

}  // namespace scanrec
