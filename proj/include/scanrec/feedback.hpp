#pragma once

#include "scanrec/geometry.hpp"
#include "scanrec/scan_sim.hpp"

#include <array>
#include <variant>
#include <vector>

namespace scanrec {

/// Strictly convex 2-D hull, CCW vertex order; degenerate hulls of one or two
/// vertices are allowed for coincident/collinear inputs.
struct Hull2 {
    std::vector<Vec2> vertices;
};

struct NoObject {};
struct Directional {
    std::array<double, 4> amplitudes{};  // (up, right, down, left), each in [0, 1]
};
struct Locked {};
using FeedbackState = std::variant<NoObject, Directional, Locked>;

inline bool is_locked(const FeedbackState& s) { return std::holds_alternative<Locked>(s); }
inline bool is_no_object(const FeedbackState& s) { return std::holds_alternative<NoObject>(s); }

/// Drops the z-coordinate; order and count preserved.
std::vector<Vec2> project_xy(const std::vector<Vec3>& points);

/// Exact 2-D convex hull (quickhull): CCW, collinear boundary points removed.
Hull2 quickhull(const std::vector<Vec2>& points);

struct HullVector {
    bool inside = false;
    Vec2 vector = Vec2::Zero();  // from the query toward the nearest hull point
    double distance = 0.0;       // mm
};

/// Shortest vector from the query (default: origin = the optical axis) to the
/// hull boundary; inside queries report distance zero.
HullVector shortest_vector_to_hull(const Hull2& hull, const Vec2& query = Vec2::Zero());

/// Maps the aiming-correction vector to the four tactor channels. Base
/// amplitude is 1 - distance/volume_width clamped to [0, 1]; a vector within
/// 10 degrees of a tactor axis drives that tactor alone, otherwise the two
/// flanking tactors split it by |cos| / |sin| weights.
std::array<double, 4> tactor_amplitudes(const Vec2& vector, double distance,
                                        double volume_width = 2.0 * kVolumeHalfWidth);

/// One feedback frame: no points -> NoObject; origin outside the hull of all
/// projected points -> Directional; origin inside with a successful
/// reconstruction -> Locked; inside with the fit failing -> a steady holding
/// cue (all channels at 0.2).
FeedbackState feedback_step(const std::vector<ScanLine>& scans, bool recon_ok);

}  // namespace scanrec
