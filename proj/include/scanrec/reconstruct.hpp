#pragma once

#include "scanrec/sac.hpp"
#include "scanrec/scan_sim.hpp"

#include <array>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace scanrec {

struct ReconConfig {
    SacConfig sac;
    double alpha_max_deg = 10.0;       // seed-walk turn threshold
    double circle_equiv_ratio = 1.05;  // ellipse counted as a circle below this axis ratio
    double tie_ellipse_ratio = 1.2;    // equal-consensus ties go to the ellipse above this
    double kind_margin_pct = 8.0;      // line keeps a scan against a thin ellipse within this
};

/// One scan plus its three concurrent primitive fits.
struct ScanData {
    ScanLine scan;
    AllKindsFit fits;
};

/// The eight extreme points projected onto the reconstructed face or
/// longitudinal plane, sorted counter-clockwise.
struct SeedPoints {
    std::array<Vec3, 8> points;
    Plane plane;
};

/// Finds one principal direction of a cuboid or cylindrical object: the first
/// seed whose inbound/outbound turn is at most alpha_max yields the
/// normalized chord S[i+1] - S[i-1] (indices cyclic). Throws
/// NoPrincipalDirection when no seed qualifies.
Vec3 principal_direction(const SeedPoints& seeds, double alpha_max_deg = 10.0);

/// The cylinder-vs-sphere disambiguation: the cylinder hypothesis wins only
/// when its aggregate fit percentage is more than twice the sphere's.
inline bool cylinder_beats_sphere(double cylinder_agg_pct, double sphere_agg_pct) {
    return cylinder_agg_pct > 2.0 * sphere_agg_pct;
}

/// Shape decision from the per-scan fits: all circles -> sphere; all lines ->
/// cuboid; >= 2 ellipses with at most one line and one circle -> cylinder,
/// gated by the twice-rule against the sphere hypothesis when no line
/// supports it. Throws AmbiguousShape when no rule matches.
ShapeKind classify(const std::vector<ScanData>& scans, const ReconConfig& cfg = {});

/// The two inlier points bounding the fitted primitive's inlier arc (largest
/// angular gap) or segment (extreme signed projections). Ties break toward
/// the lower point index.
std::pair<Vec3, Vec3> extreme_inliers(const PrimitiveFit& fit, const std::vector<Vec3>& points);

/// Sphere from two or more fitted scan circles: center from the
/// least-squares intersection of the circles' normal lines, radius as the
/// distance from the center to the given extreme scan point.
Sphere sphere_from_circles(const std::vector<Circle3>& circles, const Vec3& extreme_point);

/// Kind-specific reconstructions over classified scans (4 scans each).
Sphere reconstruct_sphere(const std::vector<ScanData>& scans, const ReconConfig& cfg = {});
Cuboid reconstruct_cuboid(const std::vector<ScanData>& scans, const ReconConfig& cfg = {});
Cylinder reconstruct_cylinder(const std::vector<ScanData>& scans, const ReconConfig& cfg = {});

/// Grasp-relevant size of a reconstructed model: diameter for spheres and
/// cylinders, smaller face extent for cuboids.
double grasp_dimension(const ShapeModel& model);

/// Principal direction of a reconstructed model (cylinder axis, cuboid seed
/// direction); spheres have none.
std::optional<Vec3> principal_axis(const ShapeModel& model);

enum class FailureCause {
    None,
    NoData,
    FitFailure,
    AmbiguousShape,
    DegenerateGeometry,
};

inline const char* to_string(FailureCause c) {
    switch (c) {
        case FailureCause::None: return "none";
        case FailureCause::NoData: return "no_data";
        case FailureCause::FitFailure: return "fit_failure";
        case FailureCause::AmbiguousShape: return "ambiguous_shape";
        case FailureCause::DegenerateGeometry: return "degenerate_geometry";
    }
    return "?";
}

struct ReconstructionReport {
    ShapeModel model;
    std::vector<std::optional<PrimitiveFit>> per_scan_fits;  // chosen fit per scan
    double shape_confidence = 0.0;                           // [0, 1]
    double elapsed_ms = 0.0;
    bool degraded_single_line = false;  // one-scan sphere estimate (known biased)
};

struct ReconstructionResult {
    std::optional<ReconstructionReport> report;
    FailureCause failure = FailureCause::None;
    std::string detail;
    std::vector<AllKindsFit> per_scan_diagnostics;
    double elapsed_ms = 0.0;

    bool ok() const { return report.has_value(); }
};

/// Full per-frame pipeline: concurrent primitive fits per scan, shape
/// decision, kind-specific reconstruction. Failures come back as a
/// NotReconstructed outcome with diagnostics, never as exceptions.
ReconstructionResult reconstruct(const std::vector<ScanLine>& scans, const ReconConfig& cfg = {});

}  // namespace scanrec
