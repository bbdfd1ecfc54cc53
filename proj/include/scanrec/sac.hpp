#pragma once

#include "scanrec/ellipse_fit.hpp"
#include "scanrec/geometry.hpp"

#include <cstdint>
#include <optional>
#include <variant>
#include <vector>

namespace scanrec {

enum class PrimitiveKind { Circle, Line, Ellipse };

inline const char* to_string(PrimitiveKind k) {
    switch (k) {
        case PrimitiveKind::Circle: return "circle";
        case PrimitiveKind::Line: return "line";
        case PrimitiveKind::Ellipse: return "ellipse";
    }
    return "?";
}

/// Minimal sample size per model kind (circle 3, ellipse 6, line 2).
inline int sample_size(PrimitiveKind k) {
    switch (k) {
        case PrimitiveKind::Circle: return 3;
        case PrimitiveKind::Line: return 2;
        case PrimitiveKind::Ellipse: return 6;
    }
    return 0;
}

struct SacConfig {
    double distance_threshold = 1.5;  // mm
    int max_iterations = 250;         // per kind
    std::uint64_t rng_seed = 0;
    double min_inlier_fraction = 0.5;
};

struct PrimitiveFit {
    PrimitiveKind kind = PrimitiveKind::Circle;
    std::variant<Circle3, Line3, Ellipse3> params;
    std::vector<int> inlier_indices;
    double fit_percentage = 0.0;  // 100 * |inliers| / |points|

    const Circle3& circle() const { return std::get<Circle3>(params); }
    const Line3& line() const { return std::get<Line3>(params); }
    const Ellipse3& ellipse() const { return std::get<Ellipse3>(params); }
};

/// Euclidean 3-D distance from a point to a primitive.
double distance_to_primitive(const Vec3& p, const Circle3& c);
double distance_to_primitive(const Vec3& p, const Line3& l);
double distance_to_primitive(const Vec3& p, const Ellipse3& e);
double distance_to_primitive(const Vec3& p, const PrimitiveFit& fit);

/// Sample-consensus fit of one primitive kind. Deterministic given
/// cfg.rng_seed (each kind derives an independent stream from seed and kind
/// tag). Throws InsufficientInput when fewer than sample_size(kind) points
/// are given and FitFailure when no candidate reaches min_inlier_fraction.
PrimitiveFit ransac_fit(const std::vector<Vec3>& points, PrimitiveKind kind, const SacConfig& cfg);

struct AllKindsFit {
    std::optional<PrimitiveFit> circle;
    std::optional<PrimitiveFit> line;
    std::optional<PrimitiveFit> ellipse;

    const std::optional<PrimitiveFit>& of(PrimitiveKind k) const {
        switch (k) {
            case PrimitiveKind::Circle: return circle;
            case PrimitiveKind::Line: return line;
            default: return ellipse;
        }
    }
};

/// Fits all three primitive kinds to the same points; kinds whose
/// preconditions fail or whose consensus is too small come back absent.
AllKindsFit fit_all_kinds(const std::vector<Vec3>& points, const SacConfig& cfg);

/// SplitMix64 mix, used to derive decorrelated RNG streams from user seeds.
inline std::uint64_t mix_seed(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

}  // namespace scanrec
