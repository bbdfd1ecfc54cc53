#pragma once

#include "scanrec/geometry.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace scanrec {

// Capture volume: 100x100x100 mm box starting 150 mm in front of the sensor.
inline constexpr double kVolumeHalfWidth = 50.0;   // mm, x and y
inline constexpr double kVolumeNear = 150.0;       // mm, z
inline constexpr double kVolumeFar = 250.0;        // mm, z
inline constexpr double kScanTolerance = 1.0;      // mm, plane membership
inline constexpr double kDefaultArcSpacing = 0.5;  // mm, analytic sampling

// Depth-camera emulation constants (non-normative; stand-ins for the stream
// the scans were extracted from).
inline constexpr int kCloudWidth = 424;
inline constexpr int kCloudHeight = 240;
inline constexpr double kFovXDeg = 87.0;
inline constexpr double kFovYDeg = 58.0;

struct SensorPose {
    Vec3 position = Vec3::Zero();
    Eigen::Matrix3d rotation = Eigen::Matrix3d::Identity();  // sensor axes in world frame

    Vec3 world_to_sensor(const Vec3& p) const { return rotation.transpose() * (p - position); }
    Vec3 sensor_to_world(const Vec3& p) const { return rotation * p + position; }
};

/// Ground-truth solid primitives (full geometry, unlike the reconstructed
/// frontal-face models).
struct TrueSphere {
    Vec3 center;
    double radius = 0.0;
};

struct TrueCylinder {
    Vec3 center;
    Vec3 axis;  // unit
    double radius = 0.0;
    double length = 0.0;
};

struct TrueBox {
    Vec3 center;
    Eigen::Matrix3d rot = Eigen::Matrix3d::Identity();  // columns: local x, y, z in world
    Vec3 extents = Vec3::Zero();                        // full side lengths
};

using TrueShape = std::variant<TrueSphere, TrueCylinder, TrueBox>;

struct SceneObject {
    std::string name;
    TrueShape shape;

    ShapeKind kind() const;
    /// Grasp-relevant dimension: diameter for spheres/cylinders, smaller
    /// frontal-face extent for boxes (frontal face = face whose normal is
    /// closest to the optical axis).
    double grasp_dimension_mm() const;
    /// True principal directions usable for orientation error (cylinder axis,
    /// or the two in-face edge directions of the frontal box face). Empty for
    /// spheres.
    std::vector<Vec3> principal_axes() const;
    /// Direction a correct palmar grasp aligns the hand with: the cylinder
    /// axis, or the longer frontal-face direction of a box.
    std::optional<Vec3> grasp_alignment_axis() const;
};

struct Scene {
    std::vector<SceneObject> objects;
    SensorPose sensor_pose;
    double noise_sigma = 0.0;  // mm
    std::uint64_t rng_seed = 0;
};

struct ScanLine {
    ScanPlane plane;
    std::vector<Vec3> points;  // sensor frame, mm
};

/// First intersection of the ray origin + t*dir with the object surface, in
/// the sensor frame. Returns the smallest t > 1e-9 or nullopt.
std::optional<double> ray_first_hit(const Vec3& origin, const Vec3& dir, const TrueShape& shape);

/// Exact intersection curves of the scan planes with the visible object
/// surfaces, sampled at `spacing` mm of arc length. n_lines selects the
/// degraded configurations: 1 (horizontal), 2 (horizontal + vertical),
/// 4 (all planes). Gaussian noise of scene.noise_sigma is added isotropically
/// and the 1 mm plane tolerance plus the capture volume are enforced on the
/// result.
std::vector<ScanLine> analytic_scan(const Scene& scene, int n_lines,
                                    double spacing = kDefaultArcSpacing);

/// Ray-cast depth cloud over a pinhole frustum, perturbed along each ray by
/// scene.noise_sigma. Points are in the sensor frame and NOT truncated.
std::vector<Vec3> emulate_depth_cloud(const Scene& scene, int width = kCloudWidth,
                                      int height = kCloudHeight);

/// Keeps exactly the points with x,y in [-50, 50] and z in [150, 250] mm.
std::vector<Vec3> truncate_to_volume(const std::vector<Vec3>& cloud);

/// Splits a truncated cloud into the four scan lines; a point belongs to
/// every plane within the 1 mm tolerance (points near the optical axis may
/// appear in several).
std::vector<ScanLine> extract_scan_lines(const std::vector<Vec3>& cloud);

/// Scene file I/O (JSON). parse(serialize(parse(text))) == parse(text),
/// value-exact.
Scene parse_scene(const std::string& json_text);
Scene load_scene(const std::string& path);
std::string serialize_scene(const Scene& scene);

/// The ten-object experiment set: two spheres, four cylinders and four boxes
/// in upright / laying / tilted poses, grasp sizes 35..85 mm.
std::vector<Scene> protocol_scenes(double noise_sigma, std::uint64_t seed);

/// Helpers for building scene objects from pose keywords.
Vec3 orientation_axis(const std::string& keyword);          // cylinders
Eigen::Matrix3d orientation_rotation(const std::string& keyword);  // boxes
Eigen::Matrix3d rpy_to_rotation(double roll_deg, double pitch_deg, double yaw_deg);

}  // namespace scanrec
