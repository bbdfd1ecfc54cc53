#pragma once

#include "scanrec/feedback.hpp"
#include "scanrec/reconstruct.hpp"
#include "scanrec/scan_sim.hpp"

#include <optional>
#include <string>
#include <vector>

namespace scanrec {

enum class ControlState { Idle, Locked, Preshaped, DirectControl };

inline const char* to_string(ControlState s) {
    switch (s) {
        case ControlState::Idle: return "idle";
        case ControlState::Locked: return "locked";
        case ControlState::Preshaped: return "preshaped";
        case ControlState::DirectControl: return "direct_control";
    }
    return "?";
}

struct LockAcquired {};
struct LockLost {};
struct TriggerPreshape {};  // quick wrist flexion
struct TakeOver {};         // quick wrist extension
struct ObjectReleased {};
struct ProportionalCommand {
    double value = 0.0;  // [-1, 1], meaningful only in DirectControl
};
using UserEvent = std::variant<LockAcquired, LockLost, TriggerPreshape, TakeOver, ObjectReleased,
                               ProportionalCommand>;

/// Deterministic transition function; undefined (state, event) pairs are
/// explicit no-ops.
ControlState transition(ControlState state, const UserEvent& event);

struct GraspConfigParams {
    double aperture_margin_mm = 15.0;
    double aperture_max_mm = 100.0;
};

struct ProsthesisConfig {
    double wrist_rotation_deg = 0.0;  // [-90, 90], folded (grasp axes are sign-free)
    double aperture_mm = 0.0;         // clamped to [0, aperture_max]
    Vec3 grasp_axis = Vec3::UnitY();  // hand alignment direction
    bool object_too_large = false;    // pre-clamp aperture exceeded the maximum
};

/// Maps a reconstructed model to wrist rotation and grasp aperture. Spheres
/// grasp at neutral wrist; cylinders align the hand with the axis projection
/// into the frontal plane; cuboids grasp across the smaller face extent.
ProsthesisConfig grasp_config(const ShapeModel& model, const GraspConfigParams& params = {});

struct TrialFrame {
    double t_s = 0.0;
    ControlState state = ControlState::Idle;
    FeedbackState feedback;
    ReconstructionResult recon;
};

struct TrialConfig {
    ReconConfig recon;
    int n_lines = 4;
    double frame_rate_hz = 10.0;
    int lock_frames_to_trigger = 2;   // stable locked frames before preshape
    int transport_frames = 5;          // frames from take-over to release
    double wrist_tolerance_deg = 15.0;  // success verdict
    GraspConfigParams grasp;
};

enum class TrialVerdict { Success, WrongConfig, Timeout };

inline const char* to_string(TrialVerdict v) {
    switch (v) {
        case TrialVerdict::Success: return "success";
        case TrialVerdict::WrongConfig: return "wrong_config";
        case TrialVerdict::Timeout: return "timeout";
    }
    return "?";
}

struct TrialTrace {
    std::vector<TrialFrame> frames;
    std::optional<ProsthesisConfig> preshape;
    TrialVerdict verdict = TrialVerdict::Timeout;
    int frames_to_lock = -1;  // -1 when lock never happened
    double completion_time_s = 0.0;

    /// Line-per-frame CSV: t, state, tactor amplitudes x4, shape, size_mm,
    /// orientation_deg, elapsed_ms.
    std::string to_csv() const;
};

/// Replays a timed sequence of sensor poses through scan simulation,
/// reconstruction, aiming feedback and the control state machine. The
/// scripted user triggers preshape after a stable lock, takes over, then
/// releases after the transport constant.
TrialTrace run_trial(const Scene& scene, const std::vector<SensorPose>& aim_trajectory,
                     const TrialConfig& cfg = {});

}  // namespace scanrec
