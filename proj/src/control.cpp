#include "scanrec/control.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

namespace scanrec {

namespace {

// Wrist angle of an alignment direction: its frontal-plane projection vs
// vertical, folded to [-90, 90] (grasp axes have no sign).
double wrist_of(const Vec3& align) {
    const double px = align.x(), py = align.y();
    if (std::hypot(px, py) < 1e-9) return 0.0;
    double deg = rad2deg(std::atan2(px, py));
    while (deg > 90.0) deg -= 180.0;
    while (deg < -90.0) deg += 180.0;
    return deg;
}

double wrist_difference_deg(double a, double b) {
    double d = std::fmod(std::abs(a - b), 180.0);
    return std::min(d, 180.0 - d);
}

double model_size(const ShapeModel& m) { return grasp_dimension(m); }

const char* model_kind_name(const ShapeModel& m) { return to_string(kind_of(m)); }

}  // namespace

ControlState transition(ControlState state, const UserEvent& event) {
    switch (state) {
        case ControlState::Idle:
            if (std::holds_alternative<LockAcquired>(event)) return ControlState::Locked;
            break;
        case ControlState::Locked:
            if (std::holds_alternative<LockLost>(event)) return ControlState::Idle;
            if (std::holds_alternative<TriggerPreshape>(event)) return ControlState::Preshaped;
            break;
        case ControlState::Preshaped:
            // Re-aiming is allowed; lock loss keeps the held preshape.
            if (std::holds_alternative<LockAcquired>(event)) return ControlState::Locked;
            if (std::holds_alternative<TakeOver>(event)) return ControlState::DirectControl;
            break;
        case ControlState::DirectControl:
            if (std::holds_alternative<ObjectReleased>(event)) return ControlState::Idle;
            break;
    }
    return state;  // undefined pairs are no-ops
}

ProsthesisConfig grasp_config(const ShapeModel& model, const GraspConfigParams& params) {
    ProsthesisConfig cfg;
    double aperture = 0.0;
    if (const auto* s = std::get_if<Sphere>(&model)) {
        aperture = 2.0 * s->radius + params.aperture_margin_mm;
        cfg.wrist_rotation_deg = 0.0;
        cfg.grasp_axis = Vec3::UnitY();
    } else if (const auto* c = std::get_if<Cylinder>(&model)) {
        aperture = 2.0 * c->radius + params.aperture_margin_mm;
        cfg.grasp_axis = c->axis;
        cfg.wrist_rotation_deg = wrist_of(c->axis);
    } else {
        const auto& b = std::get<Cuboid>(model);
        // Grasp across the smaller face extent, hand aligned with the longer
        // principal direction.
        const Vec3 align = b.extent_u <= b.extent_v ? b.principal_v : b.principal_u;
        aperture = std::min(b.extent_u, b.extent_v) + params.aperture_margin_mm;
        cfg.grasp_axis = align;
        cfg.wrist_rotation_deg = wrist_of(align);
    }
    if (aperture > params.aperture_max_mm) {
        cfg.object_too_large = true;
        aperture = params.aperture_max_mm;
    }
    cfg.aperture_mm = std::max(0.0, aperture);
    return cfg;
}

std::string TrialTrace::to_csv() const {
    std::ostringstream out;
    out << "t_s,state,amp_up,amp_right,amp_down,amp_left,shape,size_mm,orientation_deg,"
           "elapsed_ms\n";
    char buf[256];
    for (const auto& f : frames) {
        std::array<double, 4> amp{};
        if (const auto* d = std::get_if<Directional>(&f.feedback)) amp = d->amplitudes;
        const char* shape = "none";
        double size = 0.0, orient = 0.0;
        if (f.recon.ok()) {
            const auto& m = f.recon.report->model;
            shape = model_kind_name(m);
            size = model_size(m);
            if (const auto axis = principal_axis(m)) orient = wrist_of(*axis);
        }
        std::snprintf(buf, sizeof(buf), "%.3f,%s,%.4f,%.4f,%.4f,%.4f,%s,%.3f,%.3f,%.3f\n", f.t_s,
                      to_string(f.state), amp[0], amp[1], amp[2], amp[3], shape, size, orient,
                      f.recon.elapsed_ms);
        out << buf;
    }
    return out.str();
}

TrialTrace run_trial(const Scene& scene, const std::vector<SensorPose>& aim_trajectory,
                     const TrialConfig& cfg) {
    TrialTrace trace;
    if (scene.objects.empty() || aim_trajectory.empty()) return trace;

    ControlState state = ControlState::Idle;
    int stable_locked = 0;
    int frames_since_takeover = -1;
    std::optional<ShapeModel> locked_model;
    SensorPose preshape_pose;
    bool released = false;

    for (std::size_t i = 0; i < aim_trajectory.size() && !released; ++i) {
        Scene frame_scene = scene;
        frame_scene.sensor_pose = aim_trajectory[i];
        frame_scene.rng_seed = mix_seed(scene.rng_seed ^ (0x5452ull + i));

        TrialFrame frame;
        frame.t_s = static_cast<double>(i) / cfg.frame_rate_hz;
        const auto scans = analytic_scan(frame_scene, cfg.n_lines);
        frame.recon = reconstruct(scans, cfg.recon);
        frame.feedback = feedback_step(scans, frame.recon.ok());

        // Lock condition drives the state machine.
        if (is_locked(frame.feedback)) {
            if (state == ControlState::Idle) state = transition(state, LockAcquired{});
            if (trace.frames_to_lock < 0) trace.frames_to_lock = static_cast<int>(i);
            locked_model = frame.recon.report->model;
            if (state == ControlState::Locked) ++stable_locked;
        } else {
            if (state == ControlState::Locked) state = transition(state, LockLost{});
            stable_locked = 0;
        }

        // Scripted user: preshape once the lock is stable, then take over,
        // transport, release.
        if (state == ControlState::Locked && stable_locked >= cfg.lock_frames_to_trigger &&
            locked_model) {
            state = transition(state, TriggerPreshape{});
            trace.preshape = grasp_config(*locked_model, cfg.grasp);
            preshape_pose = aim_trajectory[i];
        } else if (state == ControlState::Preshaped) {
            state = transition(state, TakeOver{});
            frames_since_takeover = 0;
        } else if (state == ControlState::DirectControl) {
            if (++frames_since_takeover >= cfg.transport_frames) {
                state = transition(state, ObjectReleased{});
                released = true;
                trace.completion_time_s = frame.t_s;
            }
        }

        frame.state = state;
        trace.frames.push_back(std::move(frame));
    }

    if (!trace.preshape) {
        trace.verdict = TrialVerdict::Timeout;
        return trace;
    }

    // Verdict against the (first) target object's ground truth, evaluated in
    // the sensor frame the preshape was taken in.
    const auto& target = scene.objects.front();
    const double true_size = target.grasp_dimension_mm();
    bool wrist_ok = true;
    if (const auto align = target.grasp_alignment_axis()) {
        const Vec3 expected = preshape_pose.rotation.transpose() * *align;
        wrist_ok = wrist_difference_deg(trace.preshape->wrist_rotation_deg,
                                        wrist_of(expected)) <= cfg.wrist_tolerance_deg;
    }
    const bool aperture_ok = trace.preshape->aperture_mm >= true_size;
    trace.verdict =
        aperture_ok && wrist_ok ? TrialVerdict::Success : TrialVerdict::WrongConfig;
    return trace;
}

}  // namespace scanrec
