#pragma once

#include "scanrec/control.hpp"
#include "scanrec/reconstruct.hpp"
#include "scanrec/scan_sim.hpp"

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace scanrec {

enum class SimMode { Analytic, Cloud };

inline const char* to_string(SimMode m) {
    return m == SimMode::Analytic ? "analytic" : "cloud";
}

struct ExperimentSpec {
    std::string label = "experiment";
    std::vector<Scene> scenes;
    int repetitions = 1;
    std::uint64_t seed = 0;
    int n_lines = 4;
    SimMode mode = SimMode::Analytic;
    ReconConfig recon;
};

struct TrialRow {
    int trial_id = 0;
    std::string object_name;
    ShapeKind true_kind = ShapeKind::Sphere;
    bool reconstructed = false;
    bool correct_shape = false;
    double true_size_mm = 0.0;
    double rec_size_mm = 0.0;
    double size_err_mm = 0.0;       // valid when correct_shape
    double orient_err_deg = -1.0;   // -1 when not applicable
    double elapsed_ms = 0.0;
    std::string failure_cause = "none";
    std::uint64_t seed = 0;
};

struct ShapeStats {
    int attempts = 0;
    int correct = 0;
    double success_pct() const { return attempts ? 100.0 * correct / attempts : 0.0; }
};

struct MetricsReport {
    std::array<ShapeStats, 3> per_shape{};  // indexed by ShapeKind
    int total_trials = 0;
    // Size/orientation MAE are over correct reconstructions only.
    double size_mae_mm = 0.0;
    double size_mae_pct = 0.0;
    double orient_mae_deg = 0.0;
    double mean_ms = 0.0;
    double median_ms = 0.0;
    double p90_ms = 0.0;
    std::map<std::string, int> failure_histogram;
    std::uint64_t spec_hash = 0;

    const ShapeStats& stats(ShapeKind k) const { return per_shape[static_cast<int>(k)]; }
    std::string to_json() const;
};

/// Stable content hash of the experiment parameters, embedded in every
/// report for reproducibility (FNV-1a 64).
std::uint64_t spec_hash(const ExperimentSpec& spec);

/// Deterministic CSV of per-trial rows (header + one line per trial).
std::string rows_to_csv(const std::vector<TrialRow>& rows);

/// Pure fold of rows into the aggregate report; run_experiment's report is
/// exactly this fold over its rows.
MetricsReport aggregate_rows(const std::vector<TrialRow>& rows, std::uint64_t hash);

/// Runs scenes x repetitions through the selected scan source and the
/// reconstruction pipeline. Deterministic per spec.seed; each trial derives
/// an isolated seed. Optionally returns the per-trial rows.
MetricsReport run_experiment(const ExperimentSpec& spec, std::vector<TrialRow>* rows_out = nullptr);

/// Parametric aiming-error trajectory: starts at a lateral offset, overshoots
/// past the residual bias, converges to the bias, then corrects the bias at a
/// fixed rate. Sensor translations only.
std::vector<SensorPose> make_aim_trajectory(const Vec2& start_offset_mm, const Vec2& bias_mm,
                                            double overshoot_frac, int frames);

struct TrajectorySuiteSpec {
    Scene scene;
    int trials = 10;
    double initial_offset_mm = 35.0;
    double overshoot_frac = 0.3;
    double lateral_bias_mm = 0.0;
    int frames = 80;
    std::uint64_t seed = 0;
    TrialConfig trial;
};

struct TrajectorySummary {
    int trials = 0;
    int successes = 0;
    int wrong_config = 0;
    int timeouts = 0;
    double mean_frames_to_lock = -1.0;
    double median_completion_s = -1.0;
    std::string to_json() const;
};

/// Runs randomized aiming trajectories against one scene; the TAT analogue
/// is frames-to-lock plus the fixed transport constant.
TrajectorySummary run_trajectory_suite(const TrajectorySuiteSpec& spec,
                                       std::vector<TrialTrace>* traces_out = nullptr);

/// Randomized tilted cylinders and cuboids for the scan-count ablation.
std::vector<Scene> ablation_scenes(int count, double noise_sigma, std::uint64_t seed);

}  // namespace scanrec
