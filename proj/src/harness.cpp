#include "scanrec/harness.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <random>
#include <sstream>

namespace scanrec {

using json = nlohmann::json;

namespace {

std::uint64_t fnv1a(const std::string& s) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    return h;
}

double percentile(std::vector<double> v, double q) {
    if (v.empty()) return 0.0;
    std::sort(v.begin(), v.end());
    const double idx = q * (v.size() - 1);
    const std::size_t lo = static_cast<std::size_t>(idx);
    const std::size_t hi = std::min(lo + 1, v.size() - 1);
    return v[lo] + (idx - lo) * (v[hi] - v[lo]);
}

/// Scan planes actually simulated per configuration.
std::vector<ScanLine> scans_for_trial(const Scene& scene, int n_lines, SimMode mode) {
    if (mode == SimMode::Analytic) return analytic_scan(scene, n_lines);
    const auto cloud = truncate_to_volume(emulate_depth_cloud(scene));
    auto scans = extract_scan_lines(cloud);
    if (n_lines == 1) return {scans[0]};
    if (n_lines == 2) return {scans[0], scans[2]};
    return scans;
}

}  // namespace

std::uint64_t spec_hash(const ExperimentSpec& spec) {
    std::ostringstream ss;
    ss << spec.label << '|' << spec.repetitions << '|' << spec.seed << '|' << spec.n_lines << '|'
       << to_string(spec.mode) << '|' << spec.recon.sac.distance_threshold << '|'
       << spec.recon.sac.max_iterations << '|' << spec.recon.sac.min_inlier_fraction << '|'
       << spec.recon.alpha_max_deg << '|' << spec.recon.circle_equiv_ratio << '|'
       << spec.recon.kind_margin_pct << '|';
    for (const auto& s : spec.scenes) ss << serialize_scene(s) << '|';
    return fnv1a(ss.str());
}

std::string rows_to_csv(const std::vector<TrialRow>& rows) {
    // Wall-clock latency is deliberately not serialized: reruns with the same
    // seeds must produce bit-identical CSV. Timing lives in the JSON report.
    std::ostringstream out;
    out << "trial_id,object,true_shape,reconstructed,correct_shape,true_size_mm,rec_size_mm,"
           "size_err_mm,orient_err_deg,failure_cause,seed\n";
    char buf[512];
    for (const auto& r : rows) {
        // %.17g keeps doubles round-trip exact, so the aggregate report can
        // be refolded from the CSV text bit-exactly.
        std::snprintf(buf, sizeof(buf), "%d,%s,%s,%d,%d,%.17g,%.17g,%.17g,%.17g,%s,%llu\n",
                      r.trial_id, r.object_name.c_str(), to_string(r.true_kind),
                      r.reconstructed ? 1 : 0, r.correct_shape ? 1 : 0, r.true_size_mm,
                      r.rec_size_mm, r.size_err_mm, r.orient_err_deg, r.failure_cause.c_str(),
                      static_cast<unsigned long long>(r.seed));
        out << buf;
    }
    return out.str();
}

MetricsReport aggregate_rows(const std::vector<TrialRow>& rows, std::uint64_t hash) {
    MetricsReport rep;
    rep.spec_hash = hash;
    rep.total_trials = static_cast<int>(rows.size());

    double size_sum = 0.0, size_pct_sum = 0.0, orient_sum = 0.0;
    int size_n = 0, orient_n = 0;
    std::vector<double> times;
    times.reserve(rows.size());
    for (const auto& r : rows) {
        auto& st = rep.per_shape[static_cast<int>(r.true_kind)];
        ++st.attempts;
        if (r.correct_shape) {
            ++st.correct;
            size_sum += r.size_err_mm;
            size_pct_sum += r.true_size_mm > 0.0 ? 100.0 * r.size_err_mm / r.true_size_mm : 0.0;
            ++size_n;
            if (r.orient_err_deg >= 0.0) {
                orient_sum += r.orient_err_deg;
                ++orient_n;
            }
        }
        if (r.failure_cause != "none") ++rep.failure_histogram[r.failure_cause];
        times.push_back(r.elapsed_ms);
    }
    rep.size_mae_mm = size_n ? size_sum / size_n : 0.0;
    rep.size_mae_pct = size_n ? size_pct_sum / size_n : 0.0;
    rep.orient_mae_deg = orient_n ? orient_sum / orient_n : 0.0;
    if (!times.empty()) {
        double total = 0.0;
        for (double t : times) total += t;
        rep.mean_ms = total / times.size();
        rep.median_ms = percentile(times, 0.5);
        rep.p90_ms = percentile(times, 0.9);
    }
    return rep;
}

std::string MetricsReport::to_json() const {
    json j;
    const char* names[3] = {"sphere", "cylinder", "cuboid"};
    for (int k = 0; k < 3; ++k) {
        j["per_shape"][names[k]] = {{"attempts", per_shape[k].attempts},
                                    {"correct", per_shape[k].correct},
                                    {"success_pct", per_shape[k].success_pct()}};
    }
    j["total_trials"] = total_trials;
    j["size_mae_mm"] = size_mae_mm;
    j["size_mae_pct"] = size_mae_pct;
    j["orient_mae_deg"] = orient_mae_deg;
    j["latency_ms"] = {{"mean", mean_ms}, {"median", median_ms}, {"p90", p90_ms}};
    j["failures"] = failure_histogram;
    j["spec_hash"] = spec_hash;
    return j.dump(2);
}

MetricsReport run_experiment(const ExperimentSpec& spec, std::vector<TrialRow>* rows_out) {
    std::vector<TrialRow> rows;
    rows.reserve(spec.scenes.size() * spec.repetitions);

    int trial_id = 0;
    for (std::size_t si = 0; si < spec.scenes.size(); ++si) {
        for (int rep = 0; rep < spec.repetitions; ++rep) {
            Scene scene = spec.scenes[si];
            // Isolated per-trial stream: one trial's seed never affects another.
            scene.rng_seed =
                mix_seed(spec.seed ^ mix_seed(0x1000 + si) ^ mix_seed(0x2000 + rep));

            TrialRow row;
            row.trial_id = trial_id++;
            row.seed = scene.rng_seed;
            const auto& target = scene.objects.front();
            row.object_name = target.name;
            row.true_kind = target.kind();
            row.true_size_mm = target.grasp_dimension_mm();

            const auto scans = scans_for_trial(scene, spec.n_lines, spec.mode);
            const auto result = reconstruct(scans, spec.recon);
            row.elapsed_ms = result.elapsed_ms;

            if (result.ok()) {
                row.reconstructed = true;
                const auto& model = result.report->model;
                row.correct_shape = kind_of(model) == row.true_kind;
                row.rec_size_mm = grasp_dimension(model);
                row.size_err_mm = std::abs(row.rec_size_mm - row.true_size_mm);
                const auto rec_axis = principal_axis(model);
                const auto true_axes = target.principal_axes();
                if (row.correct_shape && rec_axis && !true_axes.empty()) {
                    const Eigen::Matrix3d rt = scene.sensor_pose.rotation.transpose();
                    double best = 90.0;
                    for (const auto& ax : true_axes)
                        best = std::min(best, axis_angle_deg(*rec_axis, rt * ax));
                    row.orient_err_deg = best;
                }
                if (!row.correct_shape) row.failure_cause = "wrong_shape";
            } else {
                // Attribution order: truncation-clipped, then the pipeline's
                // own cause.
                bool clipped = false;
                for (const auto& s : scans) clipped |= s.points.size() < 6;
                if (clipped && result.failure != FailureCause::NoData) {
                    row.failure_cause = "truncation_clipped";
                } else {
                    row.failure_cause = to_string(result.failure);
                }
            }
            rows.push_back(std::move(row));
        }
    }

    MetricsReport rep = aggregate_rows(rows, spec_hash(spec));
    if (rows_out) *rows_out = std::move(rows);
    return rep;
}

std::vector<SensorPose> make_aim_trajectory(const Vec2& start_offset_mm, const Vec2& bias_mm,
                                            double overshoot_frac, int frames) {
    std::vector<SensorPose> poses;
    poses.reserve(frames);
    const Vec2 swing = start_offset_mm - bias_mm;
    const int approach = std::max(1, frames / 4);
    const int correct = std::max(1, frames / 4);
    for (int i = 0; i < frames; ++i) {
        Vec2 offset;
        if (i < approach) {
            // Approach overshooting past the residual bias.
            const double t = static_cast<double>(i) / approach;
            offset = bias_mm + swing * (1.0 - (1.0 + overshoot_frac) * t);
        } else if (i < approach + correct) {
            // Recover from the overshoot back to the bias.
            const double t = static_cast<double>(i - approach) / correct;
            offset = bias_mm + swing * (-overshoot_frac) * (1.0 - t);
        } else {
            // Correct the residual bias at 1 mm per frame.
            const double remaining = std::max(0.0, bias_mm.norm() - (i - approach - correct));
            offset = bias_mm.norm() > 1e-9 ? Vec2(bias_mm * (remaining / bias_mm.norm()))
                                           : Vec2(Vec2::Zero());
        }
        SensorPose pose;
        pose.position = Vec3(offset.x(), offset.y(), 0.0);
        poses.push_back(pose);
    }
    return poses;
}

std::string TrajectorySummary::to_json() const {
    json j;
    j["trials"] = trials;
    j["successes"] = successes;
    j["wrong_config"] = wrong_config;
    j["timeouts"] = timeouts;
    j["mean_frames_to_lock"] = mean_frames_to_lock;
    j["median_completion_s"] = median_completion_s;
    return j.dump(2);
}

TrajectorySummary run_trajectory_suite(const TrajectorySuiteSpec& spec,
                                       std::vector<TrialTrace>* traces_out) {
    TrajectorySummary sum;
    std::mt19937_64 rng(mix_seed(spec.seed ^ 0x54524a53ull));
    std::uniform_real_distribution<double> angle(0.0, 2.0 * kPi);

    std::vector<double> locks, completions;
    for (int i = 0; i < spec.trials; ++i) {
        const double a = angle(rng);
        const Vec2 start = spec.initial_offset_mm * Vec2(std::cos(a), std::sin(a));
        const Vec2 bias = spec.lateral_bias_mm * Vec2(std::cos(a), std::sin(a));
        const auto traj = make_aim_trajectory(start, bias, spec.overshoot_frac, spec.frames);

        Scene scene = spec.scene;
        scene.rng_seed = mix_seed(spec.seed ^ mix_seed(0x3000 + i));
        const TrialTrace trace = run_trial(scene, traj, spec.trial);

        ++sum.trials;
        switch (trace.verdict) {
            case TrialVerdict::Success: ++sum.successes; break;
            case TrialVerdict::WrongConfig: ++sum.wrong_config; break;
            case TrialVerdict::Timeout: ++sum.timeouts; break;
        }
        if (trace.frames_to_lock >= 0) locks.push_back(trace.frames_to_lock);
        if (trace.verdict != TrialVerdict::Timeout) completions.push_back(trace.completion_time_s);
        if (traces_out) traces_out->push_back(trace);
    }
    if (!locks.empty()) {
        double t = 0.0;
        for (double l : locks) t += l;
        sum.mean_frames_to_lock = t / locks.size();
    }
    if (!completions.empty()) sum.median_completion_s = percentile(completions, 0.5);
    return sum;
}

std::vector<Scene> ablation_scenes(int count, double noise_sigma, std::uint64_t seed) {
    std::mt19937_64 rng(mix_seed(seed ^ 0x41424c41ull));
    std::uniform_real_distribution<double> u01(0.0, 1.0);

    std::vector<Scene> scenes;
    scenes.reserve(count);
    for (int i = 0; i < count; ++i) {
        Scene s;
        s.noise_sigma = noise_sigma;
        s.rng_seed = mix_seed(seed ^ mix_seed(0x4000 + i));
        const double cx = -8.0 + 16.0 * u01(rng);
        const double cy = -8.0 + 16.0 * u01(rng);
        const double cz = 195.0 + 10.0 * u01(rng);
        const Vec3 center(cx, cy, cz);
        const double side = u01(rng) < 0.5 ? 1.0 : -1.0;
        if (u01(rng) < 0.5) {
            // Tilted cylinder, kept in the 35..55 degree band where all four
            // cuts stay on the finite body.
            const double tilt = deg2rad(35.0 + 20.0 * u01(rng)) * side;
            const double radius = 15.0 + 7.0 * u01(rng);
            const Vec3 axis(std::sin(tilt), std::cos(tilt), 0.0);
            s.objects.push_back(
                SceneObject{"abl_cyl", TrueCylinder{center, axis, radius, 78.0}});
        } else {
            // Tall tilted box so three seed chords share one edge.
            const double tilt = (15.0 + 20.0 * u01(rng)) * side;
            const double w = 32.0 + 10.0 * u01(rng);
            const double h = w * (1.9 + 0.4 * u01(rng));
            const Eigen::Matrix3d rot =
                Eigen::AngleAxisd(deg2rad(tilt), Vec3::UnitZ()).toRotationMatrix();
            s.objects.push_back(
                SceneObject{"abl_box", TrueBox{center, rot, Vec3(w, h, 40.0)}});
        }
        scenes.push_back(std::move(s));
    }
    return scenes;
}

}  // namespace scanrec
