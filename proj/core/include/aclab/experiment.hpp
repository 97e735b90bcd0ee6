#ifndef ACLAB_EXPERIMENT_HPP
#define ACLAB_EXPERIMENT_HPP

#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "aclab/algorithm.hpp"
#include "aclab/features.hpp"
#include "aclab/mdp.hpp"
#include "aclab/oracle.hpp"
#include "aclab/policy.hpp"
#include "aclab/schedule.hpp"

namespace aclab {

inline constexpr const char* kToolVersion = "0.1.0";

// One problem instance as the experiments consume it: environment, policy
// parameterization with its initial parameters, critic features.
struct InstanceBundle {
  FiniteMdp mdp;
  SoftmaxPolicy policy;
  CriticFeatures critic;
};

// Runs fn(0) .. fn(n-1) on up to `jobs` worker threads. Each index owns its
// output slot, so results never depend on scheduling order. Returns one
// string per index, empty on success, the exception message otherwise.
std::vector<std::string> parallel_for_indexed(int n, int jobs,
                                              const std::function<void(int)>& fn);

struct MetricOptions {
  std::int64_t horizon = 0;
  std::int64_t snapshot_stride = 0;  // 0 keeps endpoints only
  // Steps between fresh critic fixed-point solves feeding the running
  // time-average. Snapshot rows always use a fresh solve regardless.
  std::int64_t oracle_stride = 1;
  // Horizons at which the running time-average of the squared tracking
  // error is sampled; must be sorted, each in [1, horizon].
  std::vector<std::int64_t> average_checkpoints;
  // Compute gradient, bias, objective, and residual metrics at snapshots.
  // The critic tracking metrics are always on.
  bool actor_metrics = true;
};

// Per-seed trajectory metrics on a fixed snapshot grid. All snapshot values
// come from fresh oracle solves at the recorded parameter.
struct MetricTrace {
  std::vector<std::int64_t> snapshot_ts;
  std::vector<double> critic_err_sq;   // ||w_t - w*(theta_t)||^2
  std::vector<double> target_err_sq;   // ||wbar_t - w*(theta_t)||^2
  std::vector<double> grad_norm_sq;    // ||grad J(theta_t)||^2
  std::vector<double> bias_norm;       // ||b(theta_t)||
  std::vector<double> objective;       // J(theta_t)
  std::vector<double> pbe_residual;    // ||proj T(Phi w_t) - Phi w_t||
  std::vector<double> fa_error;        // approximation error at theta_t
  std::vector<double> checkpoint_avg;  // running avg of critic_err_sq, per checkpoint
  double final_avg = 0.0;              // (1/T) sum_{t<T} ||w_t - w*(theta_t)||^2
  double terminal_critic_err = 0.0;    // ||w_T - w*(theta_T)||
};

// One seeded run with oracle-metric recording.
MetricTrace traced_run(const InstanceBundle& instance, const PowerSchedule& schedule,
                       const LearnerOptions& learner_options, std::uint64_t seed,
                       const MetricOptions& options);

struct ExperimentOptions {
  int n_seeds = 20;
  std::uint64_t base_seed = 1;  // replicate k uses base_seed + k
  int jobs = 0;                 // 0 means available parallelism
  MetricOptions metrics;
  LearnerOptions learner;
};

// Seed-mean tracking curves for the critic and target against the moving
// fixed point, with per-point standard errors.
struct TrackingResult {
  std::vector<std::int64_t> snapshot_ts;
  std::vector<double> critic_err_sq_mean, critic_err_sq_se;
  std::vector<double> target_err_sq_mean, target_err_sq_se;
  std::vector<std::int64_t> checkpoints;
  std::vector<double> checkpoint_avg_mean;  // time-averaged squared error at each checkpoint
  double terminal_err_mean = 0.0;           // seed-mean ||w_T - w*(theta_T)||
  double final_avg_mean = 0.0, final_avg_se = 0.0;
  int n_seeds = 0;
  int failed_seeds = 0;
  std::vector<std::string> seed_errors;  // aligned with seed index, empty = ok
};

TrackingResult critic_tracking(const InstanceBundle& instance, const PowerSchedule& schedule,
                               const ExperimentOptions& options);

// Log-log rate fit of the time-averaged squared tracking error over a
// family of horizons, with the schedule's theoretical term exponents.
struct RateFit {
  std::vector<double> horizons;
  std::vector<double> values;      // seed-mean y(T)
  std::vector<double> std_errors;  // standard error of the seed mean
  double slope = 0.0;
  double slope_se = 0.0;
  double intercept = 0.0;
  bool fit_ok = false;
  std::string refusal;  // nonempty when the fit is refused, with the reason
  // Decay exponents of the four bound terms for the configured schedule:
  // -(1 - target_decay), -critic_decay, -2 (actor_decay - target_decay),
  // -2 (target_decay - critic_decay). The slowest (largest) one dominates.
  double term_target = 0.0;
  double term_critic = 0.0;
  double term_actor_gap = 0.0;
  double term_target_gap = 0.0;
  double dominant_exponent = 0.0;
  int n_seeds = 0;
  int failed_seeds = 0;
};

// Least-squares line through (log T, log y) with slope standard error; the
// shared fitter behind rate_sweep, exposed for direct use on fixed points.
void fit_loglog(const std::vector<double>& horizons, const std::vector<double>& values,
                RateFit& fit);

RateFit rate_sweep(const InstanceBundle& instance, const PowerSchedule& schedule,
                   const std::vector<std::int64_t>& horizons,
                   const ExperimentOptions& options);

// Same instance and seeds under two schedules; per-seed time-averaged
// terminal errors land at matching indices so the comparison is paired.
struct OrderingComparison {
  double first_mean = 0.0;
  double second_mean = 0.0;
  std::vector<double> first_values, second_values;  // per seed
  int n_seeds = 0;
  int failed_seeds = 0;
};

OrderingComparison schedule_comparison(const InstanceBundle& instance,
                                       const PowerSchedule& first,
                                       const PowerSchedule& second, std::int64_t horizon,
                                       const ExperimentOptions& options);

// Gradient-norm decay and the bias floor along full-algorithm runs; all
// gradient and bias values are exact oracle evaluations at snapshot times.
struct StationarityResult {
  std::vector<std::int64_t> snapshot_ts;
  std::vector<double> grad_norm_sq_mean, grad_norm_sq_se;
  std::vector<double> bias_norm_mean;
  std::vector<double> gap_mean;  // seed-mean of ||grad J|| - ||b||
  double initial_grad_norm_sq = 0.0;
  double min_grad_norm_sq = 0.0;
  std::int64_t argmin_t = 0;
  double min_gap = 0.0;
  std::int64_t argmin_gap_t = 0;
  // min over snapshots of (seed-mean ||grad||^2 - seed-mean ||b||^2)
  // compared against epsilon.
  double epsilon = 0.01;
  bool epsilon_crossed = false;
  int n_seeds = 0;
  int failed_seeds = 0;
  std::vector<std::string> seed_errors;
};

StationarityResult actor_stationarity(const InstanceBundle& instance,
                                      const PowerSchedule& schedule,
                                      const ExperimentOptions& options, double epsilon = 0.01);

// Consolidated assumption audit: feature rank and row norms, spectral
// certificates and sampling-chain ergodicity across sampled policy
// parameters, schedule structure, and the mixing-envelope fit at the
// initial parameter.
struct AuditOptions {
  int n_param_samples = 20;     // gaussian draws in addition to the zero vector
  std::uint64_t sample_seed = 99;
  double sample_scale = 1.0;
  std::int64_t horizon = 100000;  // horizon the mixing time is evaluated at
};

struct AuditReport {
  std::vector<OracleCheck> checks;
  bool all_passed = false;
  RankReport rank;
  ScheduleReport schedule_report;
  MixingFit mixing;               // pair-chain fit at the initial parameter
  std::int64_t mixing_steps = 0;  // mixing time at the configured horizon
};

AuditReport assumption_audit(const InstanceBundle& instance, const PowerSchedule& schedule,
                             const AuditOptions& options = {});

// Renderers. CSV columns are fixed per writer and all floats carry 17
// significant digits, so identical inputs give identical bytes.
std::string run_csv_text(const MetricTrace& trace);
std::string tracking_csv_text(const TrackingResult& result);
std::string stationarity_csv_text(const StationarityResult& result);
std::string rate_csv_text(const RateFit& fit);

// Log-log scatter of the fit with per-point error bars and the fitted line,
// drawn with plain SVG primitives.
std::string rate_svg(const RateFit& fit, const std::string& title);

TextDoc audit_report_to_doc(const AuditReport& report);

// Record of one tool invocation: what ran, on which inputs (by content
// hash), with which seeds, when. Timestamps live only here, never in the
// data files, so reruns stay byte-comparable.
struct RunManifest {
  std::string tool_version;
  std::string subcommand;
  std::string config_text;  // resolved configuration, serialized
  std::vector<std::pair<std::string, std::string>> input_hashes;  // path, content hash
  std::vector<std::uint64_t> seeds;
  std::string started_at;
  std::string finished_at;
};

std::string manifest_to_json(const RunManifest& manifest);
RunManifest manifest_from_json(const std::string& text);

// Re-hashes every input path in the manifest; returns a message per
// mismatch or unreadable file, empty when everything matches.
std::vector<std::string> verify_manifest_hashes(const RunManifest& manifest);

std::string utc_timestamp();

}  // namespace aclab

#endif
