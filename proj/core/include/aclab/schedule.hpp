#ifndef ACLAB_SCHEDULE_HPP
#define ACLAB_SCHEDULE_HPP

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "aclab/mdp.hpp"
#include "aclab/policy.hpp"
#include "aclab/textdoc.hpp"

namespace aclab {

struct StepSizes {
  double actor = 0.0;
  double critic = 0.0;
  double target = 0.0;
};

// Polynomially decaying step sizes scale / (1 + t)^decay for the three
// update clocks. actor_scale may be zero, which freezes the policy and
// turns the learner into a pure evaluation loop.
struct PowerSchedule {
  double actor_scale = 1.0;
  double critic_scale = 1.0;
  double target_scale = 1.0;
  double actor_decay = 2.0 / 3.0;
  double critic_decay = 1.0 / 3.0;
  double target_decay = 0.5;

  StepSizes at(std::int64_t t) const;
  void validate() const;
};

PowerSchedule schedule_from_doc(const TextDoc& doc);
TextDoc schedule_to_doc(const PowerSchedule& schedule);

enum class ScheduleRegime { asymptotic, finite_time, neither };

// Structural facts about a schedule that the convergence arguments lean
// on. The asymptotic regime wants divergent sums with square-summable
// tails and vanishing ratios; the finite-time regime wants the strict
// exponent ordering 0 < critic < target < actor < 1.
struct ScheduleReport {
  bool diverges_actor = false;
  bool diverges_critic = false;
  bool diverges_target = false;
  bool square_summable_actor = false;
  bool square_summable_critic = false;
  bool square_summable_target = false;
  bool ratios_vanish = false;      // critic slower to decay than target, target than actor
  bool finite_time_ordering = false;
  bool target_step_bounded = false;  // target_scale <= 1 keeps the average a convex mix
  bool nonincreasing = false;
  ScheduleRegime regime = ScheduleRegime::neither;
};

ScheduleReport analyze_schedule(const PowerSchedule& schedule);
std::string regime_name(ScheduleRegime regime);

// Smallest t >= 1 with c * sigma^(t-1) below the slowest step size at the
// horizon. Computed in closed form from logarithms, then nudged by direct
// evaluation so boundary rounding cannot put it off by one.
std::int64_t mixing_time(const PowerSchedule& schedule, std::int64_t horizon, double c,
                         double sigma);

// Connectivity and periodicity of a finite chain, read off the directed
// graph of nonzero transition entries.
struct ErgodicityReport {
  bool irreducible = false;
  int period = 0;
  bool aperiodic = false;
  bool ergodic = false;
};

ErgodicityReport ergodicity_report(const Eigen::MatrixXd& kernel);

// Geometric envelope fitted to the exact total-variation decay of a chain:
// max_s TV(K^t(s, .), stationary) <= c_fit * sigma_fit^t for all sampled t.
struct MixingFit {
  double slem = 0.0;       // second-largest eigenvalue modulus of the kernel
  double c_fit = 0.0;
  double sigma_fit = 0.0;
  bool decay_bounded = false;
  std::vector<double> tv_curve;
};

MixingFit fit_mixing_envelope(const Eigen::MatrixXd& kernel, const Eigen::VectorXd& stationary,
                              int max_steps = 200);

}  // namespace aclab

#endif
