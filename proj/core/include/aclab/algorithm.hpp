#ifndef ACLAB_ALGORITHM_HPP
#define ACLAB_ALGORITHM_HPP

#include <cstdint>
#include <functional>
#include <vector>

#include <Eigen/Core>

#include "aclab/features.hpp"
#include "aclab/mdp.hpp"
#include "aclab/policy.hpp"
#include "aclab/schedule.hpp"

namespace aclab {

// One-step temporal-difference error with bootstrap and baseline read from
// the same weight vector.
double td_error(const FiniteMdp& mdp, const CriticFeatures& features,
                const Eigen::VectorXd& weights, int state, int next_state, double reward);

// Variant with the bootstrap read from the averaged target weights while the
// baseline stays on the live critic weights; this is the error the critic
// regresses on.
double target_td_error(const FiniteMdp& mdp, const CriticFeatures& features,
                       const Eigen::VectorXd& critic_weights,
                       const Eigen::VectorXd& target_weights, int state, int next_state,
                       double reward);

// Actor damping factor min(1, (1 + c0) / (1 + ||w||)). Exactly one inside
// the ball ||w|| <= c0; outside it the damped signal norm ||w|| * factor
// stays within [c0, 1 + c0). c0 <= 0 disables the guard.
double norm_guard_factor(double c0, double weight_norm);

struct LearnerOptions {
  // Feed the actor the target-form error instead of the plain one. Off by
  // default; the plain error is what the drift and bias oracles describe.
  bool actor_uses_target_error = false;
  // Radius c0 of the damping guard on the actor step; zero disables it.
  double norm_guard = 0.0;
  // When positive, the target is a hard copy of the critic every this many
  // steps instead of a Polyak average. Comparison option, off by default.
  std::int64_t target_sync_period = 0;
  // Initial weights. Empty means zeros for the critic and a copy of the
  // critic initialization for the target.
  Eigen::VectorXd initial_critic_weights;
  Eigen::VectorXd initial_target_weights;
};

struct LearnerState {
  Eigen::VectorXd policy_params;
  Eigen::VectorXd critic_weights;
  Eigen::VectorXd target_weights;
  ChainState chain;
  std::int64_t t = 0;
};

struct StepRecord {
  std::int64_t t = 0;  // index of the step taken, counting from zero
  int state = 0;
  int action = 0;
  int next_state = 0;
  double reward = 0.0;
  bool continued = false;
  double td_err = 0.0;         // plain error at the pre-update weights
  double target_td_err = 0.0;  // target-form error at the pre-update weights
  double guard = 1.0;          // damping factor applied to the actor step
};

struct Snapshot {
  std::int64_t t = 0;
  Eigen::VectorXd policy_params;
  Eigen::VectorXd critic_weights;
  Eigen::VectorXd target_weights;
};

struct RunResult {
  std::vector<Snapshot> snapshots;  // t = 0 first, final state last
  LearnerState final_state;
};

// Three-timescale actor-critic on a finite MDP. Per step, in order: sample
// an action from the current policy, sample the environment transition,
// update the actor from the pre-update critic weights, update the critic on
// the target-form error, move the target toward the post-update critic.
// Exactly five rng draws per step (action, next state, reward noise,
// restart state, continuation coin), so trajectories are comparable draw by
// draw across configurations.
class Learner {
 public:
  Learner(FiniteMdp mdp, SoftmaxPolicy policy, CriticFeatures features,
          PowerSchedule schedule, LearnerOptions options = {});

  // Policy parameters from the constructor policy, critic weights zero
  // unless overridden, target equal to the critic, cursor drawn from
  // init_dist.
  LearnerState initial_state(std::uint64_t seed) const;

  // One transition and one update of all three iterates. Throws
  // std::runtime_error naming the step when any iterate stops being finite.
  StepRecord step(LearnerState& state);

  using StepObserver = std::function<void(const StepRecord&, const LearnerState&)>;

  // Runs `horizon` steps from a fresh state, keeping snapshots at t = 0,
  // every `snapshot_stride` steps, and the final state. Stride zero keeps
  // the endpoints only. The observer, when set, sees every step.
  RunResult run(std::uint64_t seed, std::int64_t horizon, std::int64_t snapshot_stride = 0,
                const StepObserver& observer = nullptr);
  RunResult run_from(LearnerState state, std::int64_t horizon,
                     std::int64_t snapshot_stride = 0, const StepObserver& observer = nullptr);

  const FiniteMdp& mdp() const { return mdp_; }
  const CriticFeatures& features() const { return features_; }
  const PowerSchedule& schedule() const { return schedule_; }
  const LearnerOptions& options() const { return options_; }
  // Policy features with the given parameters, for oracle evaluation of a
  // state captured mid-run.
  SoftmaxPolicy policy_at(const Eigen::VectorXd& params) const;

 private:
  FiniteMdp mdp_;
  SoftmaxPolicy policy_;  // working copy; params synced from the state per step
  Eigen::VectorXd initial_policy_params_;
  CriticFeatures features_;
  PowerSchedule schedule_;
  LearnerOptions options_;
};

}  // namespace aclab

#endif
