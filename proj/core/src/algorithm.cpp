#include "aclab/algorithm.hpp"

#include <stdexcept>
#include <string>
#include <utility>

namespace aclab {

double td_error(const FiniteMdp& mdp, const CriticFeatures& features,
                const Eigen::VectorXd& weights, int state, int next_state, double reward) {
  return reward + mdp.discount * features.value_of(weights, next_state) -
         features.value_of(weights, state);
}

double target_td_error(const FiniteMdp& mdp, const CriticFeatures& features,
                       const Eigen::VectorXd& critic_weights,
                       const Eigen::VectorXd& target_weights, int state, int next_state,
                       double reward) {
  return reward + mdp.discount * features.value_of(target_weights, next_state) -
         features.value_of(critic_weights, state);
}

double norm_guard_factor(double c0, double weight_norm) {
  if (c0 <= 0.0) return 1.0;
  return std::min(1.0, (1.0 + c0) / (1.0 + weight_norm));
}

Learner::Learner(FiniteMdp mdp, SoftmaxPolicy policy, CriticFeatures features,
                 PowerSchedule schedule, LearnerOptions options)
    : mdp_(std::move(mdp)),
      policy_(std::move(policy)),
      initial_policy_params_(policy_.params()),
      features_(std::move(features)),
      schedule_(std::move(schedule)),
      options_(std::move(options)) {
  if (policy_.n_states() != mdp_.n_states || policy_.n_actions() != mdp_.n_actions)
    throw std::invalid_argument("Learner: policy shape does not match the MDP");
  if (features_.n_states() != mdp_.n_states)
    throw std::invalid_argument("Learner: critic features do not match the MDP state count");
  schedule_.validate();
  const auto check_dim = [this](const Eigen::VectorXd& w, const char* which) {
    if (w.size() != 0 && w.size() != features_.dim())
      throw std::invalid_argument(std::string("Learner: ") + which +
                                  " initialization has the wrong dimension");
  };
  check_dim(options_.initial_critic_weights, "critic");
  check_dim(options_.initial_target_weights, "target");
  if (options_.target_sync_period < 0)
    throw std::invalid_argument("Learner: target_sync_period must be nonnegative");
}

LearnerState Learner::initial_state(std::uint64_t seed) const {
  LearnerState state{initial_policy_params_,
                     options_.initial_critic_weights.size() != 0
                         ? options_.initial_critic_weights
                         : Eigen::VectorXd::Zero(features_.dim()).eval(),
                     Eigen::VectorXd(),
                     start_chain(mdp_, seed),
                     0};
  state.target_weights = options_.initial_target_weights.size() != 0
                             ? options_.initial_target_weights
                             : state.critic_weights;
  return state;
}

StepRecord Learner::step(LearnerState& state) {
  policy_.set_params(state.policy_params);
  const int s = state.chain.state;
  const int a = policy_.sample_action(s, state.chain.rng);
  const EnvStep env = sample_env_step(mdp_, state.chain, a);

  const StepSizes rates = schedule_.at(state.t);
  const double delta =
      td_error(mdp_, features_, state.critic_weights, s, env.next_state, env.reward);
  const double delta_target = target_td_error(mdp_, features_, state.critic_weights,
                                              state.target_weights, s, env.next_state,
                                              env.reward);

  StepRecord rec;
  rec.t = state.t;
  rec.state = s;
  rec.action = a;
  rec.next_state = env.next_state;
  rec.reward = env.reward;
  rec.continued = env.continued;
  rec.td_err = delta;
  rec.target_td_err = delta_target;
  rec.guard = norm_guard_factor(options_.norm_guard, state.critic_weights.norm());

  // Actor first, from the pre-update critic weights.
  const double actor_error = options_.actor_uses_target_error ? delta_target : delta;
  const double actor_gain =
      rates.actor / (1.0 - mdp_.discount) * rec.guard * actor_error;
  if (actor_gain != 0.0) state.policy_params.noalias() += actor_gain * policy_.score(s, a);

  state.critic_weights.noalias() += rates.critic * delta_target * features_.row(s).transpose();

  // Target trails the post-update critic.
  if (options_.target_sync_period > 0) {
    if ((state.t + 1) % options_.target_sync_period == 0)
      state.target_weights = state.critic_weights;
  } else {
    state.target_weights += rates.target * (state.critic_weights - state.target_weights);
  }

  ++state.t;

  if (!state.policy_params.allFinite() || !state.critic_weights.allFinite() ||
      !state.target_weights.allFinite())
    throw std::runtime_error("learner produced a non-finite iterate at step " +
                             std::to_string(rec.t));
  return rec;
}

RunResult Learner::run(std::uint64_t seed, std::int64_t horizon, std::int64_t snapshot_stride,
                       const StepObserver& observer) {
  return run_from(initial_state(seed), horizon, snapshot_stride, observer);
}

RunResult Learner::run_from(LearnerState state, std::int64_t horizon,
                            std::int64_t snapshot_stride, const StepObserver& observer) {
  if (horizon < 0) throw std::invalid_argument("Learner::run: negative horizon");
  if (snapshot_stride < 0) throw std::invalid_argument("Learner::run: negative stride");

  std::vector<Snapshot> snapshots;
  const auto capture = [&snapshots, &state]() {
    snapshots.push_back(
        {state.t, state.policy_params, state.critic_weights, state.target_weights});
  };
  capture();
  for (std::int64_t i = 0; i < horizon; ++i) {
    const StepRecord rec = step(state);
    if (observer) observer(rec, state);
    if (snapshot_stride > 0 && state.t % snapshot_stride == 0 && i + 1 < horizon) capture();
  }
  if (horizon > 0) capture();
  return RunResult{std::move(snapshots), std::move(state)};
}

SoftmaxPolicy Learner::policy_at(const Eigen::VectorXd& params) const {
  SoftmaxPolicy p = policy_;
  p.set_params(params);
  return p;
}

}  // namespace aclab
