#include <benchmark/benchmark.h>

#include "aclab/experiment.hpp"

namespace {

aclab::FiniteMdp bench_mdp(int n_states) {
  return aclab::make_garnet(n_states, 3, 2, 0.9, 2024);
}

aclab::SoftmaxPolicy bench_policy(const aclab::FiniteMdp& mdp, double scale = 0.3) {
  aclab::SoftmaxPolicy policy =
      aclab::SoftmaxPolicy::tabular(mdp.n_states, mdp.n_actions);
  aclab::CounterRng rng(7);
  Eigen::VectorXd params(policy.params().size());
  for (Eigen::Index i = 0; i < params.size(); ++i)
    params(i) = scale * rng.next_gaussian();
  policy.set_params(params);
  return policy;
}

void BM_LearnerStep(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const aclab::FiniteMdp mdp = bench_mdp(n);
  aclab::PowerSchedule schedule;
  schedule.actor_scale = 0.5;
  schedule.critic_scale = 0.5;
  schedule.target_scale = 0.5;
  aclab::Learner learner(mdp, aclab::SoftmaxPolicy::tabular(n, 3),
                         aclab::CriticFeatures::tabular(n), schedule);
  aclab::LearnerState run_state = learner.initial_state(1);
  for (auto _ : state) {
    benchmark::DoNotOptimize(learner.step(run_state));
  }
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_LearnerStep)->Arg(5)->Arg(25)->Arg(100);

void BM_LearnerStepGuarded(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const aclab::FiniteMdp mdp = bench_mdp(n);
  aclab::PowerSchedule schedule;
  schedule.actor_scale = 0.5;
  schedule.critic_scale = 0.5;
  schedule.target_scale = 0.5;
  aclab::LearnerOptions options;
  options.norm_guard = 1.0;
  aclab::Learner learner(mdp, aclab::SoftmaxPolicy::tabular(n, 3),
                         aclab::CriticFeatures::tabular(n), schedule, options);
  aclab::LearnerState run_state = learner.initial_state(1);
  for (auto _ : state) {
    benchmark::DoNotOptimize(learner.step(run_state));
  }
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_LearnerStepGuarded)->Arg(5)->Arg(25);

void BM_ActionProbs(benchmark::State& state) {
  const aclab::FiniteMdp mdp = bench_mdp(25);
  const aclab::SoftmaxPolicy policy = bench_policy(mdp);
  int s = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(policy.action_probs(s));
    s = (s + 1) % mdp.n_states;
  }
}
BENCHMARK(BM_ActionProbs);

void BM_Score(benchmark::State& state) {
  const aclab::FiniteMdp mdp = bench_mdp(25);
  const aclab::SoftmaxPolicy policy = bench_policy(mdp);
  int s = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(policy.score(s, 1));
    s = (s + 1) % mdp.n_states;
  }
}
BENCHMARK(BM_Score);

void BM_OccupancyLinearSolve(benchmark::State& state) {
  const aclab::FiniteMdp mdp = bench_mdp(static_cast<int>(state.range(0)));
  const aclab::SoftmaxPolicy policy = bench_policy(mdp);
  for (auto _ : state) {
    benchmark::DoNotOptimize(aclab::discounted_occupancy(mdp, policy));
  }
}
BENCHMARK(BM_OccupancyLinearSolve)->Arg(5)->Arg(25)->Arg(100);

void BM_OccupancySeries(benchmark::State& state) {
  const aclab::FiniteMdp mdp = bench_mdp(static_cast<int>(state.range(0)));
  const aclab::SoftmaxPolicy policy = bench_policy(mdp);
  for (auto _ : state) {
    benchmark::DoNotOptimize(aclab::discounted_occupancy_series(mdp, policy, 1e-10));
  }
}
BENCHMARK(BM_OccupancySeries)->Arg(5)->Arg(25);

void BM_OccupancyStationary(benchmark::State& state) {
  const aclab::FiniteMdp mdp = bench_mdp(static_cast<int>(state.range(0)));
  const aclab::SoftmaxPolicy policy = bench_policy(mdp);
  const Eigen::MatrixXd chain = aclab::state_chain_kernel(mdp, policy);
  for (auto _ : state) {
    benchmark::DoNotOptimize(aclab::stationary_distribution(chain));
  }
}
BENCHMARK(BM_OccupancyStationary)->Arg(5)->Arg(25);

void BM_TdFixedPoint(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const aclab::FiniteMdp mdp = bench_mdp(n);
  const aclab::SoftmaxPolicy policy = bench_policy(mdp);
  const aclab::CriticFeatures features = aclab::CriticFeatures::tabular(n);
  for (auto _ : state) {
    benchmark::DoNotOptimize(aclab::td_fixed_point(mdp, policy, features));
  }
}
BENCHMARK(BM_TdFixedPoint)->Arg(5)->Arg(25)->Arg(100);

void BM_OracleReport(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const aclab::FiniteMdp mdp = bench_mdp(n);
  const aclab::SoftmaxPolicy policy = bench_policy(mdp);
  const aclab::CriticFeatures features = aclab::CriticFeatures::tabular(n);
  for (auto _ : state) {
    benchmark::DoNotOptimize(aclab::oracle_report(mdp, policy, features));
  }
}
BENCHMARK(BM_OracleReport)->Arg(5)->Arg(25);

}  // namespace

BENCHMARK_MAIN();
