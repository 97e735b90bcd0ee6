#include "aclab/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <thread>

#include <json.hpp>

#include "aclab/hashing.hpp"
#include "aclab/rng.hpp"

namespace aclab {

namespace {

double mean_of(const std::vector<double>& xs) {
  if (xs.empty()) return 0.0;
  double s = 0.0;
  for (double x : xs) s += x;
  return s / static_cast<double>(xs.size());
}

// Standard error of the mean from the sample standard deviation.
double se_of(const std::vector<double>& xs) {
  const std::size_t n = xs.size();
  if (n < 2) return 0.0;
  const double m = mean_of(xs);
  double ss = 0.0;
  for (double x : xs) ss += (x - m) * (x - m);
  return std::sqrt(ss / static_cast<double>(n - 1)) / std::sqrt(static_cast<double>(n));
}

void validate_metric_options(const MetricOptions& options) {
  if (options.horizon < 0) throw std::invalid_argument("metrics: negative horizon");
  if (options.snapshot_stride < 0) throw std::invalid_argument("metrics: negative stride");
  if (options.oracle_stride < 1)
    throw std::invalid_argument("metrics: oracle stride must be at least one");
  std::int64_t prev = 0;
  for (std::int64_t cp : options.average_checkpoints) {
    if (cp <= prev || cp > options.horizon)
      throw std::invalid_argument(
          "metrics: checkpoints must be strictly increasing and within the horizon");
    prev = cp;
  }
}

struct SeedPool {
  std::vector<MetricTrace> traces;
  std::vector<std::string> errors;
  int failed = 0;
};

SeedPool run_seed_pool(const InstanceBundle& instance, const PowerSchedule& schedule,
                       const ExperimentOptions& options, const MetricOptions& metrics) {
  if (options.n_seeds < 1) throw std::invalid_argument("experiment: n_seeds must be positive");
  SeedPool pool;
  pool.traces.resize(static_cast<std::size_t>(options.n_seeds));
  pool.errors = parallel_for_indexed(options.n_seeds, options.jobs, [&](int k) {
    pool.traces[static_cast<std::size_t>(k)] = traced_run(
        instance, schedule, options.learner,
        options.base_seed + static_cast<std::uint64_t>(k), metrics);
  });
  for (const auto& e : pool.errors)
    if (!e.empty()) ++pool.failed;
  if (pool.failed == options.n_seeds)
    throw std::runtime_error("experiment: every seed failed; first error: " + pool.errors[0]);
  return pool;
}

// Applies fn to the k-th successful trace's value at each grid position,
// collecting per-position samples across seeds.
template <typename Fn>
std::vector<std::vector<double>> gather(const SeedPool& pool, std::size_t grid_size, Fn fn) {
  std::vector<std::vector<double>> samples(grid_size);
  for (std::size_t k = 0; k < pool.traces.size(); ++k) {
    if (!pool.errors[k].empty()) continue;
    for (std::size_t i = 0; i < grid_size; ++i) samples[i].push_back(fn(pool.traces[k], i));
  }
  return samples;
}

const MetricTrace& first_success(const SeedPool& pool) {
  for (std::size_t k = 0; k < pool.traces.size(); ++k)
    if (pool.errors[k].empty()) return pool.traces[k];
  throw std::logic_error("experiment: no successful seed");
}

}  // namespace

std::vector<std::string> parallel_for_indexed(int n, int jobs,
                                              const std::function<void(int)>& fn) {
  if (n < 0) throw std::invalid_argument("parallel_for_indexed: negative count");
  std::vector<std::string> errors(static_cast<std::size_t>(n));
  if (n == 0) return errors;
  int workers = jobs > 0 ? jobs : static_cast<int>(std::thread::hardware_concurrency());
  workers = std::max(1, std::min(workers, n));

  std::atomic<int> next{0};
  const auto work = [&]() {
    for (int i = next.fetch_add(1); i < n; i = next.fetch_add(1)) {
      try {
        fn(i);
      } catch (const std::exception& e) {
        errors[static_cast<std::size_t>(i)] = e.what();
      } catch (...) {
        errors[static_cast<std::size_t>(i)] = "unknown error";
      }
    }
  };
  if (workers == 1) {
    work();
    return errors;
  }
  std::vector<std::thread> threads;
  threads.reserve(static_cast<std::size_t>(workers));
  for (int w = 0; w < workers; ++w) threads.emplace_back(work);
  for (auto& t : threads) t.join();
  return errors;
}

MetricTrace traced_run(const InstanceBundle& instance, const PowerSchedule& schedule,
                       const LearnerOptions& learner_options, std::uint64_t seed,
                       const MetricOptions& options) {
  validate_metric_options(options);
  Learner learner(instance.mdp, instance.policy, instance.critic, schedule, learner_options);
  LearnerState state = learner.initial_state(seed);

  MetricTrace trace;
  const auto record_snapshot = [&](const LearnerState& st) {
    const SoftmaxPolicy pol = learner.policy_at(st.policy_params);
    const Eigen::VectorXd fp = td_fixed_point(instance.mdp, pol, instance.critic);
    trace.snapshot_ts.push_back(st.t);
    trace.critic_err_sq.push_back((st.critic_weights - fp).squaredNorm());
    trace.target_err_sq.push_back((st.target_weights - fp).squaredNorm());
    if (options.actor_metrics) {
      trace.grad_norm_sq.push_back(exact_gradient(instance.mdp, pol).squaredNorm());
      trace.bias_norm.push_back(gradient_bias(instance.mdp, pol, instance.critic).norm());
      trace.objective.push_back(aclab::objective(instance.mdp, pol));
      const Eigen::VectorXd fitted = instance.critic.matrix() * st.critic_weights;
      const Eigen::VectorXd projected =
          projection(instance.mdp, pol, instance.critic) * bellman_apply(instance.mdp, pol, fitted);
      trace.pbe_residual.push_back((projected - fitted).norm());
      trace.fa_error.push_back(approximation_error(instance.mdp, pol, instance.critic));
    }
  };

  record_snapshot(state);

  // The running average tracks the squared distance of the critic iterate
  // to the fixed point of the current policy parameter. The solve is
  // refreshed every oracle_stride steps; a frozen actor keeps the parameter
  // and hence the fixed point constant, so one solve is exact.
  const bool frozen_actor = schedule.actor_scale == 0.0;
  Eigen::VectorXd cached_fp;
  std::int64_t last_solve = -1;
  double acc = 0.0;
  std::size_t next_checkpoint = 0;

  for (std::int64_t t = 0; t < options.horizon; ++t) {
    if (last_solve < 0 || (!frozen_actor && t - last_solve >= options.oracle_stride)) {
      cached_fp = td_fixed_point(instance.mdp, learner.policy_at(state.policy_params),
                                 instance.critic);
      last_solve = t;
    }
    acc += (state.critic_weights - cached_fp).squaredNorm();
    learner.step(state);
    while (next_checkpoint < options.average_checkpoints.size() &&
           options.average_checkpoints[next_checkpoint] == t + 1) {
      trace.checkpoint_avg.push_back(acc / static_cast<double>(t + 1));
      ++next_checkpoint;
    }
    if (options.snapshot_stride > 0 && state.t % options.snapshot_stride == 0 &&
        state.t != options.horizon)
      record_snapshot(state);
  }
  if (options.horizon > 0) record_snapshot(state);

  trace.final_avg = options.horizon > 0 ? acc / static_cast<double>(options.horizon) : 0.0;
  trace.terminal_critic_err = std::sqrt(trace.critic_err_sq.back());
  return trace;
}

TrackingResult critic_tracking(const InstanceBundle& instance, const PowerSchedule& schedule,
                               const ExperimentOptions& options) {
  const SeedPool pool = run_seed_pool(instance, schedule, options, options.metrics);
  const MetricTrace& shape = first_success(pool);

  TrackingResult result;
  result.snapshot_ts = shape.snapshot_ts;
  result.checkpoints = options.metrics.average_checkpoints;
  result.n_seeds = options.n_seeds;
  result.failed_seeds = pool.failed;
  result.seed_errors = pool.errors;

  const auto critic_samples = gather(pool, shape.critic_err_sq.size(),
                                     [](const MetricTrace& tr, std::size_t i) {
                                       return tr.critic_err_sq[i];
                                     });
  const auto target_samples = gather(pool, shape.target_err_sq.size(),
                                     [](const MetricTrace& tr, std::size_t i) {
                                       return tr.target_err_sq[i];
                                     });
  for (const auto& xs : critic_samples) {
    result.critic_err_sq_mean.push_back(mean_of(xs));
    result.critic_err_sq_se.push_back(se_of(xs));
  }
  for (const auto& xs : target_samples) {
    result.target_err_sq_mean.push_back(mean_of(xs));
    result.target_err_sq_se.push_back(se_of(xs));
  }

  const auto checkpoint_samples = gather(pool, shape.checkpoint_avg.size(),
                                         [](const MetricTrace& tr, std::size_t i) {
                                           return tr.checkpoint_avg[i];
                                         });
  for (const auto& xs : checkpoint_samples) result.checkpoint_avg_mean.push_back(mean_of(xs));

  std::vector<double> terminal, final_avg;
  for (std::size_t k = 0; k < pool.traces.size(); ++k) {
    if (!pool.errors[k].empty()) continue;
    terminal.push_back(pool.traces[k].terminal_critic_err);
    final_avg.push_back(pool.traces[k].final_avg);
  }
  result.terminal_err_mean = mean_of(terminal);
  result.final_avg_mean = mean_of(final_avg);
  result.final_avg_se = se_of(final_avg);
  return result;
}

void fit_loglog(const std::vector<double>& horizons, const std::vector<double>& values,
                RateFit& fit) {
  if (horizons.size() != values.size() || horizons.size() < 2)
    throw std::invalid_argument("fit_loglog: need matching lists with at least two points");
  const std::size_t n = horizons.size();
  std::vector<double> x(n), y(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (!(horizons[i] > 0.0) || !(values[i] > 0.0))
      throw std::invalid_argument("fit_loglog: horizons and values must be positive");
    x[i] = std::log(horizons[i]);
    y[i] = std::log(values[i]);
  }
  const double xbar = mean_of(x);
  const double ybar = mean_of(y);
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (x[i] - xbar) * (x[i] - xbar);
    sxy += (x[i] - xbar) * (y[i] - ybar);
  }
  fit.slope = sxy / sxx;
  fit.intercept = ybar - fit.slope * xbar;
  double rss = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double r = y[i] - (fit.intercept + fit.slope * x[i]);
    rss += r * r;
  }
  fit.slope_se =
      n > 2 ? std::sqrt(rss / static_cast<double>(n - 2) / sxx) : 0.0;
}

RateFit rate_sweep(const InstanceBundle& instance, const PowerSchedule& schedule,
                   const std::vector<std::int64_t>& horizons,
                   const ExperimentOptions& options) {
  if (horizons.size() < 3)
    throw std::invalid_argument("rate_sweep: need at least three horizons");
  for (std::size_t i = 1; i < horizons.size(); ++i)
    if (horizons[i] <= horizons[i - 1])
      throw std::invalid_argument("rate_sweep: horizons must be strictly increasing");

  // The horizons are nested prefixes of one run: the trajectory up to a
  // shorter horizon is draw-for-draw the trajectory of a shorter run, so the
  // running average sampled at each checkpoint equals the shorter run's
  // terminal average.
  MetricOptions metrics = options.metrics;
  metrics.horizon = horizons.back();
  metrics.average_checkpoints = horizons;
  metrics.snapshot_stride = 0;
  metrics.actor_metrics = false;
  const SeedPool pool = run_seed_pool(instance, schedule, options, metrics);

  RateFit fit;
  fit.n_seeds = options.n_seeds;
  fit.failed_seeds = pool.failed;
  for (std::int64_t h : horizons) fit.horizons.push_back(static_cast<double>(h));
  const auto samples = gather(pool, horizons.size(), [](const MetricTrace& tr, std::size_t i) {
    return tr.checkpoint_avg[i];
  });
  for (const auto& xs : samples) {
    fit.values.push_back(mean_of(xs));
    fit.std_errors.push_back(se_of(xs));
  }

  fit.term_target = -(1.0 - schedule.target_decay);
  fit.term_critic = -schedule.critic_decay;
  fit.term_actor_gap = -2.0 * (schedule.actor_decay - schedule.target_decay);
  fit.term_target_gap = -2.0 * (schedule.target_decay - schedule.critic_decay);
  fit.dominant_exponent = std::max({fit.term_target, fit.term_critic, fit.term_actor_gap,
                                    fit.term_target_gap});

  for (std::size_t i = 0; i < fit.values.size(); ++i) {
    if (!(fit.values[i] > 0.0)) {
      fit.refusal = "nonpositive averaged value at horizon " +
                    std::to_string(horizons[i]);
      return fit;
    }
    if (fit.std_errors[i] > 0.5 * fit.values[i]) {
      fit.refusal = "estimate at horizon " + std::to_string(horizons[i]) +
                    " is noise-dominated (standard error above half the value)";
      return fit;
    }
  }
  fit_loglog(fit.horizons, fit.values, fit);
  fit.fit_ok = true;
  return fit;
}

OrderingComparison schedule_comparison(const InstanceBundle& instance,
                                       const PowerSchedule& first,
                                       const PowerSchedule& second, std::int64_t horizon,
                                       const ExperimentOptions& options) {
  MetricOptions metrics = options.metrics;
  metrics.horizon = horizon;
  metrics.average_checkpoints.clear();
  metrics.snapshot_stride = 0;
  metrics.actor_metrics = false;

  OrderingComparison cmp;
  cmp.n_seeds = options.n_seeds;
  const SeedPool a = run_seed_pool(instance, first, options, metrics);
  const SeedPool b = run_seed_pool(instance, second, options, metrics);
  for (int k = 0; k < options.n_seeds; ++k) {
    const auto idx = static_cast<std::size_t>(k);
    if (!a.errors[idx].empty() || !b.errors[idx].empty()) {
      ++cmp.failed_seeds;
      continue;
    }
    cmp.first_values.push_back(a.traces[idx].final_avg);
    cmp.second_values.push_back(b.traces[idx].final_avg);
  }
  if (cmp.first_values.empty())
    throw std::runtime_error("schedule_comparison: no seed survived both schedules");
  cmp.first_mean = mean_of(cmp.first_values);
  cmp.second_mean = mean_of(cmp.second_values);
  return cmp;
}

StationarityResult actor_stationarity(const InstanceBundle& instance,
                                      const PowerSchedule& schedule,
                                      const ExperimentOptions& options, double epsilon) {
  MetricOptions metrics = options.metrics;
  metrics.actor_metrics = true;
  const SeedPool pool = run_seed_pool(instance, schedule, options, metrics);
  const MetricTrace& shape = first_success(pool);

  StationarityResult result;
  result.snapshot_ts = shape.snapshot_ts;
  result.epsilon = epsilon;
  result.n_seeds = options.n_seeds;
  result.failed_seeds = pool.failed;
  result.seed_errors = pool.errors;

  const std::size_t grid = shape.grad_norm_sq.size();
  const auto grad_sq = gather(pool, grid, [](const MetricTrace& tr, std::size_t i) {
    return tr.grad_norm_sq[i];
  });
  const auto bias = gather(pool, grid, [](const MetricTrace& tr, std::size_t i) {
    return tr.bias_norm[i];
  });
  const auto gap = gather(pool, grid, [](const MetricTrace& tr, std::size_t i) {
    return std::sqrt(tr.grad_norm_sq[i]) - tr.bias_norm[i];
  });

  result.min_grad_norm_sq = std::numeric_limits<double>::infinity();
  result.min_gap = std::numeric_limits<double>::infinity();
  bool crossed = false;
  for (std::size_t i = 0; i < grid; ++i) {
    const double g = mean_of(grad_sq[i]);
    const double bn = mean_of(bias[i]);
    std::vector<double> bias_sq;
    bias_sq.reserve(bias[i].size());
    for (double b : bias[i]) bias_sq.push_back(b * b);
    result.grad_norm_sq_mean.push_back(g);
    result.grad_norm_sq_se.push_back(se_of(grad_sq[i]));
    result.bias_norm_mean.push_back(bn);
    result.gap_mean.push_back(mean_of(gap[i]));
    if (g < result.min_grad_norm_sq) {
      result.min_grad_norm_sq = g;
      result.argmin_t = result.snapshot_ts[i];
    }
    if (result.gap_mean.back() < result.min_gap) {
      result.min_gap = result.gap_mean.back();
      result.argmin_gap_t = result.snapshot_ts[i];
    }
    if (g - mean_of(bias_sq) <= epsilon) crossed = true;
  }
  result.initial_grad_norm_sq = result.grad_norm_sq_mean.front();
  result.epsilon_crossed = crossed;
  return result;
}

AuditReport assumption_audit(const InstanceBundle& instance, const PowerSchedule& schedule,
                             const AuditOptions& options) {
  AuditReport report;
  auto add = [&report](const std::string& name, bool passed, double margin,
                       const std::string& detail = "") {
    report.checks.push_back({name, passed, margin, detail});
  };

  report.rank = check_rank(instance.critic);
  add("features_full_column_rank", report.rank.full_column_rank,
      report.rank.smallest_sv - report.rank.tolerance,
      "rank " + std::to_string(report.rank.rank));
  add("feature_rows_bounded", report.rank.unit_norm_ok, 1.0 - report.rank.max_row_norm,
      "max row norm " + format_double(report.rank.max_row_norm));

  report.schedule_report = analyze_schedule(schedule);
  add("schedule_regime", report.schedule_report.regime != ScheduleRegime::neither, 0.0,
      regime_name(report.schedule_report.regime));
  add("target_step_bounded", report.schedule_report.target_step_bounded,
      1.0 - schedule.target_scale);

  // Spectral and ergodicity certificates over sampled policy parameters:
  // the zero vector plus gaussian draws. Worst margin across samples is
  // what gets reported.
  CounterRng rng(options.sample_seed);
  std::vector<Eigen::VectorXd> params;
  params.push_back(Eigen::VectorXd::Zero(instance.policy.param_dim()));
  for (int k = 0; k < options.n_param_samples; ++k) {
    Eigen::VectorXd theta(instance.policy.param_dim());
    for (int i = 0; i < theta.size(); ++i) theta(i) = options.sample_scale * rng.next_gaussian();
    params.push_back(std::move(theta));
  }

  double worst_gram = std::numeric_limits<double>::infinity();
  double worst_chain = std::numeric_limits<double>::infinity();
  double worst_hurwitz = std::numeric_limits<double>::infinity();
  double worst_slack = std::numeric_limits<double>::infinity();
  bool all_ergodic = true;
  std::string ergodic_detail = "irreducible and aperiodic at every sample";
  SoftmaxPolicy probe = instance.policy;
  for (std::size_t k = 0; k < params.size(); ++k) {
    probe.set_params(params[k]);
    const SpectralReport spectral = spectral_report(instance.mdp, probe, instance.critic);
    worst_gram = std::min(worst_gram, spectral.gram_min_eig);
    const double floor =
        (1.0 - std::sqrt(instance.mdp.discount)) * spectral.gram_min_eig - 1e-10;
    worst_chain = std::min(worst_chain, spectral.td_sym_min_eig - floor);
    worst_hurwitz = std::min(worst_hurwitz, -spectral.stability_margin);
    worst_slack = std::min(worst_slack, spectral.contraction_worst_slack);

    const ErgodicityReport erg = ergodicity_report(pair_chain_kernel(instance.mdp, probe));
    if (!erg.ergodic && all_ergodic) {
      all_ergodic = false;
      ergodic_detail = "sample " + std::to_string(k) +
                       (erg.irreducible ? ": period " + std::to_string(erg.period)
                                        : ": reducible");
    }
  }
  add("gram_positive_definite", worst_gram > 0.0, worst_gram);
  add("td_matrix_positive_definite", worst_chain >= 0.0, worst_chain);
  add("critic_ode_hurwitz", worst_hurwitz > 0.0, worst_hurwitz);
  add("transition_averaging_contraction", worst_slack >= -1e-12, worst_slack + 1e-12);
  add("sampling_chain_ergodic", all_ergodic, all_ergodic ? 1.0 : 0.0, ergodic_detail);

  // Mixing diagnostic at the initial parameter: exact TV decay of the pair
  // chain against its stationary law, enveloped geometrically.
  const Eigen::MatrixXd pair_kernel = pair_chain_kernel(instance.mdp, instance.policy);
  const Eigen::VectorXd pair_stationary =
      state_action_occupancy(instance.mdp, instance.policy);
  report.mixing = fit_mixing_envelope(pair_kernel, pair_stationary);
  add("mixing_envelope_holds", report.mixing.decay_bounded, 1.0 - report.mixing.sigma_fit,
      "c " + format_double(report.mixing.c_fit) + ", sigma " +
          format_double(report.mixing.sigma_fit) + ", slem " +
          format_double(report.mixing.slem));
  report.mixing_steps =
      mixing_time(schedule, options.horizon, report.mixing.c_fit, report.mixing.sigma_fit);
  add("mixing_time_within_horizon", report.mixing_steps <= options.horizon,
      static_cast<double>(options.horizon - report.mixing_steps),
      std::to_string(report.mixing_steps) + " steps at horizon " +
          std::to_string(options.horizon));

  report.all_passed = true;
  for (const auto& c : report.checks)
    if (!c.passed) report.all_passed = false;
  return report;
}

namespace {

void csv_row(std::string& out, std::initializer_list<double> fields) {
  bool sep = false;
  for (double f : fields) {
    if (sep) out += ',';
    out += csv_double(f);
    sep = true;
  }
  out += '\n';
}

}  // namespace

std::string run_csv_text(const MetricTrace& trace) {
  if (trace.grad_norm_sq.size() != trace.snapshot_ts.size())
    throw std::logic_error("run_csv_text: trace was recorded without actor metrics");
  std::string out =
      "t,critic_err_sq,target_err_sq,grad_norm_sq,objective,pbe_residual,fa_error\n";
  for (std::size_t i = 0; i < trace.snapshot_ts.size(); ++i) {
    out += std::to_string(trace.snapshot_ts[i]);
    out += ',';
    out += csv_double(trace.critic_err_sq[i]) + ',' + csv_double(trace.target_err_sq[i]) +
           ',' + csv_double(trace.grad_norm_sq[i]) + ',' + csv_double(trace.objective[i]) +
           ',' + csv_double(trace.pbe_residual[i]) + ',' + csv_double(trace.fa_error[i]);
    out += '\n';
  }
  return out;
}

std::string tracking_csv_text(const TrackingResult& result) {
  std::string out =
      "t,critic_err_sq_mean,critic_err_sq_se,target_err_sq_mean,target_err_sq_se\n";
  for (std::size_t i = 0; i < result.snapshot_ts.size(); ++i) {
    out += std::to_string(result.snapshot_ts[i]);
    out += ',';
    csv_row(out, {result.critic_err_sq_mean[i], result.critic_err_sq_se[i],
                  result.target_err_sq_mean[i], result.target_err_sq_se[i]});
  }
  return out;
}

std::string stationarity_csv_text(const StationarityResult& result) {
  std::string out = "t,grad_norm_sq_mean,grad_norm_sq_se,bias_norm_mean,gap_mean\n";
  for (std::size_t i = 0; i < result.snapshot_ts.size(); ++i) {
    out += std::to_string(result.snapshot_ts[i]);
    out += ',';
    csv_row(out, {result.grad_norm_sq_mean[i], result.grad_norm_sq_se[i],
                  result.bias_norm_mean[i], result.gap_mean[i]});
  }
  return out;
}

std::string rate_csv_text(const RateFit& fit) {
  std::string out = "horizon,value,std_error\n";
  for (std::size_t i = 0; i < fit.horizons.size(); ++i)
    csv_row(out, {fit.horizons[i], fit.values[i], fit.std_errors[i]});
  return out;
}

std::string rate_svg(const RateFit& fit, const std::string& title) {
  const double width = 640.0, height = 480.0;
  const double ml = 80.0, mr = 30.0, mt = 50.0, mb = 60.0;
  const double plot_w = width - ml - mr, plot_h = height - mt - mb;

  double xmin = std::numeric_limits<double>::infinity(), xmax = -xmin;
  double ymin = xmin, ymax = -xmin;
  for (std::size_t i = 0; i < fit.horizons.size(); ++i) {
    const double x = std::log10(fit.horizons[i]);
    const double ylo = std::log10(std::max(fit.values[i] - fit.std_errors[i],
                                           fit.values[i] * 1e-3));
    const double yhi = std::log10(fit.values[i] + fit.std_errors[i]);
    xmin = std::min(xmin, x);
    xmax = std::max(xmax, x);
    ymin = std::min(ymin, ylo);
    ymax = std::max(ymax, yhi);
  }
  if (!(xmax > xmin)) xmax = xmin + 1.0;
  if (!(ymax > ymin)) ymax = ymin + 1.0;
  const double xpad = 0.05 * (xmax - xmin), ypad = 0.1 * (ymax - ymin);
  xmin -= xpad;
  xmax += xpad;
  ymin -= ypad;
  ymax += ypad;

  const auto px = [&](double x) { return ml + (x - xmin) / (xmax - xmin) * plot_w; };
  const auto py = [&](double y) { return mt + (ymax - y) / (ymax - ymin) * plot_h; };

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\""
      << height << "\" viewBox=\"0 0 " << width << " " << height << "\">\n";
  svg << "<rect width=\"" << width << "\" height=\"" << height << "\" fill=\"white\"/>\n";
  svg << "<text x=\"" << width / 2 << "\" y=\"28\" text-anchor=\"middle\" "
      << "font-family=\"sans-serif\" font-size=\"16\">" << title << "</text>\n";

  svg << "<line x1=\"" << ml << "\" y1=\"" << mt + plot_h << "\" x2=\"" << ml + plot_w
      << "\" y2=\"" << mt + plot_h << "\" stroke=\"black\"/>\n";
  svg << "<line x1=\"" << ml << "\" y1=\"" << mt << "\" x2=\"" << ml << "\" y2=\""
      << mt + plot_h << "\" stroke=\"black\"/>\n";

  for (int k = static_cast<int>(std::ceil(xmin)); k <= static_cast<int>(std::floor(xmax));
       ++k) {
    svg << "<line x1=\"" << px(k) << "\" y1=\"" << mt + plot_h << "\" x2=\"" << px(k)
        << "\" y2=\"" << mt + plot_h + 6 << "\" stroke=\"black\"/>\n";
    svg << "<text x=\"" << px(k) << "\" y=\"" << mt + plot_h + 22
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">1e" << k
        << "</text>\n";
  }
  for (int k = static_cast<int>(std::ceil(ymin)); k <= static_cast<int>(std::floor(ymax));
       ++k) {
    svg << "<line x1=\"" << ml - 6 << "\" y1=\"" << py(k) << "\" x2=\"" << ml << "\" y2=\""
        << py(k) << "\" stroke=\"black\"/>\n";
    svg << "<text x=\"" << ml - 10 << "\" y=\"" << py(k) + 4
        << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"12\">1e" << k
        << "</text>\n";
  }
  svg << "<text x=\"" << ml + plot_w / 2 << "\" y=\"" << height - 14
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\">horizon"
      << "</text>\n";
  svg << "<text x=\"20\" y=\"" << mt + plot_h / 2
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\" "
      << "transform=\"rotate(-90 20 " << mt + plot_h / 2 << ")\">averaged error</text>\n";

  if (fit.fit_ok) {
    // ln y = intercept + slope ln T, converted to the log10 axes.
    const double ln10 = std::log(10.0);
    const auto yline = [&](double x10) {
      return (fit.intercept + fit.slope * (x10 * ln10)) / ln10;
    };
    svg << "<line x1=\"" << px(xmin) << "\" y1=\"" << py(yline(xmin)) << "\" x2=\""
        << px(xmax) << "\" y2=\"" << py(yline(xmax))
        << "\" stroke=\"#c0392b\" stroke-width=\"1.5\"/>\n";
    svg << "<text x=\"" << ml + plot_w - 8 << "\" y=\"" << mt + 16
        << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"12\">slope "
        << format_double(fit.slope) << "</text>\n";
  }

  for (std::size_t i = 0; i < fit.horizons.size(); ++i) {
    const double x = px(std::log10(fit.horizons[i]));
    const double y = py(std::log10(fit.values[i]));
    const double lo = fit.values[i] - fit.std_errors[i];
    const double ylo = py(std::log10(std::max(lo, fit.values[i] * 1e-3)));
    const double yhi = py(std::log10(fit.values[i] + fit.std_errors[i]));
    svg << "<line x1=\"" << x << "\" y1=\"" << ylo << "\" x2=\"" << x << "\" y2=\"" << yhi
        << "\" stroke=\"#2c3e50\"/>\n";
    svg << "<line x1=\"" << x - 4 << "\" y1=\"" << ylo << "\" x2=\"" << x + 4 << "\" y2=\""
        << ylo << "\" stroke=\"#2c3e50\"/>\n";
    svg << "<line x1=\"" << x - 4 << "\" y1=\"" << yhi << "\" x2=\"" << x + 4 << "\" y2=\""
        << yhi << "\" stroke=\"#2c3e50\"/>\n";
    svg << "<circle cx=\"" << x << "\" cy=\"" << y << "\" r=\"3.5\" fill=\"#2c3e50\"/>\n";
  }
  svg << "</svg>\n";
  return svg.str();
}

TextDoc audit_report_to_doc(const AuditReport& report) {
  TextDoc doc;
  doc.set_string("schema", "aclab-audit-report/1");
  doc.set_bool("all_passed", report.all_passed);
  doc.set_integer("rank.rank", report.rank.rank);
  doc.set_number("rank.smallest_sv", report.rank.smallest_sv);
  doc.set_number("rank.largest_sv", report.rank.largest_sv);
  doc.set_bool("rank.full_column_rank", report.rank.full_column_rank);
  doc.set_number("rank.max_row_norm", report.rank.max_row_norm);
  doc.set_string("schedule.regime", regime_name(report.schedule_report.regime));
  doc.set_bool("schedule.ratios_vanish", report.schedule_report.ratios_vanish);
  doc.set_bool("schedule.finite_time_ordering", report.schedule_report.finite_time_ordering);
  doc.set_bool("schedule.target_step_bounded", report.schedule_report.target_step_bounded);
  doc.set_number("mixing.c_fit", report.mixing.c_fit);
  doc.set_number("mixing.sigma_fit", report.mixing.sigma_fit);
  doc.set_number("mixing.slem", report.mixing.slem);
  doc.set_bool("mixing.decay_bounded", report.mixing.decay_bounded);
  doc.set_integer("mixing.steps", report.mixing_steps);
  for (const auto& check : report.checks) {
    doc.set_bool("checks." + check.name + "_passed", check.passed);
    doc.set_number("checks." + check.name + "_margin", check.margin);
    if (!check.detail.empty())
      doc.set_string("checks." + check.name + "_detail", check.detail);
  }
  return doc;
}

std::string manifest_to_json(const RunManifest& manifest) {
  nlohmann::json j;
  j["schema"] = "aclab-manifest/1";
  j["tool_version"] = manifest.tool_version;
  j["subcommand"] = manifest.subcommand;
  j["config"] = manifest.config_text;
  j["inputs"] = nlohmann::json::array();
  for (const auto& [path, hash] : manifest.input_hashes)
    j["inputs"].push_back({{"path", path}, {"hash", hash}});
  j["seeds"] = manifest.seeds;
  j["started_at"] = manifest.started_at;
  j["finished_at"] = manifest.finished_at;
  return j.dump(2) + "\n";
}

RunManifest manifest_from_json(const std::string& text) {
  const nlohmann::json j = nlohmann::json::parse(text);
  if (j.value("schema", "") != std::string("aclab-manifest/1"))
    throw std::invalid_argument("manifest_from_json: unexpected schema");
  RunManifest m;
  m.tool_version = j.at("tool_version").get<std::string>();
  m.subcommand = j.at("subcommand").get<std::string>();
  m.config_text = j.at("config").get<std::string>();
  for (const auto& entry : j.at("inputs"))
    m.input_hashes.emplace_back(entry.at("path").get<std::string>(),
                                entry.at("hash").get<std::string>());
  m.seeds = j.at("seeds").get<std::vector<std::uint64_t>>();
  m.started_at = j.value("started_at", "");
  m.finished_at = j.value("finished_at", "");
  return m;
}

std::vector<std::string> verify_manifest_hashes(const RunManifest& manifest) {
  std::vector<std::string> problems;
  for (const auto& [path, hash] : manifest.input_hashes) {
    try {
      const std::string actual = file_content_hash(path);
      if (actual != hash)
        problems.push_back(path + ": hash mismatch (stored " + hash + ", actual " + actual +
                           ")");
    } catch (const std::exception& e) {
      problems.push_back(path + ": " + e.what());
    }
  }
  return problems;
}

std::string utc_timestamp() {
  const std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace aclab
