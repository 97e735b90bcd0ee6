#include "aclab/schedule.hpp"

#include <cmath>
#include <queue>
#include <numeric>
#include <stdexcept>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

namespace aclab {

StepSizes PowerSchedule::at(std::int64_t t) const {
  if (t < 0) throw std::invalid_argument("PowerSchedule::at: negative step index");
  const double base = 1.0 + static_cast<double>(t);
  StepSizes s;
  s.actor = actor_scale / std::pow(base, actor_decay);
  s.critic = critic_scale / std::pow(base, critic_decay);
  s.target = target_scale / std::pow(base, target_decay);
  return s;
}

void PowerSchedule::validate() const {
  if (!(actor_scale >= 0.0) || !(critic_scale > 0.0) || !(target_scale > 0.0))
    throw std::invalid_argument("PowerSchedule: scales must be positive (actor may be zero)");
  if (!(actor_decay >= 0.0) || !(critic_decay >= 0.0) || !(target_decay >= 0.0))
    throw std::invalid_argument("PowerSchedule: decay exponents must be nonnegative");
  if (!(actor_decay <= 1.0) || !(critic_decay <= 1.0) || !(target_decay <= 1.0))
    throw std::invalid_argument("PowerSchedule: decay exponents must not exceed one");
}

PowerSchedule schedule_from_doc(const TextDoc& doc) {
  const std::string schema = doc.get_string("schema");
  if (schema != "aclab-schedule/1")
    throw std::invalid_argument("schedule_from_doc: unexpected schema " + schema);
  const std::vector<std::string> allowed = {
      "schema",       "actor_scale", "critic_scale", "target_scale",
      "actor_decay",  "critic_decay", "target_decay"};
  const auto unknown = doc.unknown_keys(allowed);
  if (!unknown.empty())
    throw std::invalid_argument("schedule_from_doc: unknown key " + unknown.front());
  PowerSchedule s;
  s.actor_scale = doc.get_number("actor_scale");
  s.critic_scale = doc.get_number("critic_scale");
  s.target_scale = doc.get_number("target_scale");
  s.actor_decay = doc.get_number("actor_decay");
  s.critic_decay = doc.get_number("critic_decay");
  s.target_decay = doc.get_number("target_decay");
  s.validate();
  return s;
}

TextDoc schedule_to_doc(const PowerSchedule& schedule) {
  TextDoc doc;
  doc.set_string("schema", "aclab-schedule/1");
  doc.set_number("actor_scale", schedule.actor_scale);
  doc.set_number("critic_scale", schedule.critic_scale);
  doc.set_number("target_scale", schedule.target_scale);
  doc.set_number("actor_decay", schedule.actor_decay);
  doc.set_number("critic_decay", schedule.critic_decay);
  doc.set_number("target_decay", schedule.target_decay);
  return doc;
}

ScheduleReport analyze_schedule(const PowerSchedule& schedule) {
  schedule.validate();
  ScheduleReport r;
  // sum 1/(1+t)^p diverges iff p <= 1; its square is summable iff p > 1/2.
  r.diverges_actor = schedule.actor_decay <= 1.0 && schedule.actor_scale > 0.0;
  r.diverges_critic = schedule.critic_decay <= 1.0;
  r.diverges_target = schedule.target_decay <= 1.0;
  r.square_summable_actor = schedule.actor_decay > 0.5 || schedule.actor_scale == 0.0;
  r.square_summable_critic = schedule.critic_decay > 0.5;
  r.square_summable_target = schedule.target_decay > 0.5;
  r.ratios_vanish = schedule.critic_decay < schedule.target_decay &&
                    schedule.target_decay < schedule.actor_decay;
  r.finite_time_ordering = 0.0 < schedule.critic_decay &&
                           schedule.critic_decay < schedule.target_decay &&
                           schedule.target_decay < schedule.actor_decay &&
                           schedule.actor_decay < 1.0;
  r.target_step_bounded = schedule.target_scale <= 1.0;
  r.nonincreasing = true;  // scale / (1+t)^p with p >= 0 never increases

  const bool asymptotic = r.diverges_actor && r.diverges_critic && r.diverges_target &&
                          r.square_summable_actor && r.square_summable_critic &&
                          r.square_summable_target && r.ratios_vanish && r.target_step_bounded;
  if (r.finite_time_ordering && r.target_step_bounded)
    r.regime = ScheduleRegime::finite_time;
  else if (asymptotic)
    r.regime = ScheduleRegime::asymptotic;
  else
    r.regime = ScheduleRegime::neither;
  return r;
}

std::string regime_name(ScheduleRegime regime) {
  switch (regime) {
    case ScheduleRegime::asymptotic:
      return "asymptotic";
    case ScheduleRegime::finite_time:
      return "finite_time";
    case ScheduleRegime::neither:
      return "neither";
  }
  return "neither";
}

std::int64_t mixing_time(const PowerSchedule& schedule, std::int64_t horizon, double c,
                         double sigma) {
  if (!(c > 0.0)) throw std::invalid_argument("mixing_time: c must be positive");
  if (!(sigma > 0.0 && sigma < 1.0))
    throw std::invalid_argument("mixing_time: sigma must lie in (0, 1)");
  if (horizon < 0) throw std::invalid_argument("mixing_time: negative horizon");

  const StepSizes at_horizon = schedule.at(horizon);
  double floor = std::min(at_horizon.critic, at_horizon.target);
  if (schedule.actor_scale > 0.0) floor = std::min(floor, at_horizon.actor);
  if (c <= floor) return 1;

  const double guess = 1.0 + (std::log(floor) - std::log(c)) / std::log(sigma);
  std::int64_t t = std::max<std::int64_t>(1, static_cast<std::int64_t>(std::ceil(guess)));
  while (t > 1 && c * std::pow(sigma, static_cast<double>(t - 2)) <= floor) --t;
  while (c * std::pow(sigma, static_cast<double>(t - 1)) > floor) ++t;
  return t;
}

ErgodicityReport ergodicity_report(const Eigen::MatrixXd& kernel) {
  if (kernel.rows() != kernel.cols() || kernel.rows() < 1)
    throw std::invalid_argument("ergodicity_report: kernel must be square");
  const int n = static_cast<int>(kernel.rows());
  ErgodicityReport r;

  auto reachable_from = [&](int start, bool transpose) {
    std::vector<char> seen(n, 0);
    std::queue<int> frontier;
    frontier.push(start);
    seen[start] = 1;
    while (!frontier.empty()) {
      const int u = frontier.front();
      frontier.pop();
      for (int v = 0; v < n; ++v) {
        const double w = transpose ? kernel(v, u) : kernel(u, v);
        if (w > 0.0 && !seen[v]) {
          seen[v] = 1;
          frontier.push(v);
        }
      }
    }
    return seen;
  };

  const auto forward = reachable_from(0, false);
  const auto backward = reachable_from(0, true);
  r.irreducible = true;
  for (int v = 0; v < n; ++v)
    if (!forward[v] || !backward[v]) r.irreducible = false;
  if (!r.irreducible) return r;

  // BFS levels from state 0; every edge u -> v contributes the cycle
  // length level[u] + 1 - level[v], and the chain period is their gcd.
  std::vector<int> level(n, -1);
  std::queue<int> frontier;
  frontier.push(0);
  level[0] = 0;
  while (!frontier.empty()) {
    const int u = frontier.front();
    frontier.pop();
    for (int v = 0; v < n; ++v) {
      if (kernel(u, v) > 0.0 && level[v] < 0) {
        level[v] = level[u] + 1;
        frontier.push(v);
      }
    }
  }
  int period = 0;
  for (int u = 0; u < n; ++u)
    for (int v = 0; v < n; ++v)
      if (kernel(u, v) > 0.0) period = std::gcd(period, level[u] + 1 - level[v]);
  r.period = std::abs(period);
  r.aperiodic = r.period == 1;
  r.ergodic = r.irreducible && r.aperiodic;
  return r;
}

MixingFit fit_mixing_envelope(const Eigen::MatrixXd& kernel, const Eigen::VectorXd& stationary,
                              int max_steps) {
  if (kernel.rows() != kernel.cols())
    throw std::invalid_argument("fit_mixing_envelope: kernel must be square");
  if (stationary.size() != kernel.rows())
    throw std::invalid_argument("fit_mixing_envelope: stationary vector length mismatch");
  if (max_steps < 2) throw std::invalid_argument("fit_mixing_envelope: need at least two steps");

  MixingFit fit;
  Eigen::EigenSolver<Eigen::MatrixXd> eigs(kernel);
  const Eigen::VectorXd moduli = eigs.eigenvalues().cwiseAbs();
  // Drop the single Perron eigenvalue (modulus closest to one from below
  // or equal); the largest remaining modulus drives asymptotic mixing.
  Eigen::Index perron = 0;
  moduli.maxCoeff(&perron);
  double second = 0.0;
  for (Eigen::Index i = 0; i < moduli.size(); ++i)
    if (i != perron) second = std::max(second, moduli(i));
  fit.slem = second;

  Eigen::MatrixXd power = kernel;
  fit.tv_curve.reserve(max_steps);
  for (int t = 1; t <= max_steps; ++t) {
    double worst = 0.0;
    for (Eigen::Index s = 0; s < kernel.rows(); ++s) {
      const double tv = 0.5 * (power.row(s).transpose() - stationary).lpNorm<1>();
      worst = std::max(worst, tv);
    }
    fit.tv_curve.push_back(worst);
    power = power * kernel;
  }

  // Log-linear least squares on the strictly positive samples gives the
  // rate; the prefactor is then raised until the envelope dominates every
  // sample, so the fitted bound is a true bound on the sampled range.
  std::vector<std::pair<double, double>> pts;
  for (int t = 1; t <= max_steps; ++t) {
    const double tv = fit.tv_curve[static_cast<std::size_t>(t - 1)];
    if (tv > 1e-300) pts.emplace_back(static_cast<double>(t), std::log(tv));
  }
  if (pts.size() < 2) {
    // Chain mixes in one step to numerical zero; any tiny envelope works.
    fit.sigma_fit = 0.5;
    fit.c_fit = fit.tv_curve.empty() ? 1.0 : std::max(fit.tv_curve[0] * 2.0, 1e-12);
    fit.decay_bounded = true;
    return fit;
  }
  double sum_t = 0.0, sum_y = 0.0, sum_tt = 0.0, sum_ty = 0.0;
  for (const auto& [t, y] : pts) {
    sum_t += t;
    sum_y += y;
    sum_tt += t * t;
    sum_ty += t * y;
  }
  const double m = static_cast<double>(pts.size());
  const double denom = m * sum_tt - sum_t * sum_t;
  const double slope = (m * sum_ty - sum_t * sum_y) / denom;
  fit.sigma_fit = std::min(std::exp(slope), 1.0 - 1e-12);
  double c = 0.0;
  for (int t = 1; t <= max_steps; ++t) {
    const double required =
        fit.tv_curve[static_cast<std::size_t>(t - 1)] / std::pow(fit.sigma_fit, t);
    c = std::max(c, required);
  }
  fit.c_fit = std::max(c, 1e-12);
  fit.decay_bounded = true;
  for (int t = 1; t <= max_steps; ++t) {
    if (fit.tv_curve[static_cast<std::size_t>(t - 1)] >
        fit.c_fit * std::pow(fit.sigma_fit, t) * (1.0 + 1e-9))
      fit.decay_bounded = false;
  }
  return fit;
}

}  // namespace aclab
