#include "aclab/oracle.hpp"

#include <cmath>
#include <stdexcept>

#include <Eigen/Dense>

#include "aclab/rng.hpp"

namespace aclab {

namespace {

void check_compatible(const FiniteMdp& mdp, const SoftmaxPolicy& policy) {
  if (policy.n_states() != mdp.n_states || policy.n_actions() != mdp.n_actions)
    throw std::invalid_argument("policy shape does not match the MDP");
}

void check_compatible(const FiniteMdp& mdp, const CriticFeatures& features) {
  if (features.n_states() != mdp.n_states)
    throw std::invalid_argument("critic features do not match the MDP state count");
}

// Reciprocal condition estimate in the 1-norm sense from a PLU
// factorization; cheap and adequate for desk-scale dense solves.
double rcond_estimate(const Eigen::MatrixXd& m) {
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(m);
  const double norm = m.cwiseAbs().rowwise().sum().maxCoeff();
  const Eigen::MatrixXd inv = lu.inverse();
  const double inv_norm = inv.cwiseAbs().rowwise().sum().maxCoeff();
  const double cond = norm * inv_norm;
  return cond > 0.0 ? 1.0 / cond : 0.0;
}

Eigen::MatrixXd policy_matrix(const SoftmaxPolicy& policy) {
  const int n = policy.n_states();
  const int na = policy.n_actions();
  Eigen::MatrixXd probs(n, na);
  for (int s = 0; s < n; ++s) probs.row(s) = policy.action_probs(s).transpose();
  return probs;
}

}  // namespace

Eigen::MatrixXd transition_matrix(const FiniteMdp& mdp, const SoftmaxPolicy& policy) {
  check_compatible(mdp, policy);
  const int n = mdp.n_states;
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(n, n);
  for (int s = 0; s < n; ++s) {
    const Eigen::VectorXd probs = policy.action_probs(s);
    for (int a = 0; a < mdp.n_actions; ++a)
      out.row(s).noalias() += probs(a) * mdp.kernel_row(s, a);
  }
  return out;
}

Eigen::VectorXd expected_reward(const FiniteMdp& mdp, const SoftmaxPolicy& policy) {
  check_compatible(mdp, policy);
  const int n = mdp.n_states;
  Eigen::VectorXd out(n);
  for (int s = 0; s < n; ++s) out(s) = policy.action_probs(s).dot(mdp.reward.row(s));
  return out;
}

Eigen::VectorXd discounted_occupancy(const FiniteMdp& mdp, const SoftmaxPolicy& policy) {
  const Eigen::MatrixXd p = transition_matrix(mdp, policy);
  const int n = mdp.n_states;
  const Eigen::MatrixXd system =
      (Eigen::MatrixXd::Identity(n, n) - mdp.discount * p).transpose();
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(system);
  Eigen::VectorXd occ = (1.0 - mdp.discount) * lu.solve(mdp.init_dist);
  if (!occ.allFinite()) throw std::runtime_error("discounted_occupancy: solve failed");
  return occ;
}

Eigen::VectorXd discounted_occupancy_series(const FiniteMdp& mdp, const SoftmaxPolicy& policy,
                                            double tail) {
  const Eigen::MatrixXd p = transition_matrix(mdp, policy);
  const double g = mdp.discount;
  const long long horizon =
      static_cast<long long>(std::ceil(std::log(tail) / std::log(g)));
  Eigen::RowVectorXd marginal = mdp.init_dist.transpose();
  Eigen::RowVectorXd acc = Eigen::RowVectorXd::Zero(mdp.n_states);
  double weight = 1.0;
  for (long long t = 0; t <= horizon; ++t) {
    acc += weight * marginal;
    marginal = marginal * p;
    weight *= g;
  }
  return (1.0 - g) * acc.transpose();
}

Eigen::VectorXd stationary_distribution(const Eigen::MatrixXd& K, StationaryInfo* info) {
  if (K.rows() != K.cols() || K.rows() < 1)
    throw std::invalid_argument("stationary_distribution: K must be square");
  const Eigen::Index n = K.rows();
  Eigen::MatrixXd stacked(n + 1, n);
  stacked.topRows(n) = K.transpose() - Eigen::MatrixXd::Identity(n, n);
  stacked.bottomRows(1).setOnes();
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n + 1);
  rhs(n) = 1.0;

  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(stacked);
  Eigen::VectorXd mu = qr.solve(rhs);
  if (info) {
    info->rank = static_cast<int>(qr.rank());
    info->unique = (qr.rank() == n);
    info->residual = (mu.transpose() * K - mu.transpose()).cwiseAbs().maxCoeff();
  }
  return mu;
}

Eigen::VectorXd state_action_occupancy(const FiniteMdp& mdp, const SoftmaxPolicy& policy) {
  const Eigen::VectorXd occ = discounted_occupancy(mdp, policy);
  Eigen::VectorXd out(static_cast<Eigen::Index>(mdp.n_states) * mdp.n_actions);
  for (int s = 0; s < mdp.n_states; ++s) {
    const Eigen::VectorXd probs = policy.action_probs(s);
    for (int a = 0; a < mdp.n_actions; ++a) out(mdp.pair_index(s, a)) = occ(s) * probs(a);
  }
  return out;
}

Eigen::MatrixXd state_chain_kernel(const FiniteMdp& mdp, const SoftmaxPolicy& policy) {
  const Eigen::MatrixXd p = transition_matrix(mdp, policy);
  Eigen::MatrixXd out = mdp.discount * p;
  out.rowwise() += (1.0 - mdp.discount) * mdp.init_dist.transpose();
  return out;
}

Eigen::MatrixXd pair_chain_kernel(const FiniteMdp& mdp, const SoftmaxPolicy& policy) {
  check_compatible(mdp, policy);
  const Eigen::MatrixXd restart_mixed = artificial_kernel(mdp);
  const Eigen::MatrixXd probs = policy_matrix(policy);
  const Eigen::Index pairs = static_cast<Eigen::Index>(mdp.n_states) * mdp.n_actions;
  Eigen::MatrixXd out(pairs, pairs);
  for (int s = 0; s < mdp.n_states; ++s) {
    for (int a = 0; a < mdp.n_actions; ++a) {
      const auto row = restart_mixed.row(mdp.pair_index(s, a));
      for (int s2 = 0; s2 < mdp.n_states; ++s2)
        for (int a2 = 0; a2 < mdp.n_actions; ++a2)
          out(mdp.pair_index(s, a), mdp.pair_index(s2, a2)) = row(s2) * probs(s2, a2);
    }
  }
  return out;
}

Eigen::VectorXd bellman_apply(const FiniteMdp& mdp, const SoftmaxPolicy& policy,
                              const Eigen::VectorXd& values) {
  if (values.size() != mdp.n_states)
    throw std::invalid_argument("bellman_apply: value vector has wrong length");
  return expected_reward(mdp, policy) + mdp.discount * (transition_matrix(mdp, policy) * values);
}

Eigen::VectorXd state_values(const FiniteMdp& mdp, const SoftmaxPolicy& policy) {
  const int n = mdp.n_states;
  const Eigen::MatrixXd system =
      Eigen::MatrixXd::Identity(n, n) - mdp.discount * transition_matrix(mdp, policy);
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(system);
  Eigen::VectorXd v = lu.solve(expected_reward(mdp, policy));
  if (!v.allFinite()) throw std::runtime_error("state_values: resolvent solve failed");
  return v;
}

Eigen::VectorXd action_values(const FiniteMdp& mdp, const SoftmaxPolicy& policy) {
  const Eigen::VectorXd v = state_values(mdp, policy);
  Eigen::VectorXd q(static_cast<Eigen::Index>(mdp.n_states) * mdp.n_actions);
  for (int s = 0; s < mdp.n_states; ++s)
    for (int a = 0; a < mdp.n_actions; ++a)
      q(mdp.pair_index(s, a)) = mdp.reward(s, a) + mdp.discount * mdp.kernel_row(s, a).dot(v);
  return q;
}

double objective(const FiniteMdp& mdp, const SoftmaxPolicy& policy) {
  return mdp.init_dist.dot(state_values(mdp, policy));
}

CriticMatrices critic_matrices(const FiniteMdp& mdp, const SoftmaxPolicy& policy,
                               const CriticFeatures& features) {
  check_compatible(mdp, features);
  const Eigen::MatrixXd& phi = features.matrix();
  const Eigen::VectorXd occ = discounted_occupancy(mdp, policy);
  const Eigen::MatrixXd p = transition_matrix(mdp, policy);
  const Eigen::MatrixXd weighted = occ.asDiagonal() * phi;  // D Phi

  CriticMatrices out;
  out.gram = phi.transpose() * weighted;
  out.td_matrix =
      phi.transpose() * (occ.asDiagonal() * ((phi - mdp.discount * (p * phi)).eval()));
  out.reward_proj = phi.transpose() * (occ.asDiagonal() * expected_reward(mdp, policy));
  return out;
}

Eigen::VectorXd bellman_target_projection(const FiniteMdp& mdp, const SoftmaxPolicy& policy,
                                          const CriticFeatures& features,
                                          const Eigen::VectorXd& bootstrap_weights) {
  check_compatible(mdp, features);
  if (bootstrap_weights.size() != features.dim())
    throw std::invalid_argument("bellman_target_projection: weight dimension mismatch");
  const Eigen::MatrixXd& phi = features.matrix();
  const Eigen::VectorXd occ = discounted_occupancy(mdp, policy);
  const Eigen::MatrixXd p = transition_matrix(mdp, policy);
  const Eigen::VectorXd target =
      expected_reward(mdp, policy) + mdp.discount * (p * (phi * bootstrap_weights));
  return phi.transpose() * (occ.asDiagonal() * target);
}

Eigen::VectorXd critic_fixed_point(const FiniteMdp& mdp, const SoftmaxPolicy& policy,
                                   const CriticFeatures& features,
                                   const Eigen::VectorXd& bootstrap_weights,
                                   FixedPointInfo* info) {
  const CriticMatrices mats = critic_matrices(mdp, policy, features);
  const Eigen::VectorXd target =
      bellman_target_projection(mdp, policy, features, bootstrap_weights);
  if (info) {
    info->gram_rcond = rcond_estimate(mats.gram);
    info->near_singular = info->near_singular || info->gram_rcond < 1e-12;
  }
  Eigen::VectorXd w = Eigen::PartialPivLU<Eigen::MatrixXd>(mats.gram).solve(target);
  if (!w.allFinite()) throw std::runtime_error("critic_fixed_point: gram solve failed");
  return w;
}

Eigen::VectorXd td_fixed_point(const FiniteMdp& mdp, const SoftmaxPolicy& policy,
                               const CriticFeatures& features, FixedPointInfo* info) {
  const CriticMatrices mats = critic_matrices(mdp, policy, features);
  if (info) {
    info->td_matrix_rcond = rcond_estimate(mats.td_matrix);
    info->near_singular = info->near_singular || info->td_matrix_rcond < 1e-12;
  }
  Eigen::VectorXd w = Eigen::PartialPivLU<Eigen::MatrixXd>(mats.td_matrix).solve(mats.reward_proj);
  if (!w.allFinite()) throw std::runtime_error("td_fixed_point: solve failed");
  return w;
}

Eigen::MatrixXd projection(const FiniteMdp& mdp, const SoftmaxPolicy& policy,
                           const CriticFeatures& features) {
  const Eigen::MatrixXd& phi = features.matrix();
  const Eigen::VectorXd occ = discounted_occupancy(mdp, policy);
  const Eigen::MatrixXd gram = phi.transpose() * (occ.asDiagonal() * phi);
  const Eigen::MatrixXd gram_inv_phit_d =
      Eigen::PartialPivLU<Eigen::MatrixXd>(gram).solve(phi.transpose() * occ.asDiagonal().toDenseMatrix());
  if (!gram_inv_phit_d.allFinite()) throw std::runtime_error("projection: singular gram matrix");
  return phi * gram_inv_phit_d;
}

Eigen::VectorXd exact_gradient(const FiniteMdp& mdp, const SoftmaxPolicy& policy) {
  check_compatible(mdp, policy);
  const Eigen::VectorXd occ = discounted_occupancy(mdp, policy);
  const Eigen::VectorXd v = state_values(mdp, policy);
  const Eigen::VectorXd q = action_values(mdp, policy);
  Eigen::VectorXd grad = Eigen::VectorXd::Zero(policy.param_dim());
  for (int s = 0; s < mdp.n_states; ++s) {
    const Eigen::VectorXd probs = policy.action_probs(s);
    for (int a = 0; a < mdp.n_actions; ++a) {
      const double advantage = q(mdp.pair_index(s, a)) - v(s);
      grad.noalias() += occ(s) * probs(a) * advantage * policy.score(s, a);
    }
  }
  return grad / (1.0 - mdp.discount);
}

Eigen::VectorXd numerical_gradient(const FiniteMdp& mdp, const SoftmaxPolicy& policy,
                                   double step) {
  SoftmaxPolicy probe = policy;
  Eigen::VectorXd theta = policy.params();
  Eigen::VectorXd grad(policy.param_dim());
  for (int i = 0; i < policy.param_dim(); ++i) {
    const double saved = theta(i);
    theta(i) = saved + step;
    probe.set_params(theta);
    const double plus = objective(mdp, probe);
    theta(i) = saved - step;
    probe.set_params(theta);
    const double minus = objective(mdp, probe);
    theta(i) = saved;
    grad(i) = (plus - minus) / (2.0 * step);
  }
  return grad;
}

Eigen::VectorXd td_action_value_proxy(const FiniteMdp& mdp, const SoftmaxPolicy& policy,
                                      const CriticFeatures& features) {
  const Eigen::VectorXd w = td_fixed_point(mdp, policy, features);
  const Eigen::VectorXd proxy_values = features.matrix() * w;
  Eigen::VectorXd out(static_cast<Eigen::Index>(mdp.n_states) * mdp.n_actions);
  for (int s = 0; s < mdp.n_states; ++s)
    for (int a = 0; a < mdp.n_actions; ++a)
      out(mdp.pair_index(s, a)) =
          mdp.reward(s, a) + mdp.discount * mdp.kernel_row(s, a).dot(proxy_values);
  return out;
}

Eigen::VectorXd actor_drift(const FiniteMdp& mdp, const SoftmaxPolicy& policy,
                            const CriticFeatures& features) {
  // Decomposed route: (H w* + u) / (1 - discount), with H the
  // occupancy-weighted score-by-successor-feature coupling and u the
  // occupancy-weighted reward-score mean. Kept separate from gradient_bias
  // so the two can cross-check each other.
  check_compatible(mdp, policy);
  check_compatible(mdp, features);
  const Eigen::VectorXd occ = discounted_occupancy(mdp, policy);
  const Eigen::VectorXd w = td_fixed_point(mdp, policy, features);
  const int d = policy.param_dim();
  Eigen::MatrixXd coupling = Eigen::MatrixXd::Zero(d, features.dim());
  Eigen::VectorXd reward_score = Eigen::VectorXd::Zero(d);
  for (int s = 0; s < mdp.n_states; ++s) {
    const Eigen::VectorXd probs = policy.action_probs(s);
    for (int a = 0; a < mdp.n_actions; ++a) {
      const double weight = occ(s) * probs(a);
      if (weight == 0.0) continue;
      const Eigen::VectorXd psi = policy.score(s, a);
      const Eigen::RowVectorXd successor_feature =
          mdp.kernel_row(s, a) * features.matrix();  // sum_s' p(s'|s,a) phi(s')'
      coupling.noalias() += (mdp.discount * weight) * (psi * successor_feature);
      reward_score.noalias() += (weight * mdp.reward(s, a)) * psi;
    }
  }
  return (coupling * w + reward_score) / (1.0 - mdp.discount);
}

Eigen::VectorXd gradient_bias(const FiniteMdp& mdp, const SoftmaxPolicy& policy,
                              const CriticFeatures& features) {
  check_compatible(mdp, policy);
  check_compatible(mdp, features);
  const Eigen::VectorXd occ = discounted_occupancy(mdp, policy);
  const Eigen::VectorXd v = state_values(mdp, policy);
  const Eigen::VectorXd proxy_values = features.matrix() * td_fixed_point(mdp, policy, features);
  const Eigen::VectorXd gap = proxy_values - v;  // per-state approximation gap
  Eigen::VectorXd bias = Eigen::VectorXd::Zero(policy.param_dim());
  for (int s = 0; s < mdp.n_states; ++s) {
    const Eigen::VectorXd probs = policy.action_probs(s);
    for (int a = 0; a < mdp.n_actions; ++a) {
      const double weight = occ(s) * probs(a);
      if (weight == 0.0) continue;
      const double successor_gap = mdp.kernel_row(s, a).dot(gap);
      bias.noalias() += weight * successor_gap * policy.score(s, a);
    }
  }
  return (mdp.discount / (1.0 - mdp.discount)) * bias;
}

double approximation_error(const FiniteMdp& mdp, const SoftmaxPolicy& policy,
                           const CriticFeatures& features) {
  const Eigen::VectorXd occ = discounted_occupancy(mdp, policy);
  const Eigen::VectorXd v = state_values(mdp, policy);
  const Eigen::VectorXd proxy = features.matrix() * td_fixed_point(mdp, policy, features);
  const Eigen::VectorXd diff = v - proxy;
  return std::sqrt(diff.dot(occ.asDiagonal() * diff));
}

SpectralReport spectral_report(const FiniteMdp& mdp, const SoftmaxPolicy& policy,
                               const CriticFeatures& features, int n_random_vectors,
                               std::uint64_t seed) {
  const CriticMatrices mats = critic_matrices(mdp, policy, features);
  SpectralReport report;

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> gram_eigs(mats.gram);
  report.gram_min_eig = gram_eigs.eigenvalues().minCoeff();

  const Eigen::MatrixXd td_sym = 0.5 * (mats.td_matrix + mats.td_matrix.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> td_eigs(td_sym);
  report.td_sym_min_eig = td_eigs.eigenvalues().minCoeff();

  const Eigen::MatrixXd precond =
      Eigen::PartialPivLU<Eigen::MatrixXd>(mats.gram).solve(mats.td_matrix);
  const Eigen::MatrixXd precond_sym = 0.5 * (precond + precond.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> precond_eigs(precond_sym);
  report.precond_sym_min_eig = precond_eigs.eigenvalues().minCoeff();

  Eigen::EigenSolver<Eigen::MatrixXd> full_eigs(-precond);
  report.stability_margin = full_eigs.eigenvalues().real().maxCoeff();

  // Randomized transition-averaging contraction check on raw state vectors.
  const Eigen::MatrixXd p = transition_matrix(mdp, policy);
  const Eigen::VectorXd occ = discounted_occupancy(mdp, policy);
  const double g = mdp.discount;
  CounterRng rng(seed);
  report.contraction_samples = n_random_vectors;
  report.contraction_worst_slack = std::numeric_limits<double>::infinity();
  for (int k = 0; k < n_random_vectors; ++k) {
    Eigen::VectorXd v(mdp.n_states);
    for (int s = 0; s < mdp.n_states; ++s) v(s) = rng.next_gaussian();
    const Eigen::VectorXd pv = p * v;
    const double lhs = pv.dot(occ.asDiagonal() * pv);
    const double norm_d = v.dot(occ.asDiagonal() * v);
    const double norm_rho = v.dot(mdp.init_dist.asDiagonal() * v);
    const double rhs = norm_d / g - (1.0 - g) / g * norm_rho;
    const double slack = rhs - lhs;
    report.contraction_worst_slack = std::min(report.contraction_worst_slack, slack);
    if (slack < -1e-12) report.contraction_ok = false;
  }
  return report;
}

OracleReport oracle_report(const FiniteMdp& mdp, const SoftmaxPolicy& policy,
                           const CriticFeatures& features) {
  OracleReport r;
  r.n_states = mdp.n_states;
  r.n_actions = mdp.n_actions;
  r.feature_dim = features.dim();
  r.param_dim = policy.param_dim();
  r.discount = mdp.discount;
  r.transition = transition_matrix(mdp, policy);
  r.reward = expected_reward(mdp, policy);
  r.state_occupancy = discounted_occupancy(mdp, policy);
  r.pair_occupancy = state_action_occupancy(mdp, policy);
  const CriticMatrices mats = critic_matrices(mdp, policy, features);
  r.gram = mats.gram;
  r.td_matrix = mats.td_matrix;
  r.reward_proj = mats.reward_proj;
  r.projection = projection(mdp, policy, features);
  r.td_fixed_point = td_fixed_point(mdp, policy, features, &r.solves);
  r.state_values = state_values(mdp, policy);
  r.action_values = action_values(mdp, policy);
  r.policy_gradient = exact_gradient(mdp, policy);
  r.bias = gradient_bias(mdp, policy, features);
  r.objective = mdp.init_dist.dot(r.state_values);
  r.approximation_error = approximation_error(mdp, policy, features);
  r.spectral = spectral_report(mdp, policy, features);
  r.solves.gram_rcond = rcond_estimate(mats.gram);
  r.solves.near_singular = r.solves.near_singular || r.solves.gram_rcond < 1e-12;
  r.condition_warning = r.solves.near_singular;
  return r;
}

std::vector<OracleCheck> oracle_checks(const FiniteMdp& mdp, const SoftmaxPolicy& policy,
                                       const CriticFeatures& features) {
  std::vector<OracleCheck> checks;
  auto add = [&checks](const std::string& name, bool passed, double margin,
                       const std::string& detail = "") {
    checks.push_back({name, passed, margin, detail});
  };

  // occupancy computed three ways
  const Eigen::VectorXd occ = discounted_occupancy(mdp, policy);
  const Eigen::VectorXd occ_series = discounted_occupancy_series(mdp, policy);
  StationaryInfo st;
  const Eigen::VectorXd occ_stat = stationary_distribution(state_chain_kernel(mdp, policy), &st);
  {
    const double solve_vs_series = (occ - occ_series).lpNorm<1>();
    const double solve_vs_stat = (occ - occ_stat).lpNorm<1>();
    const double series_vs_stat = (occ_series - occ_stat).lpNorm<1>();
    const double worst = std::max({solve_vs_series, solve_vs_stat, series_vs_stat});
    add("occupancy_triple_agreement", worst <= 1e-8 && st.unique, 1e-8 - worst);
  }

  // fixed-point identities
  const Eigen::VectorXd w_star = td_fixed_point(mdp, policy, features);
  {
    const Eigen::VectorXd composed = critic_fixed_point(mdp, policy, features, w_star);
    const double err = (composed - w_star).norm();
    add("fixed_point_consistency", err <= 1e-10, 1e-10 - err);
  }
  {
    const Eigen::MatrixXd proj = projection(mdp, policy, features);
    const Eigen::VectorXd fitted = features.matrix() * w_star;
    const Eigen::VectorXd projected_target = proj * bellman_apply(mdp, policy, fitted);
    const double err = (projected_target - fitted).norm();
    add("projected_bellman_fixed_point", err <= 1e-10, 1e-10 - err);

    const double idem = (proj * proj - proj).norm();
    add("projection_idempotent", idem <= 1e-9, 1e-9 - idem);
    const Eigen::MatrixXd d = occ.asDiagonal();
    const double selfadj = (d * proj - proj.transpose() * d).norm();
    add("projection_self_adjoint", selfadj <= 1e-10, 1e-10 - selfadj);
  }

  // regression-target identity: projected target minus gram*w equals
  // reward_proj minus td_matrix*w for any w
  {
    const CriticMatrices mats = critic_matrices(mdp, policy, features);
    CounterRng rng(7);
    double worst = 0.0;
    for (int k = 0; k < 5; ++k) {
      Eigen::VectorXd w(features.dim());
      for (int i = 0; i < features.dim(); ++i) w(i) = rng.next_gaussian();
      const Eigen::VectorXd lhs =
          bellman_target_projection(mdp, policy, features, w) - mats.gram * w;
      const Eigen::VectorXd rhs = mats.reward_proj - mats.td_matrix * w;
      worst = std::max(worst, (lhs - rhs).norm());
    }
    add("target_residual_identity", worst <= 1e-12, 1e-12 - worst);
  }

  // spectral certificates
  const SpectralReport spectral = spectral_report(mdp, policy, features);
  add("gram_positive_definite", spectral.gram_min_eig > 0.0, spectral.gram_min_eig);
  {
    const double floor = (1.0 - std::sqrt(mdp.discount)) * spectral.gram_min_eig - 1e-10;
    add("td_matrix_positive_definite", spectral.td_sym_min_eig >= floor,
        spectral.td_sym_min_eig - floor);
  }
  add("critic_ode_hurwitz", spectral.stability_margin < 0.0, -spectral.stability_margin);
  add("transition_averaging_contraction", spectral.contraction_ok,
      spectral.contraction_worst_slack + 1e-12);

  // gradient decomposition: drift = gradient + bias
  {
    const Eigen::VectorXd grad = exact_gradient(mdp, policy);
    const Eigen::VectorXd bias = gradient_bias(mdp, policy, features);
    const Eigen::VectorXd drift = actor_drift(mdp, policy, features);
    const double err = (drift - (grad + bias)).norm();
    add("gradient_bias_decomposition", err <= 1e-10, 1e-10 - err);
  }

  // analytic gradient against central finite differences
  {
    const Eigen::VectorXd grad = exact_gradient(mdp, policy);
    const Eigen::VectorXd fd = numerical_gradient(mdp, policy);
    const double scale = std::max(grad.norm(), 1e-12);
    const double rel = (grad - fd).norm() / scale;
    add("gradient_matches_finite_differences", rel <= 1e-6, 1e-6 - rel);
  }

  return checks;
}

namespace {
std::vector<double> to_list(const Eigen::MatrixXd& m) {
  std::vector<double> out;
  out.reserve(m.size());
  for (Eigen::Index r = 0; r < m.rows(); ++r)
    for (Eigen::Index c = 0; c < m.cols(); ++c) out.push_back(m(r, c));
  return out;
}
std::vector<double> to_list(const Eigen::VectorXd& v) {
  return std::vector<double>(v.data(), v.data() + v.size());
}
}  // namespace

TextDoc oracle_report_to_doc(const OracleReport& r) {
  TextDoc doc;
  doc.set_string("schema", "aclab-oracle-report/1");
  doc.set_integer("n_states", r.n_states);
  doc.set_integer("n_actions", r.n_actions);
  doc.set_integer("feature_dim", r.feature_dim);
  doc.set_integer("param_dim", r.param_dim);
  doc.set_number("discount", r.discount);
  doc.set_number("objective", r.objective);
  doc.set_number("approximation_error", r.approximation_error);
  doc.set_list("transition", to_list(r.transition));
  doc.set_list("reward", to_list(r.reward));
  doc.set_list("state_occupancy", to_list(r.state_occupancy));
  doc.set_list("pair_occupancy", to_list(r.pair_occupancy));
  doc.set_list("gram", to_list(r.gram));
  doc.set_list("td_matrix", to_list(r.td_matrix));
  doc.set_list("reward_proj", to_list(r.reward_proj));
  doc.set_list("projection", to_list(r.projection));
  doc.set_list("td_fixed_point", to_list(r.td_fixed_point));
  doc.set_list("state_values", to_list(r.state_values));
  doc.set_list("action_values", to_list(r.action_values));
  doc.set_list("policy_gradient", to_list(r.policy_gradient));
  doc.set_list("bias", to_list(r.bias));
  doc.set_number("spectral.gram_min_eig", r.spectral.gram_min_eig);
  doc.set_number("spectral.td_sym_min_eig", r.spectral.td_sym_min_eig);
  doc.set_number("spectral.precond_sym_min_eig", r.spectral.precond_sym_min_eig);
  doc.set_number("spectral.stability_margin", r.spectral.stability_margin);
  doc.set_bool("spectral.contraction_ok", r.spectral.contraction_ok);
  doc.set_number("spectral.contraction_worst_slack", r.spectral.contraction_worst_slack);
  doc.set_integer("spectral.contraction_samples", r.spectral.contraction_samples);
  doc.set_number("solves.gram_rcond", r.solves.gram_rcond);
  doc.set_number("solves.td_matrix_rcond", r.solves.td_matrix_rcond);
  doc.set_bool("solves.near_singular", r.solves.near_singular);
  doc.set_bool("condition_warning", r.condition_warning);
  return doc;
}

}  // namespace aclab
