#include <doctest.h>

#include <cmath>
#include <vector>

#include <Eigen/Dense>

#include "aclab/features.hpp"
#include "aclab/mdp.hpp"
#include "aclab/oracle.hpp"
#include "aclab/policy.hpp"
#include "aclab/rng.hpp"

using aclab::CounterRng;
using aclab::CriticFeatures;
using aclab::FiniteMdp;
using aclab::SoftmaxPolicy;

namespace {

FiniteMdp default_garnet() { return aclab::make_garnet(5, 3, 2, 0.9, 2024); }

SoftmaxPolicy random_tabular_policy(const FiniteMdp& mdp, std::uint64_t seed, double scale = 0.5) {
  SoftmaxPolicy policy = SoftmaxPolicy::tabular(mdp.n_states, mdp.n_actions);
  CounterRng rng(seed);
  Eigen::VectorXd params(policy.param_dim());
  for (int i = 0; i < params.size(); ++i) params(i) = scale * rng.next_gaussian();
  policy.set_params(params);
  return policy;
}

// Straight-loop references, written against the definitions rather than the
// library internals.
Eigen::MatrixXd transition_reference(const FiniteMdp& mdp, const SoftmaxPolicy& policy) {
  Eigen::MatrixXd p = Eigen::MatrixXd::Zero(mdp.n_states, mdp.n_states);
  for (int s = 0; s < mdp.n_states; ++s) {
    const Eigen::VectorXd probs = policy.action_probs(s);
    for (int a = 0; a < mdp.n_actions; ++a)
      for (int sp = 0; sp < mdp.n_states; ++sp)
        p(s, sp) += probs(a) * mdp.kernel(mdp.pair_index(s, a), sp);
  }
  return p;
}

Eigen::VectorXd value_iteration_reference(const FiniteMdp& mdp, const SoftmaxPolicy& policy) {
  const Eigen::MatrixXd p = transition_reference(mdp, policy);
  Eigen::VectorXd r(mdp.n_states);
  for (int s = 0; s < mdp.n_states; ++s)
    r(s) = policy.action_probs(s).dot(mdp.reward.row(s));
  const int sweeps =
      static_cast<int>(std::ceil(std::log(1e-13) / std::log(mdp.discount))) + 50;
  Eigen::VectorXd v = Eigen::VectorXd::Zero(mdp.n_states);
  for (int k = 0; k < sweeps; ++k) v = r + mdp.discount * (p * v);
  return v;
}

Eigen::VectorXd occupancy_diag(const FiniteMdp& mdp, const SoftmaxPolicy& policy) {
  return aclab::discounted_occupancy(mdp, policy);
}

}  // namespace

TEST_SUITE_BEGIN("oracle");

TEST_CASE("single-action chains collapse to the raw kernel and rewards") {
  const FiniteMdp mdp = aclab::make_garnet(4, 1, 2, 0.8, 3);
  const SoftmaxPolicy policy = SoftmaxPolicy::tabular(4, 1);
  const Eigen::MatrixXd p = aclab::transition_matrix(mdp, policy);
  const Eigen::VectorXd r = aclab::expected_reward(mdp, policy);
  for (int s = 0; s < 4; ++s) {
    CHECK((p.row(s) - mdp.kernel_row(s, 0)).lpNorm<Eigen::Infinity>() == 0.0);
    CHECK(r(s) == mdp.reward(s, 0));
  }
}

TEST_CASE("policy-averaged transition and reward match explicit loops") {
  const FiniteMdp mdp = default_garnet();
  const SoftmaxPolicy policy = random_tabular_policy(mdp, 10);
  const Eigen::MatrixXd p = aclab::transition_matrix(mdp, policy);
  const Eigen::MatrixXd p_ref = transition_reference(mdp, policy);
  CHECK((p - p_ref).lpNorm<Eigen::Infinity>() <= 1e-15);
  for (int s = 0; s < mdp.n_states; ++s)
    CHECK(std::abs(p.row(s).sum() - 1.0) <= 1e-12);

  const Eigen::VectorXd r = aclab::expected_reward(mdp, policy);
  for (int s = 0; s < mdp.n_states; ++s) {
    double acc = 0.0;
    const Eigen::VectorXd probs = policy.action_probs(s);
    for (int a = 0; a < mdp.n_actions; ++a) acc += probs(a) * mdp.reward(s, a);
    CHECK(std::abs(r(s) - acc) <= 1e-15);
  }
}

TEST_CASE("transition matrix row agrees with monte-carlo frequencies") {
  const FiniteMdp mdp = default_garnet();
  const SoftmaxPolicy policy = random_tabular_policy(mdp, 21);
  const Eigen::MatrixXd p = aclab::transition_matrix(mdp, policy);

  const int s = 0;
  const int n = 100000;
  CounterRng rng(909);
  Eigen::VectorXd counts = Eigen::VectorXd::Zero(mdp.n_states);
  for (int i = 0; i < n; ++i) {
    const int a = policy.sample_action(s, rng);
    const Eigen::VectorXd row = mdp.kernel.row(mdp.pair_index(s, a)).transpose();
    counts(aclab::sample_categorical(rng, row)) += 1.0;
  }
  for (int sp = 0; sp < mdp.n_states; ++sp) {
    const double freq = counts(sp) / n;
    const double se = std::sqrt(std::max(p(s, sp) * (1.0 - p(s, sp)), 1e-12) / n);
    CHECK(std::abs(freq - p(s, sp)) <= 3.0 * se + 1e-9);
  }
}

TEST_CASE("three occupancy routes agree to 1e-8 in l1") {
  const FiniteMdp mdp = default_garnet();
  for (std::uint64_t seed : {4ULL, 5ULL, 6ULL}) {
    const SoftmaxPolicy policy = random_tabular_policy(mdp, seed);
    const Eigen::VectorXd solve_route = aclab::discounted_occupancy(mdp, policy);
    const Eigen::VectorXd series_route = aclab::discounted_occupancy_series(mdp, policy);
    aclab::StationaryInfo info;
    const Eigen::VectorXd stationary_route =
        aclab::stationary_distribution(aclab::state_chain_kernel(mdp, policy), &info);
    CHECK(info.unique);
    CHECK((solve_route - series_route).lpNorm<1>() <= 1e-8);
    CHECK((solve_route - stationary_route).lpNorm<1>() <= 1e-8);
    CHECK(std::abs(solve_route.sum() - 1.0) <= 1e-12);
    CHECK(solve_route.minCoeff() >= 0.0);
  }
}

TEST_CASE("occupancy concentrates on the restart law at tiny discounts") {
  FiniteMdp mdp = default_garnet();
  mdp.discount = 0.01;
  const SoftmaxPolicy policy = random_tabular_policy(mdp, 8);
  const Eigen::VectorXd occ = aclab::discounted_occupancy_series(mdp, policy);
  CHECK((occ - mdp.init_dist).lpNorm<1>() <= 0.021);
}

TEST_CASE("occupancy matches a from-scratch truncated series") {
  const FiniteMdp mdp = default_garnet();
  const SoftmaxPolicy policy = random_tabular_policy(mdp, 30);
  const Eigen::MatrixXd p = transition_reference(mdp, policy);
  const double g = mdp.discount;
  const int horizon = static_cast<int>(std::ceil(std::log(1e-13) / std::log(g)));
  Eigen::RowVectorXd marginal = mdp.init_dist.transpose();
  Eigen::RowVectorXd acc = Eigen::RowVectorXd::Zero(mdp.n_states);
  double w = 1.0;
  for (int t = 0; t <= horizon; ++t) {
    acc += w * marginal;
    marginal *= p;
    w *= g;
  }
  const Eigen::VectorXd reference = (1.0 - g) * acc.transpose();
  CHECK((aclab::discounted_occupancy(mdp, policy) - reference).lpNorm<1>() <= 1e-9);
}

TEST_CASE("stationary solver handles the hand cases") {
  {
    Eigen::MatrixXd swap(2, 2);
    swap << 0.0, 1.0, 1.0, 0.0;
    aclab::StationaryInfo info;
    const Eigen::VectorXd mu = aclab::stationary_distribution(swap, &info);
    CHECK(info.unique);
    CHECK(mu(0) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(mu(1) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(info.residual <= 1e-12);
  }
  {
    // The identity chain preserves every distribution; non-uniqueness must
    // be reported, not thrown.
    aclab::StationaryInfo info;
    (void)aclab::stationary_distribution(Eigen::MatrixXd::Identity(2, 2), &info);
    CHECK_FALSE(info.unique);
    CHECK(info.rank < 2);
  }
  {
    CounterRng rng(64);
    Eigen::MatrixXd k(6, 6);
    for (int i = 0; i < 6; ++i) {
      for (int j = 0; j < 6; ++j) k(i, j) = 0.05 + rng.next_unit();
      k.row(i) /= k.row(i).sum();
    }
    aclab::StationaryInfo info;
    const Eigen::VectorXd mu = aclab::stationary_distribution(k, &info);
    CHECK(info.unique);
    CHECK(info.residual <= 1e-12);
    CHECK(std::abs(mu.sum() - 1.0) <= 1e-12);
    CHECK(mu.minCoeff() > 0.0);
  }
  CHECK_THROWS(aclab::stationary_distribution(Eigen::MatrixXd::Zero(2, 3)));
}

TEST_CASE("pair occupancy marginalizes to the state occupancy") {
  const FiniteMdp mdp = default_garnet();
  const SoftmaxPolicy policy = random_tabular_policy(mdp, 41);
  const Eigen::VectorXd occ = occupancy_diag(mdp, policy);
  const Eigen::VectorXd pair = aclab::state_action_occupancy(mdp, policy);
  for (int s = 0; s < mdp.n_states; ++s) {
    double marginal = 0.0;
    for (int a = 0; a < mdp.n_actions; ++a) marginal += pair(mdp.pair_index(s, a));
    CHECK(std::abs(marginal - occ(s)) <= 1e-12);
  }

  const SoftmaxPolicy uniform = SoftmaxPolicy::tabular(mdp.n_states, mdp.n_actions);
  const Eigen::VectorXd occ_u = occupancy_diag(mdp, uniform);
  const Eigen::VectorXd pair_u = aclab::state_action_occupancy(mdp, uniform);
  for (int s = 0; s < mdp.n_states; ++s)
    for (int a = 0; a < mdp.n_actions; ++a)
      CHECK(pair_u(mdp.pair_index(s, a)) ==
            doctest::Approx(occ_u(s) / mdp.n_actions).epsilon(1e-12));
}

TEST_CASE("pair occupancy is stationary for the sampled pair chain") {
  const FiniteMdp mdp = default_garnet();
  const SoftmaxPolicy policy = random_tabular_policy(mdp, 52);
  const Eigen::VectorXd mu = aclab::state_action_occupancy(mdp, policy);
  const Eigen::MatrixXd chain = aclab::pair_chain_kernel(mdp, policy);
  REQUIRE(chain.rows() == mu.size());
  for (int row = 0; row < chain.rows(); ++row)
    CHECK(std::abs(chain.row(row).sum() - 1.0) <= 1e-12);
  CHECK((mu.transpose() * chain - mu.transpose()).cwiseAbs().maxCoeff() <= 1e-10);
}

TEST_CASE("state chain kernel is the restart-mixed transition matrix") {
  const FiniteMdp mdp = default_garnet();
  const SoftmaxPolicy policy = random_tabular_policy(mdp, 63);
  const Eigen::MatrixXd chain = aclab::state_chain_kernel(mdp, policy);
  const Eigen::MatrixXd p = transition_reference(mdp, policy);
  for (int s = 0; s < mdp.n_states; ++s)
    for (int sp = 0; sp < mdp.n_states; ++sp) {
      const double expected = mdp.discount * p(s, sp) + (1.0 - mdp.discount) * mdp.init_dist(sp);
      CHECK(std::abs(chain(s, sp) - expected) <= 1e-15);
    }
}

TEST_CASE("bellman operator basics") {
  const FiniteMdp mdp = default_garnet();
  const SoftmaxPolicy policy = random_tabular_policy(mdp, 74);
  const Eigen::VectorXd zero = Eigen::VectorXd::Zero(mdp.n_states);
  CHECK((aclab::bellman_apply(mdp, policy, zero) - aclab::expected_reward(mdp, policy))
            .lpNorm<Eigen::Infinity>() <= 1e-15);

  CounterRng rng(1);
  Eigen::VectorXd v(mdp.n_states);
  for (int s = 0; s < mdp.n_states; ++s) v(s) = rng.next_gaussian();
  const double c = 2.5;
  const Eigen::VectorXd shifted =
      aclab::bellman_apply(mdp, policy, v + c * Eigen::VectorXd::Ones(mdp.n_states));
  const Eigen::VectorXd base = aclab::bellman_apply(mdp, policy, v);
  CHECK((shifted - base - mdp.discount * c * Eigen::VectorXd::Ones(mdp.n_states))
            .lpNorm<Eigen::Infinity>() <= 1e-12);

  const Eigen::VectorXd values = aclab::state_values(mdp, policy);
  CHECK((aclab::bellman_apply(mdp, policy, values) - values).lpNorm<Eigen::Infinity>() <= 1e-10);
}

TEST_CASE("state values match value iteration and the constant-reward closed form") {
  const FiniteMdp mdp = default_garnet();
  const SoftmaxPolicy policy = random_tabular_policy(mdp, 85);
  const Eigen::VectorXd values = aclab::state_values(mdp, policy);
  CHECK((values - value_iteration_reference(mdp, policy)).lpNorm<Eigen::Infinity>() <= 1e-10);

  FiniteMdp constant = mdp;
  constant.reward.setConstant(0.7);
  constant.reward_bound = constant.implied_reward_bound();
  const Eigen::VectorXd flat = aclab::state_values(constant, policy);
  const double expected = 0.7 / (1.0 - constant.discount);
  for (int s = 0; s < constant.n_states; ++s)
    CHECK(flat(s) == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("action values bootstrap off state values and average back") {
  const FiniteMdp mdp = default_garnet();
  const SoftmaxPolicy policy = random_tabular_policy(mdp, 96);
  const Eigen::VectorXd v = aclab::state_values(mdp, policy);
  const Eigen::VectorXd q = aclab::action_values(mdp, policy);
  for (int s = 0; s < mdp.n_states; ++s) {
    double back = 0.0;
    const Eigen::VectorXd probs = policy.action_probs(s);
    for (int a = 0; a < mdp.n_actions; ++a) {
      const double expected = mdp.reward(s, a) + mdp.discount * mdp.kernel_row(s, a).dot(v);
      CHECK(std::abs(q(mdp.pair_index(s, a)) - expected) <= 1e-12);
      back += probs(a) * q(mdp.pair_index(s, a));
    }
    CHECK(std::abs(back - v(s)) <= 1e-12);
  }

  const double j = aclab::objective(mdp, policy);
  CHECK(std::abs(j - mdp.init_dist.dot(v)) <= 1e-15);
}

TEST_CASE("critic matrices match explicit occupancy-weighted sums") {
  const FiniteMdp mdp = default_garnet();
  const SoftmaxPolicy policy = random_tabular_policy(mdp, 107);
  const CriticFeatures features = CriticFeatures::gaussian_orthonormal(5, 3, 11);
  const aclab::CriticMatrices mats = aclab::critic_matrices(mdp, policy, features);

  const Eigen::VectorXd occ = occupancy_diag(mdp, policy);
  const Eigen::MatrixXd p = transition_reference(mdp, policy);
  const Eigen::MatrixXd phi = features.matrix();
  Eigen::MatrixXd gram_ref = Eigen::MatrixXd::Zero(3, 3);
  Eigen::MatrixXd td_ref = Eigen::MatrixXd::Zero(3, 3);
  Eigen::VectorXd proj_ref = Eigen::VectorXd::Zero(3);
  const Eigen::VectorXd r = aclab::expected_reward(mdp, policy);
  for (int s = 0; s < 5; ++s) {
    Eigen::VectorXd successor = Eigen::VectorXd::Zero(3);
    for (int sp = 0; sp < 5; ++sp) successor += p(s, sp) * phi.row(sp).transpose();
    gram_ref += occ(s) * phi.row(s).transpose() * phi.row(s);
    td_ref += occ(s) * phi.row(s).transpose() *
              (phi.row(s) - mdp.discount * successor.transpose());
    proj_ref += occ(s) * r(s) * phi.row(s).transpose();
  }
  CHECK((mats.gram - gram_ref).lpNorm<Eigen::Infinity>() <= 1e-13);
  CHECK((mats.td_matrix - td_ref).lpNorm<Eigen::Infinity>() <= 1e-13);
  CHECK((mats.reward_proj - proj_ref).lpNorm<Eigen::Infinity>() <= 1e-13);
  CHECK((mats.gram - mats.gram.transpose()).lpNorm<Eigen::Infinity>() <= 1e-14);
}

TEST_CASE("tabular critic matrices reduce to occupancy diagonals") {
  const FiniteMdp mdp = default_garnet();
  const SoftmaxPolicy policy = random_tabular_policy(mdp, 118);
  const CriticFeatures features = CriticFeatures::tabular(5);
  const aclab::CriticMatrices mats = aclab::critic_matrices(mdp, policy, features);
  const Eigen::VectorXd occ = occupancy_diag(mdp, policy);
  const Eigen::MatrixXd d = occ.asDiagonal();
  const Eigen::MatrixXd p = transition_reference(mdp, policy);
  CHECK((mats.gram - d).lpNorm<Eigen::Infinity>() <= 1e-14);
  const Eigen::MatrixXd td_expected =
      d * (Eigen::MatrixXd::Identity(5, 5) - mdp.discount * p);
  CHECK((mats.td_matrix - td_expected).lpNorm<Eigen::Infinity>() <= 1e-14);
}

TEST_CASE("frozen-bootstrap target obeys the residual identity") {
  const FiniteMdp mdp = default_garnet();
  const SoftmaxPolicy policy = random_tabular_policy(mdp, 129);
  const CriticFeatures features = CriticFeatures::gaussian_orthonormal(5, 3, 12);
  const aclab::CriticMatrices mats = aclab::critic_matrices(mdp, policy, features);
  CounterRng rng(77);
  for (int trial = 0; trial < 5; ++trial) {
    Eigen::VectorXd w(3);
    for (int j = 0; j < 3; ++j) w(j) = rng.next_gaussian();
    const Eigen::VectorXd target = aclab::bellman_target_projection(mdp, policy, features, w);
    const Eigen::VectorXd lhs = target - mats.gram * w;
    const Eigen::VectorXd rhs = mats.reward_proj - mats.td_matrix * w;
    CHECK((lhs - rhs).lpNorm<Eigen::Infinity>() <= 1e-12);
  }
}

TEST_CASE("fixed points close the loop") {
  const FiniteMdp mdp = default_garnet();
  const SoftmaxPolicy policy = random_tabular_policy(mdp, 140);
  const CriticFeatures features = CriticFeatures::gaussian_orthonormal(5, 3, 13);

  aclab::FixedPointInfo info;
  const Eigen::VectorXd w_star = aclab::td_fixed_point(mdp, policy, features, &info);
  CHECK_FALSE(info.near_singular);
  CHECK(info.td_matrix_rcond > 1e-12);

  // Regressing against the fixed point reproduces it, with a healthy gram.
  aclab::FixedPointInfo gram_info;
  const Eigen::VectorXd back =
      aclab::critic_fixed_point(mdp, policy, features, w_star, &gram_info);
  CHECK_FALSE(gram_info.near_singular);
  CHECK(gram_info.gram_rcond > 1e-12);
  CHECK((back - w_star).lpNorm<Eigen::Infinity>() <= 1e-10);

  // The projected Bellman image of the fixed point is itself.
  const Eigen::MatrixXd proj = aclab::projection(mdp, policy, features);
  const Eigen::VectorXd phi_w = features.matrix() * w_star;
  const Eigen::VectorXd image = proj * aclab::bellman_apply(mdp, policy, phi_w);
  CHECK((image - phi_w).lpNorm<Eigen::Infinity>() <= 1e-10);

  // Zero bootstrap weights regress onto the plain reward projection.
  const aclab::CriticMatrices mats = aclab::critic_matrices(mdp, policy, features);
  const Eigen::VectorXd w0 = aclab::critic_fixed_point(mdp, policy, features,
                                                       Eigen::VectorXd::Zero(3));
  const Eigen::VectorXd expected = mats.gram.ldlt().solve(mats.reward_proj);
  CHECK((w0 - expected).lpNorm<Eigen::Infinity>() <= 1e-10);
}

TEST_CASE("tabular TD fixed point recovers the state values") {
  const FiniteMdp mdp = default_garnet();
  const SoftmaxPolicy policy = random_tabular_policy(mdp, 151);
  const CriticFeatures features = CriticFeatures::tabular(5);
  const Eigen::VectorXd w_star = aclab::td_fixed_point(mdp, policy, features);
  CHECK((w_star - aclab::state_values(mdp, policy)).lpNorm<Eigen::Infinity>() <= 1e-10);
}

TEST_CASE("duplicated feature columns are reported as near singular") {
  const FiniteMdp mdp = default_garnet();
  const SoftmaxPolicy policy = random_tabular_policy(mdp, 162);
  Eigen::MatrixXd m(5, 2);
  m << 1.0, 1.0, 0.5, 0.5, -1.0, -1.0, 2.0, 2.0, 0.0, 0.0;
  const CriticFeatures degenerate(m);
  aclab::FixedPointInfo info;
  (void)aclab::td_fixed_point(mdp, policy, degenerate, &info);
  CHECK(info.near_singular);
}

TEST_CASE("projection is idempotent, D-self-adjoint, and fixes the span") {
  const FiniteMdp mdp = default_garnet();
  const SoftmaxPolicy policy = random_tabular_policy(mdp, 173);
  const CriticFeatures features = CriticFeatures::gaussian_orthonormal(5, 2, 14);
  const Eigen::MatrixXd proj = aclab::projection(mdp, policy, features);

  CHECK((proj * proj - proj).lpNorm<Eigen::Infinity>() <= 1e-9);

  const Eigen::VectorXd occ = occupancy_diag(mdp, policy);
  const Eigen::MatrixXd d = occ.asDiagonal();
  CHECK((d * proj - proj.transpose() * d).lpNorm<Eigen::Infinity>() <= 1e-10);

  CounterRng rng(15);
  Eigen::VectorXd w(2);
  w << rng.next_gaussian(), rng.next_gaussian();
  const Eigen::VectorXd in_span = features.matrix() * w;
  CHECK((proj * in_span - in_span).lpNorm<Eigen::Infinity>() <= 1e-12);

  // Tabular features make the projection the identity.
  const Eigen::MatrixXd full =
      aclab::projection(mdp, policy, CriticFeatures::tabular(5));
  CHECK((full - Eigen::MatrixXd::Identity(5, 5)).lpNorm<Eigen::Infinity>() <= 1e-10);
}

TEST_CASE("projection agrees with a weighted least-squares reference") {
  const FiniteMdp mdp = default_garnet();
  const SoftmaxPolicy policy = random_tabular_policy(mdp, 184);
  const CriticFeatures features = CriticFeatures::gaussian_orthonormal(5, 3, 16);
  const Eigen::MatrixXd proj = aclab::projection(mdp, policy, features);

  // Reference route: minimize || sqrt(D) (Phi w - v) || by QR and map back.
  const Eigen::VectorXd occ = occupancy_diag(mdp, policy);
  const Eigen::VectorXd sqrt_d = occ.cwiseSqrt();
  const Eigen::MatrixXd weighted = sqrt_d.asDiagonal() * features.matrix();
  CounterRng rng(17);
  for (int trial = 0; trial < 5; ++trial) {
    Eigen::VectorXd v(5);
    for (int s = 0; s < 5; ++s) v(s) = rng.next_gaussian();
    const Eigen::VectorXd w =
        weighted.colPivHouseholderQr().solve(sqrt_d.asDiagonal() * v);
    const Eigen::VectorXd reference = features.matrix() * w;
    CHECK((proj * v - reference).lpNorm<Eigen::Infinity>() <= 1e-10);
  }
}

TEST_CASE("analytic gradient matches central finite differences of the objective") {
  const FiniteMdp mdp = default_garnet();
  const SoftmaxPolicy policy = random_tabular_policy(mdp, 195);
  const Eigen::VectorXd grad = aclab::exact_gradient(mdp, policy);

  // From-scratch finite differences, using only the objective.
  const double h = 1e-5;
  Eigen::VectorXd fd(policy.param_dim());
  for (int j = 0; j < policy.param_dim(); ++j) {
    SoftmaxPolicy up = policy, down = policy;
    Eigen::VectorXd params = policy.params();
    params(j) += h;
    up.set_params(params);
    params(j) -= 2.0 * h;
    down.set_params(params);
    fd(j) = (aclab::objective(mdp, up) - aclab::objective(mdp, down)) / (2.0 * h);
  }
  const double scale = std::max(grad.norm(), 1e-12);
  CHECK((grad - fd).norm() / scale <= 1e-6);
  CHECK((grad - aclab::numerical_gradient(mdp, policy)).norm() / scale <= 1e-6);
}

TEST_CASE("constant rewards flatten the objective landscape") {
  FiniteMdp mdp = default_garnet();
  mdp.reward.setConstant(0.3);
  mdp.reward_bound = mdp.implied_reward_bound();
  const SoftmaxPolicy policy = random_tabular_policy(mdp, 206);
  CHECK(aclab::exact_gradient(mdp, policy).lpNorm<Eigen::Infinity>() <= 1e-12);
}

TEST_CASE("gradient is invariant to the state-value baseline") {
  const FiniteMdp mdp = default_garnet();
  const SoftmaxPolicy policy = random_tabular_policy(mdp, 217);
  const Eigen::VectorXd grad = aclab::exact_gradient(mdp, policy);

  const Eigen::VectorXd pair_occ = aclab::state_action_occupancy(mdp, policy);
  const Eigen::VectorXd q = aclab::action_values(mdp, policy);
  Eigen::VectorXd unbaselined = Eigen::VectorXd::Zero(policy.param_dim());
  for (int s = 0; s < mdp.n_states; ++s)
    for (int a = 0; a < mdp.n_actions; ++a) {
      const int idx = mdp.pair_index(s, a);
      unbaselined += pair_occ(idx) * q(idx) * policy.score(s, a);
    }
  unbaselined /= (1.0 - mdp.discount);
  CHECK((grad - unbaselined).lpNorm<Eigen::Infinity>() <= 1e-12);
}

TEST_CASE("drift equals gradient plus bias, and the bias knows when to vanish") {
  const FiniteMdp mdp = default_garnet();
  const SoftmaxPolicy policy = random_tabular_policy(mdp, 228);

  const CriticFeatures tabular = CriticFeatures::tabular(5);
  CHECK(aclab::gradient_bias(mdp, policy, tabular).norm() <= 1e-10);
  CHECK((aclab::actor_drift(mdp, policy, tabular) - aclab::exact_gradient(mdp, policy))
            .lpNorm<Eigen::Infinity>() <= 1e-10);

  const CriticFeatures deficient = CriticFeatures::gaussian_orthonormal(5, 2, 18);
  const Eigen::VectorXd drift = aclab::actor_drift(mdp, policy, deficient);
  const Eigen::VectorXd grad = aclab::exact_gradient(mdp, policy);
  const Eigen::VectorXd bias = aclab::gradient_bias(mdp, policy, deficient);
  CHECK((drift - grad - bias).lpNorm<Eigen::Infinity>() <= 1e-10);
}

TEST_CASE("a feature span containing the state values zeroes bias and error") {
  const FiniteMdp mdp = default_garnet();
  const SoftmaxPolicy policy = random_tabular_policy(mdp, 239);
  const Eigen::VectorXd v = aclab::state_values(mdp, policy);

  Eigen::MatrixXd m(5, 2);
  m.col(0) = v;
  CounterRng rng(19);
  for (int s = 0; s < 5; ++s) m(s, 1) = rng.next_gaussian();
  const CriticFeatures features(m);
  REQUIRE(aclab::check_rank(features).full_column_rank);

  CHECK(aclab::approximation_error(mdp, policy, features) <= 1e-9);
  CHECK(aclab::gradient_bias(mdp, policy, features).norm() <= 1e-9);
  const Eigen::VectorXd w_star = aclab::td_fixed_point(mdp, policy, features);
  CHECK((features.matrix() * w_star - v).lpNorm<Eigen::Infinity>() <= 1e-9);
}

TEST_CASE("approximation error is zero with full span and positive without") {
  const FiniteMdp mdp = default_garnet();
  const SoftmaxPolicy policy = random_tabular_policy(mdp, 250);
  CHECK(aclab::approximation_error(mdp, policy, CriticFeatures::tabular(5)) <= 1e-10);
  const double eps =
      aclab::approximation_error(mdp, policy, CriticFeatures::gaussian_orthonormal(5, 2, 20));
  CHECK(eps > 1e-6);
}

TEST_CASE("spectral certificates hold across sampled parameters") {
  const FiniteMdp mdp = default_garnet();
  const CriticFeatures features = CriticFeatures::gaussian_orthonormal(5, 3, 21);
  for (std::uint64_t seed : {261ULL, 272ULL, 283ULL}) {
    const SoftmaxPolicy policy = random_tabular_policy(mdp, seed);
    const aclab::SpectralReport report = aclab::spectral_report(mdp, policy, features);
    CHECK(report.gram_min_eig > 0.0);
    const double chain_floor =
        (1.0 - std::sqrt(mdp.discount)) * report.gram_min_eig - 1e-10;
    CHECK(report.td_sym_min_eig >= chain_floor);
    CHECK(report.precond_sym_min_eig > 0.0);
    CHECK(report.stability_margin < 0.0);
    CHECK(report.contraction_ok);
    CHECK(report.contraction_worst_slack >= -1e-12);
    CHECK(report.contraction_samples == 100);
  }
}

TEST_CASE("transition averaging contraction verified by direct sampling") {
  const FiniteMdp mdp = default_garnet();
  const SoftmaxPolicy policy = random_tabular_policy(mdp, 294);
  const Eigen::MatrixXd p = transition_reference(mdp, policy);
  const Eigen::VectorXd occ = occupancy_diag(mdp, policy);
  const double g = mdp.discount;
  CounterRng rng(23);
  for (int trial = 0; trial < 20; ++trial) {
    Eigen::VectorXd v(5);
    for (int s = 0; s < 5; ++s) v(s) = rng.next_gaussian();
    const Eigen::VectorXd pv = p * v;
    const double lhs = pv.cwiseProduct(pv).dot(occ);
    const double d_norm = v.cwiseProduct(v).dot(occ);
    const double rho_norm = v.cwiseProduct(v).dot(mdp.init_dist);
    const double rhs = d_norm / g - (1.0 - g) / g * rho_norm;
    CHECK(lhs <= rhs + 1e-12);
  }
}

TEST_CASE("the full check list passes on the default instances") {
  const FiniteMdp mdp = default_garnet();
  const SoftmaxPolicy policy = random_tabular_policy(mdp, 305);
  for (const CriticFeatures& features :
       {CriticFeatures::tabular(5), CriticFeatures::gaussian_orthonormal(5, 2, 22)}) {
    const auto checks = aclab::oracle_checks(mdp, policy, features);
    CHECK(checks.size() >= 12);
    for (const auto& check : checks) {
      INFO("check: ", check.name, " detail: ", check.detail);
      CHECK(check.passed);
    }
  }
}

TEST_CASE("oracle report is internally consistent and serializes") {
  const FiniteMdp mdp = default_garnet();
  const SoftmaxPolicy policy = random_tabular_policy(mdp, 316);
  const CriticFeatures features = CriticFeatures::gaussian_orthonormal(5, 3, 24);
  const aclab::OracleReport report = aclab::oracle_report(mdp, policy, features);

  CHECK(report.n_states == 5);
  CHECK(report.n_actions == 3);
  CHECK(report.feature_dim == 3);
  CHECK(report.discount == 0.9);
  CHECK_FALSE(report.condition_warning);
  CHECK((report.td_fixed_point - aclab::td_fixed_point(mdp, policy, features))
            .lpNorm<Eigen::Infinity>() == 0.0);
  CHECK((report.state_values - aclab::state_values(mdp, policy)).lpNorm<Eigen::Infinity>() ==
        0.0);
  CHECK(report.objective == aclab::objective(mdp, policy));

  const aclab::TextDoc doc = aclab::oracle_report_to_doc(report);
  CHECK(doc.get_string("schema") == "aclab-oracle-report/1");
  CHECK(doc.get_integer("n_states") == 5);
  CHECK(doc.get_number("objective") == report.objective);
  CHECK(doc.get_list("state_values").size() == 5);
  CHECK(doc.get_list("transition").size() == 25);
  const aclab::TextDoc reparsed = aclab::TextDoc::parse(doc.serialize());
  CHECK(reparsed.get_list("td_fixed_point") == doc.get_list("td_fixed_point"));
}

TEST_CASE("shape mismatches are rejected up front") {
  const FiniteMdp mdp = default_garnet();
  const SoftmaxPolicy wrong_policy = SoftmaxPolicy::tabular(4, 3);
  CHECK_THROWS(aclab::transition_matrix(mdp, wrong_policy));
  const SoftmaxPolicy policy = SoftmaxPolicy::tabular(5, 3);
  const CriticFeatures wrong_features = CriticFeatures::tabular(4);
  CHECK_THROWS(aclab::critic_matrices(mdp, policy, wrong_features));
}

TEST_SUITE_END();
