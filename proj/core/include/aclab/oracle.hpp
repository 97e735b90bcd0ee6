#ifndef ACLAB_ORACLE_HPP
#define ACLAB_ORACLE_HPP

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "aclab/features.hpp"
#include "aclab/mdp.hpp"
#include "aclab/policy.hpp"
#include "aclab/textdoc.hpp"

namespace aclab {

// Closed-form ground truth for a fixed policy parameter. Everything here is
// a dense linear-algebra computation on the finite instance; the learning
// loop is tested against these values, never the other way around.

// State transition matrix under the policy: row s is the next-state law.
Eigen::MatrixXd transition_matrix(const FiniteMdp& mdp, const SoftmaxPolicy& policy);

// Policy-averaged one-step reward per state.
Eigen::VectorXd expected_reward(const FiniteMdp& mdp, const SoftmaxPolicy& policy);

// Discounted state occupancy, the normalized discounted visitation law
// started from init_dist. Default route: solve the transposed resolvent
// system (I - discount * P)' x = init_dist and scale by (1 - discount).
Eigen::VectorXd discounted_occupancy(const FiniteMdp& mdp, const SoftmaxPolicy& policy);

// Cross-check route: truncated geometric series with tail below `tail`.
Eigen::VectorXd discounted_occupancy_series(const FiniteMdp& mdp, const SoftmaxPolicy& policy,
                                            double tail = 1e-10);

struct StationaryInfo {
  bool unique = true;   // stacked system had full column rank
  int rank = 0;
  double residual = 0.0;  // || mu' K - mu' ||_inf of the returned vector
};

// Unique stationary law of a row-stochastic matrix, solved by least squares
// on [K' - I; 1'] mu = [0; 1]. A column-rank-deficient stack means the chain
// has several invariant laws (ergodicity failure); that is reported through
// `info` rather than thrown, and the least-squares minimizer is returned.
Eigen::VectorXd stationary_distribution(const Eigen::MatrixXd& K, StationaryInfo* info = nullptr);

// State-action occupancy: state occupancy times the policy.
Eigen::VectorXd state_action_occupancy(const FiniteMdp& mdp, const SoftmaxPolicy& policy);

// The chain actually sampled by the learner. State form: restart-mixed
// transition matrix discount * P + (1 - discount) * 1 rho'. Pair form: the
// (s,a) chain whose stationary law is the state-action occupancy.
Eigen::MatrixXd state_chain_kernel(const FiniteMdp& mdp, const SoftmaxPolicy& policy);
Eigen::MatrixXd pair_chain_kernel(const FiniteMdp& mdp, const SoftmaxPolicy& policy);

// One application of the policy's Bellman operator to a state-value vector.
Eigen::VectorXd bellman_apply(const FiniteMdp& mdp, const SoftmaxPolicy& policy,
                              const Eigen::VectorXd& values);

// Exact state values (resolvent solve) and action values.
Eigen::VectorXd state_values(const FiniteMdp& mdp, const SoftmaxPolicy& policy);
Eigen::VectorXd action_values(const FiniteMdp& mdp, const SoftmaxPolicy& policy);

// Expected discounted return from the initial distribution.
double objective(const FiniteMdp& mdp, const SoftmaxPolicy& policy);

struct CriticMatrices {
  Eigen::MatrixXd gram;          // Phi' D Phi
  Eigen::MatrixXd td_matrix;     // Phi' D (I - discount * P) Phi
  Eigen::VectorXd reward_proj;   // Phi' D R
};
CriticMatrices critic_matrices(const FiniteMdp& mdp, const SoftmaxPolicy& policy,
                               const CriticFeatures& features);

// Projected one-step regression target Phi' D (R + discount * P Phi w) as a
// function of the (frozen) bootstrap weights w.
Eigen::VectorXd bellman_target_projection(const FiniteMdp& mdp, const SoftmaxPolicy& policy,
                                          const CriticFeatures& features,
                                          const Eigen::VectorXd& bootstrap_weights);

struct FixedPointInfo {
  double gram_rcond = 0.0;     // reciprocal condition estimates of the solves
  double td_matrix_rcond = 0.0;
  bool near_singular = false;  // any reciprocal condition below 1e-12
};

// Regression fixed point for frozen bootstrap weights: gram^{-1} times the
// projected target.
Eigen::VectorXd critic_fixed_point(const FiniteMdp& mdp, const SoftmaxPolicy& policy,
                                   const CriticFeatures& features,
                                   const Eigen::VectorXd& bootstrap_weights,
                                   FixedPointInfo* info = nullptr);

// Joint fixed point of the critic/target recursion: td_matrix^{-1} applied
// to the projected reward. Solves the projected Bellman equation.
Eigen::VectorXd td_fixed_point(const FiniteMdp& mdp, const SoftmaxPolicy& policy,
                               const CriticFeatures& features, FixedPointInfo* info = nullptr);

// Occupancy-weighted projection onto the feature span:
// Phi (Phi' D Phi)^{-1} Phi' D. Idempotent and self-adjoint in the D inner
// product.
Eigen::MatrixXd projection(const FiniteMdp& mdp, const SoftmaxPolicy& policy,
                           const CriticFeatures& features);

// Exact policy gradient: occupancy-weighted sum of advantage times score,
// scaled by 1/(1 - discount).
Eigen::VectorXd exact_gradient(const FiniteMdp& mdp, const SoftmaxPolicy& policy);

// Central finite differences of the objective in the policy parameter; the
// independent numerical route the analytic gradient is checked against.
Eigen::VectorXd numerical_gradient(const FiniteMdp& mdp, const SoftmaxPolicy& policy,
                                   double step = 1e-5);

// Bootstrapped action-value proxy: reward plus discounted feature value of
// the TD fixed point at the successor.
Eigen::VectorXd td_action_value_proxy(const FiniteMdp& mdp, const SoftmaxPolicy& policy,
                                      const CriticFeatures& features);

// Steady-state mean direction of the actor update (occupancy-weighted score
// times the TD proxy, scaled by 1/(1 - discount)), computed from its
// feature-space decomposition.
Eigen::VectorXd actor_drift(const FiniteMdp& mdp, const SoftmaxPolicy& policy,
                            const CriticFeatures& features);

// Gap between the actor drift and the true gradient, as an explicit
// occupancy-weighted sum over the successor approximation error. Vanishes
// with tabular features.
Eigen::VectorXd gradient_bias(const FiniteMdp& mdp, const SoftmaxPolicy& policy,
                              const CriticFeatures& features);

// Occupancy-weighted norm of (state values - feature span proxy at the TD
// fixed point): the function-approximation error at this parameter.
double approximation_error(const FiniteMdp& mdp, const SoftmaxPolicy& policy,
                           const CriticFeatures& features);

struct SpectralReport {
  double gram_min_eig = 0.0;        // smallest eigenvalue of the (symmetric) gram
  double td_sym_min_eig = 0.0;      // smallest eigenvalue of sym(td_matrix)
  double precond_sym_min_eig = 0.0; // smallest eigenvalue of sym(gram^{-1} td_matrix)
  double stability_margin = 0.0;    // max real part of eig(-gram^{-1} td_matrix); < 0 stable
  bool contraction_ok = true;       // randomized transition-averaging inequality
  double contraction_worst_slack = 0.0;
  int contraction_samples = 0;
};

// Eigenvalue certificates behind the critic's convergence: positive
// definiteness of the gram and of the symmetrized TD matrix (with the
// (1 - sqrt(discount)) chain between them), the preconditioned variant, the
// Hurwitz margin of the critic ODE matrix, and a randomized check that
// averaging by P contracts the occupancy-weighted norm with the
// initial-distribution refinement term:
//   ||P v||_D^2 <= ||v||_D^2 / g - (1 - g)/g * ||v||_rho^2,  g = discount.
SpectralReport spectral_report(const FiniteMdp& mdp, const SoftmaxPolicy& policy,
                               const CriticFeatures& features, int n_random_vectors = 100,
                               std::uint64_t seed = 2024);

struct OracleReport {
  int n_states = 0, n_actions = 0, feature_dim = 0, param_dim = 0;
  double discount = 0.0;
  Eigen::MatrixXd transition;        // n x n
  Eigen::VectorXd reward;            // n
  Eigen::VectorXd state_occupancy;   // n
  Eigen::VectorXd pair_occupancy;    // n * n_actions
  Eigen::MatrixXd gram;              // m x m
  Eigen::MatrixXd td_matrix;         // m x m
  Eigen::VectorXd reward_proj;       // m
  Eigen::MatrixXd projection;        // n x n
  Eigen::VectorXd td_fixed_point;    // m
  Eigen::VectorXd state_values;      // n
  Eigen::VectorXd action_values;     // n * n_actions
  Eigen::VectorXd policy_gradient;   // d
  Eigen::VectorXd bias;              // d
  double objective = 0.0;
  double approximation_error = 0.0;
  SpectralReport spectral;
  FixedPointInfo solves;
  bool condition_warning = false;    // any solve with condition estimate above 1e12
};

OracleReport oracle_report(const FiniteMdp& mdp, const SoftmaxPolicy& policy,
                           const CriticFeatures& features);

struct OracleCheck {
  std::string name;
  bool passed = false;
  double margin = 0.0;  // distance to the failure boundary, >= 0 when passed
  std::string detail;
};

// Every identity and inequality the report is supposed to satisfy, each with
// its numeric margin: occupancy routes agree, fixed-point identities hold,
// the projection is idempotent and D-self-adjoint, the spectral certificates
// pass, the two-route gradient decomposition closes, and the analytic
// gradient matches finite differences.
std::vector<OracleCheck> oracle_checks(const FiniteMdp& mdp, const SoftmaxPolicy& policy,
                                       const CriticFeatures& features);

// Structured text rendering (schema "aclab-oracle-report/1").
TextDoc oracle_report_to_doc(const OracleReport& report);

}  // namespace aclab

#endif
