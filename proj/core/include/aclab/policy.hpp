#ifndef ACLAB_POLICY_HPP
#define ACLAB_POLICY_HPP

#include <string>

#include <Eigen/Core>

#include "aclab/rng.hpp"
#include "aclab/textdoc.hpp"

namespace aclab {

// Softmax policy over linear features: the probability of action a in state
// s is proportional to exp(params . features(s,a)). Features are stored one
// row per (s,a) pair, row-major, matching the MDP kernel layout.
class SoftmaxPolicy {
 public:
  SoftmaxPolicy(Eigen::MatrixXd features, int n_states, int n_actions,
                Eigen::VectorXd params);

  // One-hot feature rows, params dimension n_states * n_actions, params = 0.
  static SoftmaxPolicy tabular(int n_states, int n_actions);
  static Eigen::MatrixXd tabular_features(int n_states, int n_actions);

  int n_states() const { return n_states_; }
  int n_actions() const { return n_actions_; }
  int param_dim() const { return static_cast<int>(params_.size()); }

  const Eigen::MatrixXd& features() const { return features_; }
  const Eigen::VectorXd& params() const { return params_; }
  void set_params(const Eigen::VectorXd& params);

  // Logits are shifted by their maximum before exponentiation. The result
  // always sums to one; entries are strictly positive as long as the logit
  // spread at s stays below the double exp underflow threshold (about 744).
  Eigen::VectorXd action_probs(int s) const;

  // Gradient of the log-probability: features(s,a) minus the
  // policy-weighted feature average at s.
  Eigen::VectorXd score(int s, int a) const;

  int sample_action(int s, CounterRng& rng) const;

  int pair_index(int s, int a) const { return s * n_actions_ + a; }

 private:
  void check_state(int s) const;
  Eigen::MatrixXd features_;  // (n_states * n_actions) x d
  Eigen::VectorXd params_;
  int n_states_;
  int n_actions_;
};

// Feature file (schema "aclab-policy-features/1"): n_states, n_actions, dim,
// matrix (dense, row per (s,a) pair).
Eigen::MatrixXd policy_features_from_doc(const TextDoc& doc, int* n_states, int* n_actions);
TextDoc policy_features_to_doc(const Eigen::MatrixXd& features, int n_states, int n_actions);
Eigen::MatrixXd load_policy_features(const std::string& path, int* n_states, int* n_actions);
void save_policy_features(const Eigen::MatrixXd& features, int n_states, int n_actions,
                          const std::string& path);

inline constexpr const char* kPolicyFeatureSchema = "aclab-policy-features/1";

}  // namespace aclab

#endif
