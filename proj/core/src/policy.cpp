#include "aclab/policy.hpp"

#include <cmath>
#include <stdexcept>

namespace aclab {

SoftmaxPolicy::SoftmaxPolicy(Eigen::MatrixXd features, int n_states, int n_actions,
                             Eigen::VectorXd params)
    : features_(std::move(features)),
      params_(std::move(params)),
      n_states_(n_states),
      n_actions_(n_actions) {
  if (n_states_ <= 0 || n_actions_ <= 0)
    throw std::invalid_argument("SoftmaxPolicy: counts must be positive");
  if (features_.rows() != static_cast<Eigen::Index>(n_states_) * n_actions_)
    throw std::invalid_argument("SoftmaxPolicy: features need one row per (state, action) pair");
  if (features_.cols() < 1)
    throw std::invalid_argument("SoftmaxPolicy: feature dimension must be at least 1");
  if (params_.size() != features_.cols())
    throw std::invalid_argument("SoftmaxPolicy: params dimension does not match features");
  if (!features_.allFinite())
    throw std::invalid_argument("SoftmaxPolicy: features must be finite");
}

SoftmaxPolicy SoftmaxPolicy::tabular(int n_states, int n_actions) {
  return SoftmaxPolicy(tabular_features(n_states, n_actions), n_states, n_actions,
                       Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n_states) * n_actions));
}

Eigen::MatrixXd SoftmaxPolicy::tabular_features(int n_states, int n_actions) {
  const Eigen::Index k = static_cast<Eigen::Index>(n_states) * n_actions;
  return Eigen::MatrixXd::Identity(k, k);
}

void SoftmaxPolicy::set_params(const Eigen::VectorXd& params) {
  if (params.size() != features_.cols())
    throw std::invalid_argument("SoftmaxPolicy: params dimension does not match features");
  params_ = params;
}

void SoftmaxPolicy::check_state(int s) const {
  if (s < 0 || s >= n_states_)
    throw std::out_of_range("SoftmaxPolicy: state " + std::to_string(s) + " out of range");
}

Eigen::VectorXd SoftmaxPolicy::action_probs(int s) const {
  check_state(s);
  Eigen::VectorXd logits(n_actions_);
  for (int a = 0; a < n_actions_; ++a)
    logits(a) = features_.row(pair_index(s, a)).dot(params_);
  logits.array() -= logits.maxCoeff();
  Eigen::VectorXd probs = logits.array().exp();
  probs /= probs.sum();
  return probs;
}

Eigen::VectorXd SoftmaxPolicy::score(int s, int a) const {
  check_state(s);
  if (a < 0 || a >= n_actions_)
    throw std::out_of_range("SoftmaxPolicy: action " + std::to_string(a) + " out of range");
  const Eigen::VectorXd probs = action_probs(s);
  Eigen::VectorXd mean = Eigen::VectorXd::Zero(features_.cols());
  for (int b = 0; b < n_actions_; ++b)
    mean.noalias() += probs(b) * features_.row(pair_index(s, b)).transpose();
  return features_.row(pair_index(s, a)).transpose() - mean;
}

int SoftmaxPolicy::sample_action(int s, CounterRng& rng) const {
  return sample_categorical(rng, action_probs(s));
}

namespace {
const std::vector<std::string> kPolicyFeatureKeys = {"schema", "n_states", "n_actions", "dim",
                                                     "matrix"};
}

Eigen::MatrixXd policy_features_from_doc(const TextDoc& doc, int* n_states, int* n_actions) {
  if (doc.get_string_or("schema", "") != kPolicyFeatureSchema)
    throw std::runtime_error("policy feature file: expected schema \"" +
                             std::string(kPolicyFeatureSchema) + "\"");
  const auto unknown = doc.unknown_keys(kPolicyFeatureKeys);
  if (!unknown.empty())
    throw std::runtime_error("policy feature file: unknown key '" + unknown.front() + "'");

  const int n = static_cast<int>(doc.get_integer("n_states"));
  const int na = static_cast<int>(doc.get_integer("n_actions"));
  const int d = static_cast<int>(doc.get_integer("dim"));
  if (n <= 0 || na <= 0 || d <= 0)
    throw std::runtime_error("policy feature file: counts must be positive");

  const auto& m = doc.get_list("matrix");
  if (static_cast<int>(m.size()) != n * na * d)
    throw std::runtime_error("policy feature file: matrix must have n_states*n_actions*dim entries");
  Eigen::MatrixXd features =
      Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
          m.data(), static_cast<Eigen::Index>(n) * na, d);
  if (!features.allFinite())
    throw std::runtime_error("policy feature file: matrix entries must be finite");
  if (n_states) *n_states = n;
  if (n_actions) *n_actions = na;
  return features;
}

TextDoc policy_features_to_doc(const Eigen::MatrixXd& features, int n_states, int n_actions) {
  TextDoc doc;
  doc.set_string("schema", kPolicyFeatureSchema);
  doc.set_integer("n_states", n_states);
  doc.set_integer("n_actions", n_actions);
  doc.set_integer("dim", features.cols());
  std::vector<double> m;
  m.reserve(features.size());
  for (Eigen::Index r = 0; r < features.rows(); ++r)
    for (Eigen::Index c = 0; c < features.cols(); ++c) m.push_back(features(r, c));
  doc.set_list("matrix", m);
  return doc;
}

Eigen::MatrixXd load_policy_features(const std::string& path, int* n_states, int* n_actions) {
  return policy_features_from_doc(TextDoc::load(path), n_states, n_actions);
}

void save_policy_features(const Eigen::MatrixXd& features, int n_states, int n_actions,
                          const std::string& path) {
  policy_features_to_doc(features, n_states, n_actions).save(path);
}

}  // namespace aclab
