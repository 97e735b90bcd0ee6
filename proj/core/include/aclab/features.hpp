#ifndef ACLAB_FEATURES_HPP
#define ACLAB_FEATURES_HPP

#include <cstdint>
#include <string>

#include <Eigen/Core>

#include "aclab/textdoc.hpp"

namespace aclab {

// Critic feature matrix, one row per state. The critic's value estimate for
// state s is row(s) . weights. Column count must not exceed the state count;
// the rank certificate below guards full column rank.
class CriticFeatures {
 public:
  explicit CriticFeatures(Eigen::MatrixXd matrix, bool require_unit_norm = false);

  static CriticFeatures tabular(int n_states);
  // Gaussian columns orthonormalized; row norms are then automatically <= 1.
  // With dim < n_states this doubles as the deliberately-deficient-span
  // family used to exercise nonzero approximation error.
  static CriticFeatures gaussian_orthonormal(int n_states, int dim, std::uint64_t seed);

  int n_states() const { return static_cast<int>(matrix_.rows()); }
  int dim() const { return static_cast<int>(matrix_.cols()); }
  const Eigen::MatrixXd& matrix() const { return matrix_; }
  bool require_unit_norm() const { return require_unit_norm_; }

  auto row(int s) const { return matrix_.row(s); }
  double value_of(const Eigen::VectorXd& weights, int s) const;

 private:
  Eigen::MatrixXd matrix_;  // n_states x dim
  bool require_unit_norm_;
};

struct RankReport {
  int rank = 0;
  double smallest_sv = 0.0;
  double largest_sv = 0.0;
  double ratio = 0.0;           // smallest / largest
  double tolerance = 0.0;       // absolute cutoff used
  bool full_column_rank = false;
  bool unit_norm_ok = true;     // max row norm <= 1 + 1e-12, reported always
  double max_row_norm = 0.0;
};

// Full-column-rank certificate from singular values: passes when the
// smallest singular value exceeds rank_tol_factor times the largest.
RankReport check_rank(const CriticFeatures& features, double rank_tol_factor = 1e-9);

// Feature file (schema "aclab-critic-features/1"): n_states, dim, matrix
// (dense row-major), optional require_unit_norm.
CriticFeatures critic_features_from_doc(const TextDoc& doc);
TextDoc critic_features_to_doc(const CriticFeatures& features);
CriticFeatures load_critic_features(const std::string& path);
void save_critic_features(const CriticFeatures& features, const std::string& path);

inline constexpr const char* kCriticFeatureSchema = "aclab-critic-features/1";

}  // namespace aclab

#endif
