#include "aclab/features.hpp"

#include <stdexcept>

#include <Eigen/QR>
#include <Eigen/SVD>

#include "aclab/rng.hpp"

namespace aclab {

CriticFeatures::CriticFeatures(Eigen::MatrixXd matrix, bool require_unit_norm)
    : matrix_(std::move(matrix)), require_unit_norm_(require_unit_norm) {
  if (matrix_.rows() < 1 || matrix_.cols() < 1)
    throw std::invalid_argument("CriticFeatures: matrix must be nonempty");
  if (matrix_.cols() > matrix_.rows())
    throw std::invalid_argument("CriticFeatures: more feature columns than states");
  if (!matrix_.allFinite())
    throw std::invalid_argument("CriticFeatures: matrix must be finite");
  if (require_unit_norm_) {
    const double max_norm = matrix_.rowwise().norm().maxCoeff();
    if (max_norm > 1.0 + 1e-12)
      throw std::invalid_argument("CriticFeatures: row norm " + format_double(max_norm) +
                                  " exceeds 1 with the unit-norm flag set");
  }
}

CriticFeatures CriticFeatures::tabular(int n_states) {
  return CriticFeatures(Eigen::MatrixXd::Identity(n_states, n_states), true);
}

CriticFeatures CriticFeatures::gaussian_orthonormal(int n_states, int dim, std::uint64_t seed) {
  if (dim > n_states)
    throw std::invalid_argument("gaussian_orthonormal: dim must not exceed n_states");
  CounterRng rng(seed);
  Eigen::MatrixXd raw(n_states, dim);
  for (int i = 0; i < n_states; ++i)
    for (int j = 0; j < dim; ++j) raw(i, j) = rng.next_gaussian();
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(raw);
  Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(n_states, dim);
  return CriticFeatures(q, true);
}

double CriticFeatures::value_of(const Eigen::VectorXd& weights, int s) const {
  if (weights.size() != matrix_.cols())
    throw std::invalid_argument("value_of: weight dimension " + std::to_string(weights.size()) +
                                " does not match feature dimension " +
                                std::to_string(matrix_.cols()));
  if (s < 0 || s >= n_states())
    throw std::out_of_range("value_of: state " + std::to_string(s) + " out of range");
  return matrix_.row(s).dot(weights);
}

RankReport check_rank(const CriticFeatures& features, double rank_tol_factor) {
  if (features.dim() > features.n_states())
    throw std::invalid_argument("check_rank: more feature columns than states");

  Eigen::JacobiSVD<Eigen::MatrixXd> svd(features.matrix());
  const Eigen::VectorXd sv = svd.singularValues();

  RankReport report;
  report.largest_sv = sv(0);
  report.smallest_sv = sv(sv.size() - 1);
  report.ratio = report.largest_sv > 0.0 ? report.smallest_sv / report.largest_sv : 0.0;
  report.tolerance = rank_tol_factor * report.largest_sv;
  report.rank = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i)
    if (sv(i) > report.tolerance) ++report.rank;
  report.full_column_rank = (report.rank == features.dim());
  report.max_row_norm = features.matrix().rowwise().norm().maxCoeff();
  report.unit_norm_ok = report.max_row_norm <= 1.0 + 1e-12;
  return report;
}

namespace {
const std::vector<std::string> kCriticFeatureKeys = {"schema", "n_states", "dim", "matrix",
                                                     "require_unit_norm"};
}

CriticFeatures critic_features_from_doc(const TextDoc& doc) {
  if (doc.get_string_or("schema", "") != kCriticFeatureSchema)
    throw std::runtime_error("critic feature file: expected schema \"" +
                             std::string(kCriticFeatureSchema) + "\"");
  const auto unknown = doc.unknown_keys(kCriticFeatureKeys);
  if (!unknown.empty())
    throw std::runtime_error("critic feature file: unknown key '" + unknown.front() + "'");

  const int n = static_cast<int>(doc.get_integer("n_states"));
  const int dim = static_cast<int>(doc.get_integer("dim"));
  if (n <= 0 || dim <= 0) throw std::runtime_error("critic feature file: counts must be positive");
  if (dim > n)
    throw std::runtime_error("critic feature file: dim must not exceed n_states");
  const auto& m = doc.get_list("matrix");
  if (static_cast<int>(m.size()) != n * dim)
    throw std::runtime_error("critic feature file: matrix must have n_states*dim entries");
  Eigen::MatrixXd matrix =
      Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
          m.data(), n, dim);
  return CriticFeatures(matrix, doc.get_bool_or("require_unit_norm", false));
}

TextDoc critic_features_to_doc(const CriticFeatures& features) {
  TextDoc doc;
  doc.set_string("schema", kCriticFeatureSchema);
  doc.set_integer("n_states", features.n_states());
  doc.set_integer("dim", features.dim());
  doc.set_bool("require_unit_norm", features.require_unit_norm());
  std::vector<double> m;
  m.reserve(features.matrix().size());
  for (int r = 0; r < features.n_states(); ++r)
    for (int c = 0; c < features.dim(); ++c) m.push_back(features.matrix()(r, c));
  doc.set_list("matrix", m);
  return doc;
}

CriticFeatures load_critic_features(const std::string& path) {
  return critic_features_from_doc(TextDoc::load(path));
}

void save_critic_features(const CriticFeatures& features, const std::string& path) {
  critic_features_to_doc(features).save(path);
}

}  // namespace aclab
