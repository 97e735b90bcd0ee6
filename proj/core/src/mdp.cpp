#include "aclab/mdp.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace aclab {

namespace {
constexpr double kProbTol = 1e-12;

std::string pair_label(int s, int a) {
  return "(s=" + std::to_string(s) + ", a=" + std::to_string(a) + ")";
}
}  // namespace

double FiniteMdp::implied_reward_bound() const {
  double m = 0.0;
  if (reward.size() > 0) m = reward.cwiseAbs().maxCoeff();
  return m + reward_noise_halfwidth;
}

std::string Violation::to_string() const {
  std::string out = field;
  if (!index.empty()) out += " " + index;
  out += ": " + message;
  return out;
}

std::vector<Violation> validate(const FiniteMdp& mdp) {
  std::vector<Violation> out;
  if (mdp.n_states <= 0) out.push_back({"n_states", "", "must be positive"});
  if (mdp.n_actions <= 0) out.push_back({"n_actions", "", "must be positive"});
  if (!out.empty()) return out;  // shape checks below need valid counts

  const int n = mdp.n_states;
  const int na = mdp.n_actions;

  if (mdp.kernel.rows() != static_cast<Eigen::Index>(n) * na || mdp.kernel.cols() != n) {
    out.push_back({"kernel", "", "expected shape (" + std::to_string(n * na) + " x " +
                                     std::to_string(n) + ")"});
  }
  if (mdp.reward.rows() != n || mdp.reward.cols() != na) {
    out.push_back({"reward", "",
                   "expected shape (" + std::to_string(n) + " x " + std::to_string(na) + ")"});
  }
  if (mdp.init_dist.size() != n)
    out.push_back({"init_dist", "", "expected length " + std::to_string(n)});
  if (!out.empty()) return out;

  for (int s = 0; s < n; ++s) {
    for (int a = 0; a < na; ++a) {
      const auto row = mdp.kernel_row(s, a);
      if (!row.allFinite()) {
        out.push_back({"kernel", pair_label(s, a), "non-finite entry"});
        continue;
      }
      if (row.minCoeff() < 0.0)
        out.push_back({"kernel", pair_label(s, a), "negative probability"});
      const double sum = row.sum();
      if (std::abs(sum - 1.0) > kProbTol)
        out.push_back({"kernel", pair_label(s, a), "row sums to " + format_double(sum)});
    }
  }

  if (!mdp.init_dist.allFinite()) {
    out.push_back({"init_dist", "", "non-finite entry"});
  } else {
    if (mdp.init_dist.minCoeff() < 0.0) {
      int idx = 0;
      mdp.init_dist.minCoeff(&idx);
      out.push_back({"init_dist", "(s=" + std::to_string(idx) + ")", "negative probability"});
    }
    const double sum = mdp.init_dist.sum();
    if (std::abs(sum - 1.0) > kProbTol)
      out.push_back({"init_dist", "", "sums to " + format_double(sum)});
  }

  if (!(mdp.discount > 0.0 && mdp.discount < 1.0))
    out.push_back({"discount", "", "must lie strictly inside (0, 1)"});
  if (!(mdp.reward_noise_halfwidth >= 0.0) || !std::isfinite(mdp.reward_noise_halfwidth))
    out.push_back({"reward_noise_halfwidth", "", "must be finite and nonnegative"});

  if (!mdp.reward.allFinite()) {
    out.push_back({"reward", "", "non-finite entry"});
  } else if (mdp.reward_bound > 0.0) {
    for (int s = 0; s < n; ++s) {
      for (int a = 0; a < na; ++a) {
        if (std::abs(mdp.reward(s, a)) + mdp.reward_noise_halfwidth >
            mdp.reward_bound + kProbTol) {
          out.push_back({"reward", pair_label(s, a),
                         "|reward| + noise halfwidth exceeds declared bound " +
                             format_double(mdp.reward_bound)});
        }
      }
    }
  }
  return out;
}

Eigen::MatrixXd artificial_kernel(const FiniteMdp& mdp) {
  Eigen::MatrixXd out = mdp.discount * mdp.kernel;
  out.rowwise() += (1.0 - mdp.discount) * mdp.init_dist.transpose();
  return out;
}

ChainState start_chain(const FiniteMdp& mdp, std::uint64_t seed) {
  ChainState chain(seed);
  chain.state = sample_categorical(chain.rng, mdp.init_dist);
  return chain;
}

EnvStep sample_env_step(const FiniteMdp& mdp, ChainState& chain, int action) {
  if (action < 0 || action >= mdp.n_actions)
    throw std::out_of_range("sample_env_step: action " + std::to_string(action) +
                            " out of range (n_actions = " + std::to_string(mdp.n_actions) + ")");
  if (chain.state < 0 || chain.state >= mdp.n_states)
    throw std::out_of_range("sample_env_step: chain state out of range");

  EnvStep step;
  step.prev_state = chain.state;
  step.next_state = sample_categorical(chain.rng, mdp.kernel_row(chain.state, action));
  const double w = mdp.reward_noise_halfwidth;
  const double noise = chain.rng.next_uniform(-w, w);  // consumed even when w == 0
  step.reward = mdp.reward(chain.state, action) + noise;
  const int restart = sample_categorical(chain.rng, mdp.init_dist);
  step.continued = chain.rng.next_bernoulli(mdp.discount);
  chain.state = step.continued ? step.next_state : restart;
  chain.step += 1;
  return step;
}

FiniteMdp make_garnet(int n_states, int n_actions, int branching, double discount,
                      std::uint64_t seed, double reward_noise_halfwidth) {
  if (n_states <= 0 || n_actions <= 0)
    throw std::invalid_argument("make_garnet: counts must be positive");
  if (branching <= 0 || branching > n_states)
    throw std::invalid_argument("make_garnet: branching must lie in [1, n_states]");

  CounterRng rng(seed);
  FiniteMdp mdp;
  mdp.n_states = n_states;
  mdp.n_actions = n_actions;
  mdp.discount = discount;
  mdp.reward_noise_halfwidth = reward_noise_halfwidth;
  mdp.kernel = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n_states) * n_actions, n_states);
  mdp.reward = Eigen::MatrixXd::Zero(n_states, n_actions);
  mdp.init_dist = Eigen::VectorXd::Constant(n_states, 1.0 / n_states);

  std::vector<int> successors(n_states);
  for (int s = 0; s < n_states; ++s) {
    for (int a = 0; a < n_actions; ++a) {
      // branching distinct successors by partial Fisher-Yates
      for (int i = 0; i < n_states; ++i) successors[i] = i;
      for (int i = 0; i < branching; ++i) {
        const int j = i + static_cast<int>(rng.next_u64() % (n_states - i));
        std::swap(successors[i], successors[j]);
      }
      // flat Dirichlet via normalized exponential draws
      Eigen::VectorXd w(branching);
      for (int i = 0; i < branching; ++i) {
        double u = rng.next_unit();
        if (u <= 0.0) u = 0x1.0p-53;
        w(i) = -std::log(u);
      }
      w /= w.sum();
      for (int i = 0; i < branching; ++i)
        mdp.kernel(mdp.pair_index(s, a), successors[i]) = w(i);

      mdp.reward(s, a) = rng.next_unit();
    }
  }
  mdp.reward_bound = mdp.implied_reward_bound();
  return mdp;
}

namespace {
const std::vector<std::string> kMdpKeys = {
    "schema",   "n_states", "n_actions",              "discount",
    "init_dist", "kernel",  "reward", "reward_noise_halfwidth", "reward_bound"};
}

FiniteMdp mdp_from_doc(const TextDoc& doc) {
  if (doc.get_string_or("schema", "") != kMdpSchema)
    throw std::runtime_error("mdp file: expected schema \"" + std::string(kMdpSchema) + "\"");
  const auto unknown = doc.unknown_keys(kMdpKeys);
  if (!unknown.empty())
    throw std::runtime_error("mdp file: unknown key '" + unknown.front() + "'");

  FiniteMdp mdp;
  mdp.n_states = static_cast<int>(doc.get_integer("n_states"));
  mdp.n_actions = static_cast<int>(doc.get_integer("n_actions"));
  mdp.discount = doc.get_number("discount");
  mdp.reward_noise_halfwidth = doc.get_number_or("reward_noise_halfwidth", 0.0);
  if (mdp.n_states <= 0 || mdp.n_actions <= 0)
    throw std::runtime_error("mdp file: state/action counts must be positive");

  const int n = mdp.n_states;
  const int na = mdp.n_actions;

  const auto& rho = doc.get_list("init_dist");
  if (static_cast<int>(rho.size()) != n)
    throw std::runtime_error("mdp file: init_dist must have n_states entries");
  mdp.init_dist = Eigen::Map<const Eigen::VectorXd>(rho.data(), n);

  const auto& kernel = doc.get_list("kernel");
  if (static_cast<int>(kernel.size()) != n * na * n)
    throw std::runtime_error("mdp file: kernel must have n_states*n_actions*n_states entries");
  mdp.kernel = Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic,
                                              Eigen::RowMajor>>(kernel.data(), n * na, n);

  const auto& reward = doc.get_list("reward");
  if (static_cast<int>(reward.size()) != n * na)
    throw std::runtime_error("mdp file: reward must have n_states*n_actions entries");
  mdp.reward = Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic,
                                              Eigen::RowMajor>>(reward.data(), n, na);

  mdp.reward_bound = doc.get_number_or("reward_bound", mdp.implied_reward_bound());

  const auto violations = validate(mdp);
  if (!violations.empty())
    throw std::runtime_error("mdp file rejected: " + violations.front().to_string() +
                             (violations.size() > 1
                                  ? " (+" + std::to_string(violations.size() - 1) + " more)"
                                  : ""));
  return mdp;
}

TextDoc mdp_to_doc(const FiniteMdp& mdp) {
  TextDoc doc;
  doc.set_string("schema", kMdpSchema);
  doc.set_integer("n_states", mdp.n_states);
  doc.set_integer("n_actions", mdp.n_actions);
  doc.set_number("discount", mdp.discount);
  doc.set_number("reward_noise_halfwidth", mdp.reward_noise_halfwidth);
  doc.set_number("reward_bound", mdp.reward_bound);
  doc.set_list("init_dist", {mdp.init_dist.data(), mdp.init_dist.data() + mdp.init_dist.size()});

  std::vector<double> kernel;
  kernel.reserve(mdp.kernel.size());
  for (Eigen::Index r = 0; r < mdp.kernel.rows(); ++r)
    for (Eigen::Index c = 0; c < mdp.kernel.cols(); ++c) kernel.push_back(mdp.kernel(r, c));
  doc.set_list("kernel", kernel);

  std::vector<double> reward;
  reward.reserve(mdp.reward.size());
  for (int s = 0; s < mdp.n_states; ++s)
    for (int a = 0; a < mdp.n_actions; ++a) reward.push_back(mdp.reward(s, a));
  doc.set_list("reward", reward);
  return doc;
}

FiniteMdp load_mdp(const std::string& path) { return mdp_from_doc(TextDoc::load(path)); }

void save_mdp(const FiniteMdp& mdp, const std::string& path) { mdp_to_doc(mdp).save(path); }

}  // namespace aclab
