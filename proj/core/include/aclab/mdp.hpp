#ifndef ACLAB_MDP_HPP
#define ACLAB_MDP_HPP

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "aclab/rng.hpp"
#include "aclab/textdoc.hpp"

namespace aclab {

// Finite MDP with a bounded, optionally noisy reward. The transition kernel
// is stored dense, one row per (state, action) pair in row-major order:
// kernel.row(s * n_actions + a) is the distribution of the next state.
struct FiniteMdp {
  int n_states = 0;
  int n_actions = 0;
  Eigen::MatrixXd kernel;       // (n_states * n_actions) x n_states
  Eigen::MatrixXd reward;       // n_states x n_actions
  double reward_noise_halfwidth = 0.0;
  double discount = 0.0;
  Eigen::VectorXd init_dist;    // length n_states
  double reward_bound = 0.0;    // declared bound on |reward| + noise halfwidth

  int pair_index(int s, int a) const { return s * n_actions + a; }
  auto kernel_row(int s, int a) const { return kernel.row(pair_index(s, a)); }

  // Tightest bound consistent with the stored rewards and noise width.
  double implied_reward_bound() const;
};

struct Violation {
  std::string field;    // which FiniteMdp field
  std::string index;    // offending index, empty when global
  std::string message;
  std::string to_string() const;
};

// Empty result iff all invariants hold: kernel rows and init_dist are
// probability vectors (sum 1 within 1e-12, no negative entries), discount in
// (0,1), noise halfwidth nonnegative, |reward| + halfwidth within the
// declared bound, and finite entries throughout.
std::vector<Violation> validate(const FiniteMdp& mdp);

// discount * p(.|s,a) + (1 - discount) * init_dist, same row layout as the
// kernel. Mixing every transition with a restart draw is what makes the
// chain's stationary law equal the discounted occupancy measure.
Eigen::MatrixXd artificial_kernel(const FiniteMdp& mdp);

// Live sampling cursor: the state the learner currently acts from, its rng
// stream, and the step counter.
struct ChainState {
  int state = 0;
  CounterRng rng;
  std::int64_t step = 0;

  ChainState(int s, std::uint64_t seed) : state(s), rng(seed) {}
  explicit ChainState(std::uint64_t seed) : rng(seed) {}
};

// Draws the initial cursor state from init_dist.
ChainState start_chain(const FiniteMdp& mdp, std::uint64_t seed);

struct EnvStep {
  int prev_state = 0;   // cursor state the action was taken from
  int next_state = 0;   // true transition target
  double reward = 0.0;
  bool continued = false;  // true when the cursor followed the transition,
                           // false when it restarted from init_dist
};

// One environment interaction from the cursor state. Draw order is fixed and
// part of the determinism contract: next state, reward noise (consumed even
// at zero halfwidth), restart state, continuation coin. The cursor moves to
// the true next state with probability `discount`, otherwise to the restart
// draw; the step counter advances.
EnvStep sample_env_step(const FiniteMdp& mdp, ChainState& chain, int action);

// Random instance family for desk-scale experiments: every (s,a) gets
// `branching` distinct successors with flat-Dirichlet weights, rewards are
// uniform in [0,1], and the initial distribution is uniform.
FiniteMdp make_garnet(int n_states, int n_actions, int branching, double discount,
                      std::uint64_t seed, double reward_noise_halfwidth = 0.0);

// File format (schema "aclab-mdp/1"): n_states, n_actions, discount,
// init_dist, kernel (dense, row-major over (s,a) pairs), reward (row-major
// over states), reward_noise_halfwidth, optional reward_bound. Loading
// rejects documents that fail validate().
FiniteMdp mdp_from_doc(const TextDoc& doc);
TextDoc mdp_to_doc(const FiniteMdp& mdp);
FiniteMdp load_mdp(const std::string& path);
void save_mdp(const FiniteMdp& mdp, const std::string& path);

inline constexpr const char* kMdpSchema = "aclab-mdp/1";

}  // namespace aclab

#endif
