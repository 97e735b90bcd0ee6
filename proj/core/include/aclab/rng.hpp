#ifndef ACLAB_RNG_HPP
#define ACLAB_RNG_HPP

#include <cmath>
#include <cstdint>
#include <stdexcept>

#include <Eigen/Core>

namespace aclab {

// Counter-based 64-bit generator (SplitMix64): the state is a Weyl sequence
// and each output is a finalizer hash of it, so streams are reproducible
// bit-for-bit across platforms. Replicate k of a Monte-Carlo experiment uses
// seed + k.
class CounterRng {
 public:
  explicit CounterRng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    state_ += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // Uniform in [0, 1), 53-bit resolution.
  double next_unit() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double next_uniform(double lo, double hi) { return lo + (hi - lo) * next_unit(); }

  bool next_bernoulli(double p) { return next_unit() < p; }

  // Box-Muller; consumes exactly two draws, the spare is discarded so the
  // stream position stays a pure function of the call count.
  double next_gaussian() {
    double u1 = next_unit();
    double u2 = next_unit();
    // avoid log(0)
    if (u1 <= 0.0) u1 = 0x1.0p-53;
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925286766559 * u2);
  }

  std::uint64_t state() const { return state_; }
  void set_state(std::uint64_t s) { state_ = s; }

  bool operator==(const CounterRng&) const = default;

 private:
  std::uint64_t state_;
};

// Inverse-CDF draw over a probability row, accumulating left to right; the
// final bucket absorbs any rounding residue.
template <typename Derived>
int sample_categorical(CounterRng& rng, const Eigen::DenseBase<Derived>& probs) {
  const Eigen::Index n = probs.size();
  if (n <= 0) throw std::invalid_argument("sample_categorical: empty distribution");
  const double u = rng.next_unit();
  double acc = 0.0;
  for (Eigen::Index i = 0; i + 1 < n; ++i) {
    acc += probs(i);
    if (u < acc) return static_cast<int>(i);
  }
  return static_cast<int>(n - 1);
}

}  // namespace aclab

#endif
