#pragma once

#include <cstdint>
#include <vector>

namespace sphnet {

// Selection law phases: random keep/drop before the switch epoch, score-driven
// top-k during it, a frozen snapshot of that selection afterwards.
enum class SparsityPhase { random_select, adaptive, fixed };

// Counter-based hash RNG step (splitmix64 finalizer). Stateless: the caller
// owns the counter, which makes draws reproducible and checkpointable.
std::uint64_t splitmix64(std::uint64_t x);

// Uniform double in [0, 1) from a hash word.
double hash_to_unit(std::uint64_t h);

// Deterministic parameter fill: n uniform draws in (-scale, scale).
std::vector<double> uniform_init(std::uint64_t seed, int n, double scale);

// Indices of the `count` largest scores, ties broken by ascending index.
// Result is sorted ascending.
std::vector<int> top_indices(const std::vector<double>& scores, int count);

// Three-phase selection scheduler over a fixed universe of |U| candidates.
//   epoch <  t : each index kept independently with probability (1 - k)
//   epoch == t : top ceil((1 - k) |U|) indices by score
//   epoch >  t : the set frozen at the end of the adaptive epoch
class SparsityScheduler {
 public:
  SparsityScheduler() = default;
  SparsityScheduler(int universe, double rate, int switch_epoch, std::uint64_t seed);

  SparsityPhase phase(int epoch) const;
  int target_count() const;  // ceil((1 - k) |U|)

  // Returns the selected index set (sorted ascending). Random-phase calls
  // advance the RNG counter; fixed-phase calls require a prior freeze().
  std::vector<int> select(int epoch, const std::vector<double>& scores);

  // Snapshots the selection from `scores`; call after the final optimizer
  // step of the adaptive epoch.
  void freeze(const std::vector<double>& scores);
  bool has_frozen() const { return frozen_valid_; }
  const std::vector<int>& frozen_set() const;

  int universe() const { return universe_; }
  double rate() const { return rate_; }
  int switch_epoch() const { return switch_epoch_; }

  // Checkpoint access.
  std::uint64_t counter() const { return counter_; }
  void set_counter(std::uint64_t c) { counter_ = c; }
  void restore_frozen(std::vector<int> set);

 private:
  int universe_ = 0;
  double rate_ = 0.0;
  int switch_epoch_ = 1;
  std::uint64_t seed_ = 0;
  std::uint64_t counter_ = 0;
  bool frozen_valid_ = false;
  std::vector<int> frozen_;
};

}  // namespace sphnet
