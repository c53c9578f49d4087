#include "sphnet/scheduler.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "sphnet/errors.hpp"

namespace sphnet {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

double hash_to_unit(std::uint64_t h) {
  return static_cast<double>(h >> 11) * 0x1.0p-53;
}

std::vector<double> uniform_init(std::uint64_t seed, int n, double scale) {
  std::vector<double> v(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i)
    v[static_cast<size_t>(i)] =
        scale * (2.0 * hash_to_unit(splitmix64(seed + static_cast<std::uint64_t>(i))) - 1.0);
  return v;
}

std::vector<int> top_indices(const std::vector<double>& scores, int count) {
  if (count < 0 || count > static_cast<int>(scores.size()))
    throw contract_error("top_indices: count out of range");
  std::vector<int> order(scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    if (scores[static_cast<size_t>(a)] != scores[static_cast<size_t>(b)])
      return scores[static_cast<size_t>(a)] > scores[static_cast<size_t>(b)];
    return a < b;
  });
  order.resize(static_cast<size_t>(count));
  std::sort(order.begin(), order.end());
  return order;
}

SparsityScheduler::SparsityScheduler(int universe, double rate, int switch_epoch,
                                     std::uint64_t seed)
    : universe_(universe), rate_(rate), switch_epoch_(switch_epoch), seed_(seed) {
  if (universe <= 0) throw config_error("scheduler: universe must be positive");
  if (rate < 0.0 || rate >= 1.0) throw config_error("scheduler: rate must lie in [0, 1)");
  if (switch_epoch <= 0) throw config_error("scheduler: switch epoch must be positive");
}

SparsityPhase SparsityScheduler::phase(int epoch) const {
  if (epoch < switch_epoch_) return SparsityPhase::random_select;
  if (epoch == switch_epoch_) return SparsityPhase::adaptive;
  return SparsityPhase::fixed;
}

int SparsityScheduler::target_count() const {
  return static_cast<int>(std::ceil((1.0 - rate_) * universe_));
}

std::vector<int> SparsityScheduler::select(int epoch, const std::vector<double>& scores) {
  switch (phase(epoch)) {
    case SparsityPhase::random_select: {
      std::vector<int> keep;
      for (int i = 0; i < universe_; ++i) {
        const std::uint64_t h = splitmix64(seed_ ^ (counter_ + static_cast<std::uint64_t>(i)));
        if (hash_to_unit(h) < 1.0 - rate_) keep.push_back(i);
      }
      counter_ += static_cast<std::uint64_t>(universe_);
      return keep;
    }
    case SparsityPhase::adaptive: {
      if (static_cast<int>(scores.size()) != universe_)
        throw contract_error("scheduler: score vector size mismatch");
      return top_indices(scores, target_count());
    }
    case SparsityPhase::fixed:
      if (!frozen_valid_)
        throw contract_error("scheduler: fixed phase reached without a frozen selection");
      return frozen_;
  }
  throw contract_error("scheduler: unreachable phase");
}

void SparsityScheduler::freeze(const std::vector<double>& scores) {
  if (static_cast<int>(scores.size()) != universe_)
    throw contract_error("scheduler: score vector size mismatch");
  frozen_ = top_indices(scores, target_count());
  frozen_valid_ = true;
}

const std::vector<int>& SparsityScheduler::frozen_set() const {
  if (!frozen_valid_) throw contract_error("scheduler: no frozen selection");
  return frozen_;
}

void SparsityScheduler::restore_frozen(std::vector<int> set) {
  frozen_ = std::move(set);
  frozen_valid_ = true;
}

}  // namespace sphnet
