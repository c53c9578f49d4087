#include <cmath>
#include <numeric>
#include <set>

#include "doctest.h"
#include "sphnet/errors.hpp"
#include "sphnet/paths.hpp"
#include "sphnet/scheduler.hpp"

using namespace sphnet;

TEST_CASE("target counts for the reference configurations") {
  CHECK(enumerate_paths(6).size() == 175);
  CHECK(enumerate_paths(4).size() == 65);
  CHECK(SparsityScheduler(175, 0.7, 3, 1).target_count() == 53);
  CHECK(SparsityScheduler(65, 0.4, 3, 1).target_count() == 39);
}

TEST_CASE("phase boundaries") {
  SparsityScheduler s(10, 0.5, 3, 7);
  CHECK(s.phase(0) == SparsityPhase::random_select);
  CHECK(s.phase(2) == SparsityPhase::random_select);
  CHECK(s.phase(3) == SparsityPhase::adaptive);
  CHECK(s.phase(4) == SparsityPhase::fixed);
}

TEST_CASE("random phase keep frequency is close to 1 - k") {
  const int universe = 100;
  const double k = 0.7;
  SparsityScheduler s(universe, k, 5, 42);
  const std::vector<double> scores(universe, 1.0);
  long kept = 0;
  const int trials = 100;  // 100 * 100 = 1e4 Bernoulli draws
  for (int i = 0; i < trials; ++i) kept += static_cast<long>(s.select(0, scores).size());
  const double freq = static_cast<double>(kept) / (trials * universe);
  CHECK(std::abs(freq - (1.0 - k)) < 0.02);
  CHECK(s.counter() == static_cast<std::uint64_t>(trials * universe));
}

TEST_CASE("random phase is reproducible from the counter") {
  SparsityScheduler a(20, 0.5, 5, 9), b(20, 0.5, 5, 9);
  const std::vector<double> scores(20, 1.0);
  const auto s1 = a.select(1, scores);
  const auto s2 = a.select(1, scores);
  b.set_counter(20);
  CHECK(b.select(1, scores) == s2);
  CHECK(s1 != s2);  // distinct draws with overwhelming probability
}

TEST_CASE("adaptive phase picks the top scores, ties by ascending index") {
  SparsityScheduler s(6, 0.5, 2, 1);
  CHECK(s.target_count() == 3);
  const auto sel = s.select(2, {0.1, 0.9, 0.5, 0.9, 0.05, 0.5});
  CHECK(sel == std::vector<int>{1, 2, 3});  // 0.9@1, 0.9@3, first 0.5@2
}

TEST_CASE("fixed phase returns the frozen snapshot and is stable") {
  SparsityScheduler s(6, 0.5, 2, 1);
  CHECK_THROWS_AS(s.select(3, {1, 2, 3, 4, 5, 6}), contract_error);
  s.freeze({0.1, 0.9, 0.5, 0.9, 0.05, 0.5});
  const auto frozen = s.select(3, {9, 9, 9, 0, 0, 0});  // scores must be ignored
  CHECK(frozen == std::vector<int>{1, 2, 3});
  for (int i = 0; i < 100; ++i) CHECK(s.select(4 + i, {}) == frozen);
}

TEST_CASE("hash_to_unit lands in [0,1) and uniform_init respects the scale") {
  for (std::uint64_t i = 0; i < 1000; ++i) {
    const double u = hash_to_unit(splitmix64(i));
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
  }
  const auto v = uniform_init(3, 500, 0.25);
  REQUIRE(v.size() == 500);
  double mn = 1.0, mx = -1.0;
  for (double x : v) {
    mn = std::min(mn, x);
    mx = std::max(mx, x);
    CHECK(std::abs(x) <= 0.25);
  }
  CHECK(mn < -0.2);  // spans most of the interval
  CHECK(mx > 0.2);
  CHECK(uniform_init(3, 500, 0.25) == v);  // deterministic
}

TEST_CASE("top_indices handles edge counts") {
  CHECK(top_indices({3.0, 1.0, 2.0}, 0).empty());
  CHECK(top_indices({3.0, 1.0, 2.0}, 3) == std::vector<int>{0, 1, 2});
  CHECK(top_indices({3.0, 1.0, 2.0}, 2) == std::vector<int>{0, 2});
}
