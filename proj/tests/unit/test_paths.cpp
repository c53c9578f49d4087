#include "doctest.h"
#include "sphnet/paths.hpp"

using namespace sphnet;

TEST_CASE("path counts at the documented orders") {
  CHECK(enumerate_paths(4).size() == 65);
  CHECK(enumerate_paths(6).size() == 175);
  CHECK(enumerate_paths(0).size() == 1);
  CHECK(enumerate_paths(1).size() == 5);
}

TEST_CASE("every path satisfies the triangle rule and the list is sorted") {
  const auto paths = enumerate_paths(5);
  for (size_t i = 0; i < paths.size(); ++i) {
    const auto& [l1, l2, l3] = paths[i];
    CHECK(l3 >= std::abs(l1 - l2));
    CHECK(l3 <= l1 + l2);
    CHECK(l1 <= 5);
    CHECK(l2 <= 5);
    CHECK(l3 <= 5);
    if (i > 0) CHECK(paths[i - 1] < paths[i]);
  }
}

TEST_CASE("L=1 paths are exactly the four valid couplings plus (1,1,1)") {
  const auto paths = enumerate_paths(1);
  const std::vector<PathTriple> expect = {
      {0, 0, 0}, {0, 1, 1}, {1, 0, 1}, {1, 1, 0}, {1, 1, 1}, {1, 1, 2}};
  // (1,1,2) exceeds L=1, so only five triples remain.
  CHECK(paths.size() == 5);
  for (size_t i = 0; i < paths.size(); ++i) CHECK(paths[i] == expect[i]);
}
