#include "doctest.h"
#include "sphnet/irreps.hpp"

using namespace sphnet;

TEST_CASE("uniform layout dimensions") {
  const IrrepsLayout lay = IrrepsLayout::uniform(8, 4);
  CHECK(lay.num_entries() == 5);
  // 8 channels of each order 0..4: 8 * (1+3+5+7+9) = 200.
  CHECK(lay.total_dim() == 200);
  CHECK(lay.lmax() == 4);
  for (int e = 0; e < 5; ++e) {
    CHECK(lay.entry(e).l == e);
    CHECK(lay.entry(e).mul == 8);
  }
}

TEST_CASE("flat index is channel-major with m ascending") {
  const IrrepsLayout lay = IrrepsLayout::uniform(2, 2);
  // offsets: l=0 at 0 (2 dims), l=1 at 2 (6 dims), l=2 at 8 (10 dims)
  CHECK(lay.offset(0) == 0);
  CHECK(lay.offset(1) == 2);
  CHECK(lay.offset(2) == 8);
  CHECK(lay.index(1, 0, -1) == 2);
  CHECK(lay.index(1, 0, 1) == 4);
  CHECK(lay.index(1, 1, -1) == 5);
  CHECK(lay.index(2, 1, 2) == 17);
}

TEST_CASE("find_l and equality") {
  const IrrepsLayout a({{3, 0}, {2, 1}, {1, 2}});
  CHECK(a.total_dim() == 14);
  CHECK(a.find_l(1) == 1);
  CHECK(a.find_l(3) == -1);
  CHECK(a == IrrepsLayout({{3, 0}, {2, 1}, {1, 2}}));
  CHECK(a != IrrepsLayout::uniform(2, 2));
}

TEST_CASE("EquivariantVector accessors") {
  EquivariantVector v(IrrepsLayout::uniform(2, 1));
  CHECK(v.values.size() == 8);
  v.at(1, 1, 0) = 3.5;
  CHECK(v.values[6] == 3.5);
}
