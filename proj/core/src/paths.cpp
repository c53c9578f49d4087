#include "sphnet/paths.hpp"

#include <cstdlib>

namespace sphnet {

std::vector<PathTriple> enumerate_paths(int L) {
  std::vector<PathTriple> out;
  for (int l1 = 0; l1 <= L; ++l1)
    for (int l2 = 0; l2 <= L; ++l2)
      for (int l3 = std::abs(l1 - l2); l3 <= l1 + l2 && l3 <= L; ++l3)
        out.push_back({l1, l2, l3});
  return out;
}

}  // namespace sphnet
