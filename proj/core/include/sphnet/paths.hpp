#pragma once

#include <array>
#include <vector>

namespace sphnet {

using PathTriple = std::array<int, 3>;  // (l1, l2, l3)

// All cross-order combinations with l1,l2,l3 <= L satisfying the triangle
// rule, in lexicographic order.
std::vector<PathTriple> enumerate_paths(int L);

}  // namespace sphnet
