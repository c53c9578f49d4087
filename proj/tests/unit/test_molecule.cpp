#include <cmath>

#include "doctest.h"
#include "sphnet/molecule.hpp"

using namespace sphnet;

TEST_CASE("distances, directions and neighbor pairs") {
  MoleculeGraph mol({1, 6, 8}, {{0, 0, 0}, {1.5, 0, 0}, {1.5, 2.0, 0}}, 2.5);
  CHECK(mol.natoms() == 3);
  CHECK(mol.distance(0, 1) == doctest::Approx(1.5).epsilon(1e-15));
  CHECK(mol.distance(1, 2) == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(mol.distance(0, 2) == doctest::Approx(2.5).epsilon(1e-15));
  CHECK(mol.distance(2, 0) == mol.distance(0, 2));
  CHECK(mol.distance(1, 1) == 0.0);

  const auto d = mol.direction(0, 1);
  CHECK(d[0] == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(d[1] == 0.0);
  CHECK(d[2] == 0.0);
  const auto dr = mol.direction(1, 0);
  CHECK(dr[0] == doctest::Approx(-1.0).epsilon(1e-15));

  // pair (0,2) sits exactly at the cutoff and is excluded
  REQUIRE(mol.neighbor_pairs().size() == 2);
  CHECK(mol.neighbor_pairs()[0] == std::pair<int, int>{0, 1});
  CHECK(mol.neighbor_pairs()[1] == std::pair<int, int>{1, 2});
  CHECK(mol.neighbors(1) == std::vector<int>{0, 2});
  CHECK(mol.neighbors(0) == std::vector<int>{1});
}

TEST_CASE("basis union layout and per-element extraction") {
  const BasisSpec basis = BasisSpec::toy_svp();
  CHECK(basis.max_l() == 2);
  CHECK(basis.union_layout().total_dim() == 14);  // 3*1 + 2*3 + 1*5

  CHECK(basis.supports(1));
  CHECK(basis.supports(6));
  CHECK(basis.supports(7));
  CHECK(basis.supports(8));
  CHECK_FALSE(basis.supports(2));

  CHECK(basis.orbitals(1) == std::vector<int>{0, 0, 1});
  CHECK(basis.orbitals(6) == std::vector<int>{0, 0, 0, 1, 1, 2});
  CHECK(basis.atom_dim(1) == 5);
  CHECK(basis.atom_dim(8) == 14);

  // H picks the first two s orbitals and the first p from the union block
  CHECK(basis.extraction(1) == std::vector<int>{0, 1, 3, 4, 5});
  REQUIRE(basis.extraction(6).size() == 14);
  for (int i = 0; i < 14; ++i) CHECK(basis.extraction(6)[static_cast<size_t>(i)] == i);

  const IrrepsLayout hlay = basis.atom_layout(1);
  CHECK(hlay.total_dim() == 5);

  MoleculeGraph mol({8, 1, 1}, {{0, 0, 0}, {0.96, 0, 0}, {-0.24, 0.93, 0}}, 5.0);
  CHECK(basis.total_dim(mol) == 14 + 5 + 5);
  CHECK(basis.atom_offsets(mol) == std::vector<int>{0, 14, 19});
}
