#pragma once

#include <array>
#include <string>
#include <utility>
#include <vector>

#include "sphnet/irreps.hpp"

namespace sphnet {

// Atomic structure plus derived pair geometry. Distances in Angstrom.
class MoleculeGraph {
 public:
  MoleculeGraph() = default;
  MoleculeGraph(std::vector<int> atomic_numbers,
                std::vector<std::array<double, 3>> positions, double cutoff);

  int natoms() const { return static_cast<int>(z_.size()); }
  int z(int i) const { return z_[static_cast<size_t>(i)]; }
  const std::vector<int>& atomic_numbers() const { return z_; }
  const std::array<double, 3>& position(int i) const { return pos_[static_cast<size_t>(i)]; }
  double cutoff() const { return cutoff_; }

  double distance(int i, int j) const { return dist_[static_cast<size_t>(i * natoms() + j)]; }
  // Unit vector from atom i to atom j.
  std::array<double, 3> direction(int i, int j) const;

  // Unordered pairs (i < j) within the cutoff radius.
  const std::vector<std::pair<int, int>>& neighbor_pairs() const { return pairs_; }
  // Neighbors of atom i within the cutoff radius.
  const std::vector<int>& neighbors(int i) const { return nbrs_[static_cast<size_t>(i)]; }

 private:
  std::vector<int> z_;
  std::vector<std::array<double, 3>> pos_;
  double cutoff_ = 0.0;
  std::vector<double> dist_;
  std::vector<std::pair<int, int>> pairs_;
  std::vector<std::vector<int>> nbrs_;
};

// Per-element orbital sets defining Hamiltonian block shapes. The union
// layout holds, per order l, the maximum orbital count over all elements;
// element blocks are extracted from full-orbital intermediate blocks through
// per-element index maps into that layout.
class BasisSpec {
 public:
  BasisSpec() = default;

  // H: two s orbitals and one p; C/N/O: three s, two p, one d. Union layout
  // 3x(l=0) + 2x(l=1) + 1x(l=2), dimension 14.
  static BasisSpec toy_svp();

  const std::string& name() const { return name_; }
  // Ordered orbital orders for the element (sorted ascending by l).
  const std::vector<int>& orbitals(int z) const;
  // Layout over the element's own orbitals (one entry of mul 1 per orbital).
  IrrepsLayout atom_layout(int z) const;
  int atom_dim(int z) const;
  // Flat indices into the union layout selecting the element's orbitals.
  const std::vector<int>& extraction(int z) const;
  const IrrepsLayout& union_layout() const { return union_layout_; }
  // Highest orbital order over all elements.
  int max_l() const { return max_l_; }
  bool supports(int z) const;

  // Total orbital dimension of the molecule (sum of atom_dim over atoms).
  int total_dim(const MoleculeGraph& mol) const;
  // Flat offset of atom i's orbital block in the assembled matrix.
  std::vector<int> atom_offsets(const MoleculeGraph& mol) const;

 private:
  std::string name_;
  std::vector<std::pair<int, std::vector<int>>> element_orbitals_;  // (Z, orders)
  std::vector<std::pair<int, std::vector<int>>> element_extraction_;
  IrrepsLayout union_layout_;
  int max_l_ = 0;
};

}  // namespace sphnet
