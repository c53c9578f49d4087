#include "sphnet/molecule.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "sphnet/errors.hpp"

namespace sphnet {

MoleculeGraph::MoleculeGraph(std::vector<int> atomic_numbers,
                             std::vector<std::array<double, 3>> positions, double cutoff)
    : z_(std::move(atomic_numbers)), pos_(std::move(positions)), cutoff_(cutoff) {
  if (z_.size() != pos_.size())
    throw config_error("molecule: atomic number / position count mismatch");
  if (cutoff_ <= 0.0) throw config_error("molecule: cutoff must be positive");
  for (int z : z_)
    if (z <= 0) throw config_error("molecule: atomic numbers must be positive");

  const int n = natoms();
  dist_.assign(static_cast<size_t>(n) * n, 0.0);
  nbrs_.assign(static_cast<size_t>(n), {});
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      double d2 = 0.0;
      for (int a = 0; a < 3; ++a) {
        const double d = pos_[static_cast<size_t>(j)][static_cast<size_t>(a)] -
                         pos_[static_cast<size_t>(i)][static_cast<size_t>(a)];
        d2 += d * d;
      }
      const double d = std::sqrt(d2);
      dist_[static_cast<size_t>(i * n + j)] = d;
      dist_[static_cast<size_t>(j * n + i)] = d;
      if (d < cutoff_) {
        pairs_.emplace_back(i, j);
        nbrs_[static_cast<size_t>(i)].push_back(j);
        nbrs_[static_cast<size_t>(j)].push_back(i);
      }
    }
}

std::array<double, 3> MoleculeGraph::direction(int i, int j) const {
  const double d = distance(i, j);
  if (d <= 0.0) throw contract_error("molecule: direction of coincident atoms");
  std::array<double, 3> u{};
  for (int a = 0; a < 3; ++a)
    u[static_cast<size_t>(a)] = (pos_[static_cast<size_t>(j)][static_cast<size_t>(a)] -
                                 pos_[static_cast<size_t>(i)][static_cast<size_t>(a)]) /
                                d;
  return u;
}

namespace {

// Extraction indices of an element's orbitals inside the union layout:
// for each order l, the element's first `count` channels of that order.
std::vector<int> extraction_indices(const IrrepsLayout& uni, const std::vector<int>& orbitals) {
  std::map<int, int> used;  // l -> channels consumed so far
  std::vector<int> idx;
  for (int l : orbitals) {
    const int e = uni.find_l(l);
    if (e < 0) throw config_error("basis: orbital order missing from union layout");
    const int c = used[l]++;
    if (c >= uni.entry(e).mul) throw config_error("basis: orbital count exceeds union layout");
    for (int m = -l; m <= l; ++m) idx.push_back(uni.index(e, c, m));
  }
  return idx;
}

}  // namespace

BasisSpec BasisSpec::toy_svp() {
  BasisSpec b;
  b.name_ = "toy-svp";
  b.union_layout_ = IrrepsLayout({{3, 0}, {2, 1}, {1, 2}});
  b.max_l_ = 2;
  const std::vector<int> h_orb{0, 0, 1};
  const std::vector<int> heavy_orb{0, 0, 0, 1, 1, 2};
  b.element_orbitals_ = {{1, h_orb}, {6, heavy_orb}, {7, heavy_orb}, {8, heavy_orb}};
  for (const auto& [z, orb] : b.element_orbitals_)
    b.element_extraction_.emplace_back(z, extraction_indices(b.union_layout_, orb));
  return b;
}

const std::vector<int>& BasisSpec::orbitals(int z) const {
  for (const auto& [zz, orb] : element_orbitals_)
    if (zz == z) return orb;
  throw config_error("basis: unsupported element Z=" + std::to_string(z));
}

IrrepsLayout BasisSpec::atom_layout(int z) const {
  std::vector<IrrepsEntry> entries;
  for (int l : orbitals(z)) entries.push_back({1, l});
  return IrrepsLayout(std::move(entries));
}

int BasisSpec::atom_dim(int z) const {
  int d = 0;
  for (int l : orbitals(z)) d += 2 * l + 1;
  return d;
}

const std::vector<int>& BasisSpec::extraction(int z) const {
  for (const auto& [zz, idx] : element_extraction_)
    if (zz == z) return idx;
  throw config_error("basis: unsupported element Z=" + std::to_string(z));
}

bool BasisSpec::supports(int z) const {
  return std::any_of(element_orbitals_.begin(), element_orbitals_.end(),
                     [z](const auto& p) { return p.first == z; });
}

int BasisSpec::total_dim(const MoleculeGraph& mol) const {
  int d = 0;
  for (int z : mol.atomic_numbers()) d += atom_dim(z);
  return d;
}

std::vector<int> BasisSpec::atom_offsets(const MoleculeGraph& mol) const {
  std::vector<int> off(static_cast<size_t>(mol.natoms()), 0);
  int acc = 0;
  for (int i = 0; i < mol.natoms(); ++i) {
    off[static_cast<size_t>(i)] = acc;
    acc += atom_dim(mol.z(i));
  }
  return off;
}

}  // namespace sphnet
