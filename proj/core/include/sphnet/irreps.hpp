#pragma once

#include <cstddef>
#include <vector>

#include "sphnet/errors.hpp"

namespace sphnet {

// A single irreducible representation of SO(3), identified by its rotation
// order l. Features of order l live in a (2l+1)-dimensional slice indexed by
// m in [-l, l].
struct Irrep {
  int l = 0;
  int dim() const { return 2 * l + 1; }
};

struct IrrepsEntry {
  int mul = 0;  // channel multiplicity
  int l = 0;    // rotation order
};

// Ordered, contiguous layout of irrep slices with multiplicities.
// Storage convention for a flat value array: entries in order, within an
// entry channel-major, within a channel the m index runs -l..l.
class IrrepsLayout {
 public:
  IrrepsLayout() = default;
  explicit IrrepsLayout(std::vector<IrrepsEntry> entries);

  // Common case: `channels` copies of every order 0..lmax.
  static IrrepsLayout uniform(int channels, int lmax);

  int num_entries() const { return static_cast<int>(entries_.size()); }
  const IrrepsEntry& entry(int e) const { return entries_[static_cast<size_t>(e)]; }
  const std::vector<IrrepsEntry>& entries() const { return entries_; }

  int offset(int e) const { return offsets_[static_cast<size_t>(e)]; }
  int total_dim() const { return total_dim_; }
  int lmax() const;

  // Flat index of (entry, channel, m).
  int index(int e, int channel, int m) const {
    const IrrepsEntry& en = entries_[static_cast<size_t>(e)];
    return offset(e) + channel * (2 * en.l + 1) + (en.l + m);
  }

  // First entry with the given order, or -1.
  int find_l(int l) const;

  bool operator==(const IrrepsLayout& o) const;
  bool operator!=(const IrrepsLayout& o) const { return !(*this == o); }

 private:
  std::vector<IrrepsEntry> entries_;
  std::vector<int> offsets_;
  int total_dim_ = 0;
};

// Typed flat storage of equivariant features (single batch entry).
struct EquivariantVector {
  IrrepsLayout layout;
  std::vector<double> values;

  EquivariantVector() = default;
  explicit EquivariantVector(IrrepsLayout lay)
      : layout(std::move(lay)), values(static_cast<size_t>(layout.total_dim()), 0.0) {}
  EquivariantVector(IrrepsLayout lay, std::vector<double> vals);

  double& at(int e, int c, int m) { return values[static_cast<size_t>(layout.index(e, c, m))]; }
  double at(int e, int c, int m) const {
    return values[static_cast<size_t>(layout.index(e, c, m))];
  }
};

}  // namespace sphnet
