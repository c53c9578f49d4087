#include "sphnet/irreps.hpp"

#include <utility>

namespace sphnet {

IrrepsLayout::IrrepsLayout(std::vector<IrrepsEntry> entries) : entries_(std::move(entries)) {
  offsets_.reserve(entries_.size());
  int off = 0;
  for (const IrrepsEntry& e : entries_) {
    if (e.mul <= 0) throw config_error("IrrepsLayout: multiplicity must be positive");
    if (e.l < 0) throw config_error("IrrepsLayout: order must be non-negative");
    offsets_.push_back(off);
    off += e.mul * (2 * e.l + 1);
  }
  total_dim_ = off;
}

IrrepsLayout IrrepsLayout::uniform(int channels, int lmax) {
  std::vector<IrrepsEntry> es;
  es.reserve(static_cast<size_t>(lmax) + 1);
  for (int l = 0; l <= lmax; ++l) es.push_back({channels, l});
  return IrrepsLayout(std::move(es));
}

int IrrepsLayout::lmax() const {
  int m = 0;
  for (const IrrepsEntry& e : entries_) m = e.l > m ? e.l : m;
  return m;
}

int IrrepsLayout::find_l(int l) const {
  for (int e = 0; e < num_entries(); ++e)
    if (entries_[static_cast<size_t>(e)].l == l) return e;
  return -1;
}

bool IrrepsLayout::operator==(const IrrepsLayout& o) const {
  if (entries_.size() != o.entries_.size()) return false;
  for (size_t i = 0; i < entries_.size(); ++i)
    if (entries_[i].mul != o.entries_[i].mul || entries_[i].l != o.entries_[i].l) return false;
  return true;
}

EquivariantVector::EquivariantVector(IrrepsLayout lay, std::vector<double> vals)
    : layout(std::move(lay)), values(std::move(vals)) {
  if (static_cast<int>(values.size()) != layout.total_dim())
    throw contract_error("EquivariantVector: value count does not match layout");
}

}  // namespace sphnet
