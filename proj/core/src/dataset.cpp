#include "sphnet/dataset.hpp"

#include <cmath>
#include <random>

#include "sphnet/errors.hpp"
#include "sphnet/scheduler.hpp"

namespace sphnet {

namespace {

constexpr double kMinDistance = 0.8;  // Angstrom

bool distances_ok(const std::vector<std::array<double, 3>>& pos) {
  for (size_t i = 0; i < pos.size(); ++i)
    for (size_t j = i + 1; j < pos.size(); ++j) {
      double d2 = 0.0;
      for (int a = 0; a < 3; ++a) {
        const double d = pos[j][static_cast<size_t>(a)] - pos[i][static_cast<size_t>(a)];
        d2 += d * d;
      }
      if (d2 < kMinDistance * kMinDistance) return false;
    }
  return true;
}

}  // namespace

MoleculeGraph random_molecule(const BasisSpec& basis, std::uint64_t seed, int index,
                              int min_atoms, int max_atoms, double cutoff) {
  if (min_atoms < 1 || max_atoms < min_atoms)
    throw config_error("dataset: invalid atom count range");
  std::mt19937_64 rng(splitmix64(seed ^ (0x9e37ULL * (static_cast<std::uint64_t>(index) + 1))));
  std::uniform_int_distribution<int> n_dist(min_atoms, max_atoms);
  const std::vector<int> elements = {1, 6, 7, 8};
  std::uniform_int_distribution<size_t> elem_dist(0, elements.size() - 1);
  std::uniform_real_distribution<double> jitter(-0.3, 0.3);
  std::uniform_real_distribution<double> coin(0.0, 1.0);

  const int n = n_dist(rng);
  std::vector<int> z(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) z[static_cast<size_t>(i)] = elements[elem_dist(rng)];

  for (int attempt = 0; attempt < 1000; ++attempt) {
    std::vector<std::array<double, 3>> pos(static_cast<size_t>(n));
    const bool ring = n >= 3 && coin(rng) < 0.5;
    const double spacing = 1.4;
    if (ring) {
      const double radius = spacing * n / (2.0 * M_PI);
      for (int i = 0; i < n; ++i) {
        const double phi = 2.0 * M_PI * i / n;
        pos[static_cast<size_t>(i)] = {radius * std::cos(phi) + jitter(rng),
                                       radius * std::sin(phi) + jitter(rng), jitter(rng)};
      }
    } else {
      for (int i = 0; i < n; ++i)
        pos[static_cast<size_t>(i)] = {spacing * i + jitter(rng), jitter(rng), jitter(rng)};
    }
    if (!distances_ok(pos)) continue;
    for (int zz : z)
      if (!basis.supports(zz)) throw config_error("dataset: element outside basis");
    return MoleculeGraph(std::move(z), std::move(pos), cutoff);
  }
  throw numeric_error("dataset: geometry rejected after 1000 retries");
}

Dataset generate_teacher_dataset(const ModelConfig& cfg, std::uint64_t seed, int n_molecules,
                                 int min_atoms, int max_atoms) {
  // Frozen, randomly initialized, ungated teacher.
  ModelConfig teacher_cfg = cfg;
  teacher_cfg.rate_tp = 0.0;
  teacher_cfg.rate_pair = 0.0;
  teacher_cfg.seed = splitmix64(seed ^ 0x7eac4e5ULL);
  ad::ParamStore teacher_store;
  Model teacher(teacher_cfg, teacher_store);

  Dataset ds;
  ds.seed = seed;
  ds.basis = cfg.basis;
  for (int m = 0; m < n_molecules; ++m) {
    Sample s;
    s.mol = random_molecule(teacher.basis(), seed, m, min_atoms, max_atoms, cfg.cutoff);
    s.h_ref = teacher.predict(teacher_store, s.mol, /*epoch=*/0, /*ungated=*/true);
    s.dim = teacher.basis().total_dim(s.mol);
    ds.samples.push_back(std::move(s));
  }

  // Normalize labels to unit mean absolute entry across the dataset. This
  // fixes the label units independently of the teacher's arbitrary output
  // scale, so a student (whose prediction starts near zero) always has to
  // grow its contributions toward the targets.
  double abs_sum = 0.0;
  std::size_t count = 0;
  for (const Sample& s : ds.samples) {
    for (double v : s.h_ref) abs_sum += std::abs(v);
    count += s.h_ref.size();
  }
  if (abs_sum > 0.0) {
    const double scale = static_cast<double>(count) / abs_sum;
    for (Sample& s : ds.samples)
      for (double& v : s.h_ref) v *= scale;
  }
  return ds;
}

}  // namespace sphnet
