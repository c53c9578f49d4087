#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "sphnet/model.hpp"
#include "sphnet/molecule.hpp"

namespace sphnet {

struct Sample {
  MoleculeGraph mol;
  std::vector<double> h_ref;  // row-major dim x dim, symmetric
  int dim = 0;
};

struct Dataset {
  std::vector<Sample> samples;
  std::uint64_t seed = 0;
  std::string basis;
};

// Random perturbed chains/rings of H, C, N, O with all interatomic
// distances >= 0.8 Angstrom, labeled by a frozen randomly initialized
// ungated teacher built from `cfg` (teacher seed derived from `seed`).
// Overlap is the identity. Throws numeric_error after 1000 rejected
// geometries. Deterministic: per-molecule RNG streams derived from `seed`.
Dataset generate_teacher_dataset(const ModelConfig& cfg, std::uint64_t seed, int n_molecules,
                                 int min_atoms, int max_atoms);

// Geometry generation alone (no labels); molecule index selects the stream.
MoleculeGraph random_molecule(const BasisSpec& basis, std::uint64_t seed, int index,
                              int min_atoms, int max_atoms, double cutoff);

}  // namespace sphnet
