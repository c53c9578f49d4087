#pragma once

#include <cstdint>
#include <memory>
#include <string>

#include "sphnet/model.hpp"

namespace sphnet {

// Versioned binary container ("SPHC"): config echo, every parameter array
// with Adam moments, gate phase state (frozen selections, RNG counters),
// optimizer step and epoch counters.
void save_checkpoint(const std::string& path, Model& model, const ad::ParamStore& store,
                     std::uint64_t step, int epoch);

struct LoadedCheckpoint {
  ModelConfig config;
  std::unique_ptr<ad::ParamStore> store;
  std::unique_ptr<Model> model;
  std::uint64_t step = 0;
  int epoch = 0;
};

LoadedCheckpoint load_checkpoint(const std::string& path);

}  // namespace sphnet
