#pragma once

#include <string>

#include "poirec/config.hpp"
#include "poirec/splitter.hpp"

namespace poirec {

// Checkpoint directory: parameter tensors (+ optimizer moments) in the
// binary matrix format, routing and split state in registry.json, and a
// config snapshot. Written to a temp directory and renamed into place.
void save_checkpoint(const std::string& dir, const ParamRegistry& registry,
                     const TrainConfig& cfg);

struct LoadedCheckpoint {
  TrainConfig config;
  ParamRegistry registry;
};

LoadedCheckpoint load_checkpoint(const std::string& dir);

}  // namespace poirec
