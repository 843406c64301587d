#pragma once

#include <string>

#include "mlad/trainer.hpp"

namespace mlad {

// Checkpoint container, version 1. Layout:
//   line 1: "MLAD-CHECKPOINT 1"
//   line 2: "config k=v ..." (every ModelConfig field)
//   line 3: "tensors N"
//   N lines: "tensor <name> <rank> <dim...>"
//   line:   "end"
//   body:   for each tensor in listed order, numel little-endian float64
// Mixture statistics and the training-energy quantile grid ride along as
// named tensors.
void save_model(const TrainedModel& model, const std::string& path);
TrainedModel load_model(const std::string& path);

} // namespace mlad
