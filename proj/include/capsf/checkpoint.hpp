#pragma once

#include <stdexcept>
#include <string>

#include "capsf/encoder.hpp"
#include "capsf/model.hpp"
#include "capsf/pipeline.hpp"
#include "capsf/trainer.hpp"

namespace capsf {

struct CheckpointError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Everything needed to reload a trained model: the config echo, the
/// vocabulary, all parameter tensors, and the feature normalization stats.
struct Checkpoint {
  TrainConfig config;
  Vocabulary vocab;
  CapsFusionParams params;
  FeatureStats stats;
};

/// Binary layout: magic "CAPSF1", length-prefixed config JSON, the
/// vocabulary in its line format, then a named tensor table with shape
/// headers and little-endian 64-bit floats. save(load(x)) is byte-identical.
void save_checkpoint(const std::string& path, const Checkpoint& ckpt);

/// Throws CheckpointError before reading any tensor if the magic or any
/// structural header is wrong; plain runtime_error for unreadable files.
Checkpoint load_checkpoint(const std::string& path);

}  // namespace capsf
