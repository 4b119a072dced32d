#pragma once

#include <string>

#include "nasgnn/predictor.hpp"
#include "nasgnn/training.hpp"

namespace nasgnn {

/// Model checkpoints are a single JSON document: a header (format_version 1
/// plus the dimensions needed to rebuild the model) and a map from
/// parameter path to {shape, row-major values}. Floats are written with 17
/// significant decimal digits, so values round-trip bit for bit.

void save_checkpoint(const std::string& path, const SurrogateModel& model);
void save_checkpoint(const std::string& path, const BaselineMlp& model);

/// Snapshot-overriding variants (e.g. the best-validation parameters).
void save_checkpoint(const std::string& path, const SurrogateModel& model,
                     const ParamSnapshot& values);
void save_checkpoint(const std::string& path, const BaselineMlp& model,
                     const ParamSnapshot& values);

enum class CheckpointKind { Gnn, MlpOneHot, MlpDepthWidth };

CheckpointKind peek_checkpoint_kind(const std::string& path);

/// Rebuilds the model from the header and loads every parameter, checking
/// shapes (DimensionMismatchError on any disagreement with the header's
/// dimensions).
SurrogateModel load_surrogate_checkpoint(const std::string& path);
BaselineMlp load_baseline_checkpoint(const std::string& path);

}  // namespace nasgnn
