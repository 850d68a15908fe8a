#pragma once

// Synthetic oracle chain: synth -> encode -> ideal prediction -> decode -> eval.

#include <vector>

#include "lanebev/grid.hpp"
#include "lanebev/metrics.hpp"
#include "lanebev/postproc.hpp"
#include "lanebev/synth.hpp"

namespace lanebev {

struct PipelineConfig {
  SceneParams scene;
  GridSpec spec;
  DecodeParams decode;
  EvalConfig eval;
  double margin_scale = 1.0;
};

struct PipelineResult {
  SceneRecord scene;
  GridTensors ground_truth;
  GridTensors prediction;
  std::vector<LaneInstance> instances;
  std::vector<Lane3D> lanes;
  EvalResult eval;
};

/// The embedding dimension grows to count - 1 when a scene holds more
/// instances than the default 4-D simplex can separate.
PipelineResult run_pipeline(const PipelineConfig& config);

}  // namespace lanebev
