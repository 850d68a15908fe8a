#include "lanebev/pipeline.hpp"

#include <algorithm>

namespace lanebev {

PipelineResult run_pipeline(const PipelineConfig& config) {
  PipelineResult out;
  out.scene = generate_scene(config.scene);
  out.ground_truth = encode_lanes(out.scene.lanes, config.spec);
  const int count = static_cast<int>(instance_ids(out.ground_truth.instance).size());
  const int embed_dim = std::max(4, count - 1);
  out.prediction = ideal_prediction(out.ground_truth, config.spec, config.margin_scale, embed_dim);
  out.instances = decode_grid(out.prediction, config.spec, config.decode);
  for (const LaneInstance& inst : out.instances) out.lanes.push_back(to_lane(inst));
  out.eval = evaluate(out.lanes, out.scene.lanes, config.eval);
  return out;
}

}  // namespace lanebev
