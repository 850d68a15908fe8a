#pragma once

// OpenLane-style per-frame annotations.
//
// Expected layout:
//   {"file_path": "...",
//    "intrinsic": [[3]x3],
//    "extrinsic": [[4]x4],          // dataset camera frame -> road frame
//    "lane_lines": [{"xyz": [[x,y,z], ...] or [[x...],[y...],[z...]],
//                    "category": int, "visibility": [...]}]}
//
// Lane points are given in the dataset camera frame, whose axes follow the
// road convention (x forward, y left, z up). The extrinsic maps them into the
// road frame; the optical camera rotation is derived from it here and nowhere
// else.

#include <string>
#include <string_view>
#include <vector>

#include "lanebev/json_io.hpp"
#include "lanebev/synth.hpp"

namespace lanebev {

struct OpenLaneLaneInfo {
  int category = 0;
  std::vector<double> visibility;  // aligned with the lane's sorted points
};

struct OpenLaneFrame {
  SceneRecord scene;
  std::vector<OpenLaneLaneInfo> lane_info;  // aligned with scene.lanes
  std::string file_path;
};

OpenLaneFrame parse_openlane_frame(std::string_view json_text);
OpenLaneFrame parse_openlane_frame(const std::string& json_text);
OpenLaneFrame parse_openlane_frame(const char* json_text);
OpenLaneFrame parse_openlane_frame(const Json& frame);

/// Inverse of parse_openlane_frame for a road-frame scene record.
Json export_openlane_frame(const SceneRecord& scene, const std::string& file_path = "synthetic.jpg");

}  // namespace lanebev
