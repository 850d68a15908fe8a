#pragma once

// JSON schemas shared by the CLI and file formats.
//
// camera:  {"intrinsics":{"fx","fy","cx","cy","skew"},
//           "extrinsics":{"rotation":[[3]x3],"translation":[3]},
//           "image_size":[w,h]}
// lanes:   {"lanes":[{"id":1,"points":[[x,y,z],...],
//                     "fit":{"y_coeffs":[...],"z_coeffs":[...],"x_range":[a,b],
//                            "x_center":c,"x_scale":s}}]}
// scene:   {"rig":<camera>,"lanes":[...],"scene_tag":"..."}

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "lanebev/camera.hpp"
#include "lanebev/grid.hpp"
#include "lanebev/losses.hpp"
#include "lanebev/metrics.hpp"
#include "lanebev/postproc.hpp"
#include "lanebev/synth.hpp"

namespace lanebev {

using Json = nlohmann::json;

/// Parses text, mapping syntax errors to MalformedJson.
Json parse_json(std::string_view text);
Json load_json(const std::filesystem::path& path);
void save_json(const Json& j, const std::filesystem::path& path);

/// Serialised form used for every output file: two-space indent, trailing newline.
std::string dump_json(const Json& j);

Json camera_to_json(const CameraRigd& rig);
CameraRigd camera_from_json(const Json& j);

Json homography_to_json(const Homographyd& h);
Homographyd homography_from_json(const Json& j);

Json lane_to_json(const Lane3D& lane);
Lane3D lane_from_json(const Json& j);

Json lanes_to_json(const std::vector<Lane3D>& lanes, const std::vector<FittedLane>& fits = {});
std::vector<Lane3D> lanes_from_json(const Json& j);

Json scene_to_json(const SceneRecord& scene);
SceneRecord scene_from_json(const Json& j);

// Config objects: every field optional, defaults from the C++ types.
GridSpec grid_spec_from_json(const Json& j);
Json grid_spec_to_json(const GridSpec& spec);
DecodeParams decode_params_from_json(const Json& j);
Json decode_params_to_json(const DecodeParams& params);
EvalConfig eval_config_from_json(const Json& j);
Json eval_config_to_json(const EvalConfig& cfg);
SceneParams scene_params_from_json(const Json& j);
Json scene_params_to_json(const SceneParams& params);

Json eval_result_to_json(const EvalResult& result);

}  // namespace lanebev
