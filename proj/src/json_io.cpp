#include "lanebev/json_io.hpp"

#include <fstream>
#include <sstream>

#include "lanebev/errors.hpp"

namespace lanebev {

namespace {

const Json& field(const Json& j, const char* key) {
  if (!j.is_object()) fail(ErrorCode::MalformedJson, std::string("expected an object holding '") + key + "'");
  const auto it = j.find(key);
  if (it == j.end()) fail(ErrorCode::MissingField, std::string("missing field '") + key + "'");
  return *it;
}

template <typename T>
T get(const Json& j, const char* key) {
  const Json& v = field(j, key);
  try {
    return v.get<T>();
  } catch (const Json::exception&) {
    fail(ErrorCode::InvalidField, std::string("field '") + key + "' has the wrong type");
  }
}

template <typename T>
void maybe(const Json& j, const char* key, T& target) {
  if (j.is_object() && j.contains(key)) target = get<T>(j, key);
}

Eigen::Matrix3d matrix3_from_json(const Json& j, const char* what) {
  if (!j.is_array() || j.size() != 3) fail(ErrorCode::InvalidField, std::string(what) + " must be a 3x3 array");
  Eigen::Matrix3d m;
  for (int r = 0; r < 3; ++r) {
    if (!j[r].is_array() || j[r].size() != 3) fail(ErrorCode::InvalidField, std::string(what) + " must be 3x3");
    for (int c = 0; c < 3; ++c) {
      if (!j[r][c].is_number()) fail(ErrorCode::InvalidField, std::string(what) + " entries must be numbers");
      m(r, c) = j[r][c].get<double>();
    }
  }
  return m;
}

Json matrix3_to_json(const Eigen::Matrix3d& m) {
  Json rows = Json::array();
  for (int r = 0; r < 3; ++r) rows.push_back({m(r, 0), m(r, 1), m(r, 2)});
  return rows;
}

Eigen::Vector3d point_from_json(const Json& j) {
  if (!j.is_array() || j.size() != 3 || !j[0].is_number() || !j[1].is_number() || !j[2].is_number()) {
    fail(ErrorCode::InvalidField, "points must be [x, y, z] number triples");
  }
  return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

}  // namespace

Json parse_json(std::string_view text) {
  try {
    return Json::parse(text);
  } catch (const Json::exception& e) {
    fail(ErrorCode::MalformedJson, e.what());
  }
}

Json load_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::IoError, "cannot open " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_json(buffer.str());
}

std::string dump_json(const Json& j) { return j.dump(2) + "\n"; }

void save_json(const Json& j, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) fail(ErrorCode::IoError, "cannot write " + path.string());
  out << dump_json(j);
}

Json camera_to_json(const CameraRigd& rig) {
  const auto& k = rig.intrinsics;
  return {{"intrinsics", {{"fx", k.fx}, {"fy", k.fy}, {"cx", k.cx}, {"cy", k.cy}, {"skew", k.skew}}},
          {"extrinsics",
           {{"rotation", matrix3_to_json(rig.extrinsics.rotation)},
            {"translation",
             {rig.extrinsics.translation.x(), rig.extrinsics.translation.y(), rig.extrinsics.translation.z()}}}},
          {"image_size", {rig.image_size.width, rig.image_size.height}}};
}

CameraRigd camera_from_json(const Json& j) {
  CameraRigd rig;
  const Json& k = field(j, "intrinsics");
  rig.intrinsics.fx = get<double>(k, "fx");
  rig.intrinsics.fy = get<double>(k, "fy");
  rig.intrinsics.cx = get<double>(k, "cx");
  rig.intrinsics.cy = get<double>(k, "cy");
  rig.intrinsics.skew = 0.0;
  maybe(k, "skew", rig.intrinsics.skew);

  const Json& e = field(j, "extrinsics");
  rig.extrinsics.rotation = matrix3_from_json(field(e, "rotation"), "rotation");
  const auto t = get<std::vector<double>>(e, "translation");
  if (t.size() != 3) fail(ErrorCode::InvalidField, "translation must have 3 entries");
  rig.extrinsics.translation = Eigen::Vector3d(t[0], t[1], t[2]);

  const auto size = get<std::vector<int>>(j, "image_size");
  if (size.size() != 2) fail(ErrorCode::InvalidField, "image_size must be [width, height]");
  rig.image_size = {size[0], size[1]};
  validate(rig);
  return rig;
}

Json homography_to_json(const Homographyd& h) { return {{"matrix", matrix3_to_json(h.matrix)}}; }

Homographyd homography_from_json(const Json& j) {
  const Json& m = j.is_object() ? field(j, "matrix") : j;
  return Homographyd::normalized(matrix3_from_json(m, "homography"));
}

Json lane_to_json(const Lane3D& lane) {
  Json pts = Json::array();
  for (const auto& p : lane.points) pts.push_back({p.x(), p.y(), p.z()});
  return {{"id", lane.id}, {"points", pts}};
}

Lane3D lane_from_json(const Json& j) {
  const Json& pts = field(j, "points");
  if (!pts.is_array()) fail(ErrorCode::InvalidField, "lane points must be an array");
  std::vector<Eigen::Vector3d> points;
  for (const Json& p : pts) points.push_back(point_from_json(p));
  int id = 0;
  maybe(j, "id", id);
  auto lane = make_lane(id, std::move(points));
  if (!lane) fail(ErrorCode::InvalidField, "lane " + std::to_string(id) + " has fewer than 2 distinct points");
  return *lane;
}

Json lanes_to_json(const std::vector<Lane3D>& lanes, const std::vector<FittedLane>& fits) {
  Json arr = Json::array();
  for (std::size_t i = 0; i < lanes.size(); ++i) {
    Json lane = lane_to_json(lanes[i]);
    if (i < fits.size()) {
      const FittedLane& f = fits[i];
      lane["fit"] = {{"y_coeffs", std::vector<double>(f.y.coeffs.data(), f.y.coeffs.data() + f.y.coeffs.size())},
                     {"z_coeffs", std::vector<double>(f.z.coeffs.data(), f.z.coeffs.data() + f.z.coeffs.size())},
                     {"x_range", {f.x_min, f.x_max}},
                     {"x_center", f.y.x_center},
                     {"x_scale", f.y.x_scale}};
    }
    arr.push_back(std::move(lane));
  }
  return {{"lanes", arr}};
}

std::vector<Lane3D> lanes_from_json(const Json& j) {
  const Json& arr = field(j, "lanes");
  if (!arr.is_array()) fail(ErrorCode::InvalidField, "'lanes' must be an array");
  std::vector<Lane3D> lanes;
  for (const Json& lane : arr) lanes.push_back(lane_from_json(lane));
  return lanes;
}

Json scene_to_json(const SceneRecord& scene) {
  Json j = lanes_to_json(scene.lanes);
  j["rig"] = camera_to_json(scene.rig);
  j["scene_tag"] = scene.scene_tag;
  return j;
}

SceneRecord scene_from_json(const Json& j) {
  SceneRecord scene;
  scene.rig = camera_from_json(field(j, "rig"));
  scene.lanes = lanes_from_json(j);
  scene.scene_tag = "";
  maybe(j, "scene_tag", scene.scene_tag);
  return scene;
}

GridSpec grid_spec_from_json(const Json& j) {
  GridSpec spec;
  maybe(j, "x_min", spec.x_min);
  maybe(j, "x_max", spec.x_max);
  maybe(j, "y_min", spec.y_min);
  maybe(j, "y_max", spec.y_max);
  maybe(j, "cell", spec.cell);
  spec.validate();
  return spec;
}

Json grid_spec_to_json(const GridSpec& spec) {
  return {{"x_min", spec.x_min}, {"x_max", spec.x_max}, {"y_min", spec.y_min}, {"y_max", spec.y_max},
          {"cell", spec.cell}};
}

DecodeParams decode_params_from_json(const Json& j) {
  DecodeParams p;
  maybe(j, "s_threshold", p.s_threshold);
  maybe(j, "d_gap", p.d_gap);
  maybe(j, "min_points", p.min_points);
  maybe(j, "fit_degree", p.fit_degree);
  p.validate();
  return p;
}

Json decode_params_to_json(const DecodeParams& p) {
  return {{"s_threshold", p.s_threshold}, {"d_gap", p.d_gap}, {"min_points", p.min_points},
          {"fit_degree", p.fit_degree}};
}

EvalConfig eval_config_from_json(const Json& j) {
  EvalConfig cfg;
  maybe(j, "sample_xs", cfg.sample_xs);
  maybe(j, "match_threshold", cfg.match_threshold);
  maybe(j, "match_ratio", cfg.match_ratio);
  maybe(j, "near_limit", cfg.near_limit);
  maybe(j, "x_min", cfg.x_min);
  maybe(j, "x_max", cfg.x_max);
  maybe(j, "y_min", cfg.y_min);
  maybe(j, "y_max", cfg.y_max);
  cfg.validate();
  return cfg;
}

Json eval_config_to_json(const EvalConfig& cfg) {
  return {{"sample_xs", cfg.sample_xs}, {"match_threshold", cfg.match_threshold}, {"match_ratio", cfg.match_ratio},
          {"near_limit", cfg.near_limit}, {"x_min", cfg.x_min},                    {"x_max", cfg.x_max},
          {"y_min", cfg.y_min},           {"y_max", cfg.y_max}};
}

SceneParams scene_params_from_json(const Json& j) {
  SceneParams p;
  maybe(j, "n_lanes", p.n_lanes);
  maybe(j, "lane_spacing", p.lane_spacing);
  maybe(j, "max_curvature", p.max_curvature);
  maybe(j, "hill_amplitude", p.hill_amplitude);
  maybe(j, "hill_wavelength", p.hill_wavelength);
  maybe(j, "jitter_rotation_deg", p.jitter_rotation_deg);
  maybe(j, "jitter_translation", p.jitter_translation);
  maybe(j, "seed", p.seed);
  maybe(j, "scene_tag", p.scene_tag);
  p.validate();
  return p;
}

Json scene_params_to_json(const SceneParams& p) {
  return {{"n_lanes", p.n_lanes},
          {"lane_spacing", p.lane_spacing},
          {"max_curvature", p.max_curvature},
          {"hill_amplitude", p.hill_amplitude},
          {"hill_wavelength", p.hill_wavelength},
          {"jitter_rotation_deg", p.jitter_rotation_deg},
          {"jitter_translation", p.jitter_translation},
          {"seed", p.seed},
          {"scene_tag", p.scene_tag}};
}

Json eval_result_to_json(const EvalResult& r) {
  Json j = {{"f_score", r.f_score},
            {"precision", r.precision},
            {"recall", r.recall},
            {"true_positives", r.true_positives},
            {"num_pred", r.num_pred},
            {"num_gt", r.num_gt}};
  // Buckets without any matched sample are left out.
  if (r.x_err_near) j["x_err_near"] = *r.x_err_near;
  if (r.x_err_far) j["x_err_far"] = *r.x_err_far;
  if (r.z_err_near) j["z_err_near"] = *r.z_err_near;
  if (r.z_err_far) j["z_err_far"] = *r.z_err_far;
  return j;
}

}  // namespace lanebev
