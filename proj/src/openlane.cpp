#include "lanebev/openlane.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "lanebev/errors.hpp"

namespace lanebev {

namespace {

// Road-convention axes (x fwd, y left, z up) -> optical axes (x right, y down, z fwd).
Eigen::Matrix3d optical_from_road_axes() {
  Eigen::Matrix3d p;
  p << 0, -1, 0,
       0, 0, -1,
       1, 0, 0;
  return p;
}

const Json& require(const Json& j, const char* key) {
  if (!j.is_object()) fail(ErrorCode::MalformedJson, "frame must be a JSON object");
  const auto it = j.find(key);
  if (it == j.end()) fail(ErrorCode::MissingField, std::string("missing field '") + key + "'");
  return *it;
}

Eigen::MatrixXd numeric_matrix(const Json& j, Eigen::Index rows, Eigen::Index cols, const char* what) {
  if (!j.is_array() || static_cast<Eigen::Index>(j.size()) != rows) {
    fail(ErrorCode::InvalidField, std::string(what) + " has the wrong number of rows");
  }
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    const Json& row = j[r];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols) {
      fail(ErrorCode::InvalidField, std::string(what) + " has the wrong number of columns");
    }
    for (Eigen::Index c = 0; c < cols; ++c) {
      if (!row[c].is_number()) fail(ErrorCode::InvalidField, std::string(what) + " entries must be numbers");
      m(r, c) = row[c].get<double>();
    }
  }
  return m;
}

/// Accepts N x 3 point lists and the dataset's 3 x N coordinate rows.
std::vector<Eigen::Vector3d> lane_points(const Json& xyz) {
  if (!xyz.is_array()) fail(ErrorCode::InvalidField, "lane xyz must be an array");
  std::vector<Eigen::Vector3d> pts;
  if (xyz.empty()) return pts;
  const bool row_layout = xyz.size() == 3 && xyz[0].is_array() && xyz[0].size() != 3;
  if (row_layout) {
    const std::size_t n = xyz[0].size();
    if (xyz[1].size() != n || xyz[2].size() != n) fail(ErrorCode::InvalidField, "xyz rows differ in length");
    const Eigen::MatrixXd m = numeric_matrix(xyz, 3, static_cast<Eigen::Index>(n), "xyz");
    for (std::size_t i = 0; i < n; ++i) pts.emplace_back(m.col(static_cast<Eigen::Index>(i)));
    return pts;
  }
  const Eigen::MatrixXd m = numeric_matrix(xyz, static_cast<Eigen::Index>(xyz.size()), 3, "xyz");
  for (Eigen::Index i = 0; i < m.rows(); ++i) pts.emplace_back(m.row(i).transpose());
  return pts;
}

OpenLaneFrame parse_frame(const Json& frame) {
  const Eigen::Matrix3d k = numeric_matrix(require(frame, "intrinsic"), 3, 3, "intrinsic");
  if (!(std::abs(k.determinant()) > 1e-12) || k(2, 0) != 0.0 || k(2, 1) != 0.0) {
    fail(ErrorCode::InvalidField, "intrinsic matrix is not an invertible camera matrix");
  }
  const Eigen::Matrix4d e = numeric_matrix(require(frame, "extrinsic"), 4, 4, "extrinsic");
  const Eigen::Matrix3d e_rot = e.topLeftCorner<3, 3>();
  if ((e_rot.transpose() * e_rot - Eigen::Matrix3d::Identity()).cwiseAbs().maxCoeff() > 1e-6 ||
      std::abs(e_rot.determinant() - 1.0) > 1e-6) {
    fail(ErrorCode::NonOrthonormalRotation, "extrinsic rotation is not orthonormal");
  }
  const Eigen::Matrix3d cam_to_road = nearest_rotation(e_rot);
  const Eigen::Vector3d cam_center = e.topRightCorner<3, 1>();

  OpenLaneFrame out;
  out.file_path = frame.value("file_path", std::string());
  out.scene.scene_tag = frame.value("scene_tag", std::string());

  CameraRigd& rig = out.scene.rig;
  rig.intrinsics = Intrinsicsd::from_matrix(k / k(2, 2));
  rig.extrinsics = extrinsics_from_center(optical_from_road_axes() * cam_to_road.transpose(), cam_center);
  rig.image_size = {1920, 1280};
  if (frame.contains("image_size")) {
    const Json& size = frame["image_size"];
    if (!size.is_array() || size.size() != 2 || !size[0].is_number_integer() || !size[1].is_number_integer()) {
      fail(ErrorCode::InvalidField, "image_size must be [width, height]");
    }
    rig.image_size = {size[0].get<int>(), size[1].get<int>()};
  }
  validate(rig);

  const Json& lines = require(frame, "lane_lines");
  if (!lines.is_array()) fail(ErrorCode::InvalidField, "lane_lines must be an array");
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const Json& line = lines[i];
    std::vector<Eigen::Vector3d> pts = lane_points(require(line, "xyz"));
    for (auto& p : pts) p = cam_to_road * p + cam_center;

    std::vector<double> visibility;
    if (line.contains("visibility") && line["visibility"].is_array()) {
      for (const Json& v : line["visibility"]) visibility.push_back(v.is_number() ? v.get<double>() : 0.0);
    }
    if (visibility.size() != pts.size()) visibility.clear();

    // Sort by x and drop repeated abscissae, keeping visibility aligned.
    std::vector<std::size_t> order(pts.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return pts[a].x() < pts[b].x(); });
    std::vector<Eigen::Vector3d> sorted;
    OpenLaneLaneInfo info;
    info.category = line.value("category", 0);
    for (std::size_t idx : order) {
      if (!sorted.empty() && sorted.back().x() == pts[idx].x()) continue;
      sorted.push_back(pts[idx]);
      if (!visibility.empty()) info.visibility.push_back(visibility[idx]);
    }
    if (sorted.size() < 2) continue;
    const int id = line.value("track_id", static_cast<int>(i) + 1);
    out.scene.lanes.push_back(Lane3D{id, std::move(sorted)});
    out.lane_info.push_back(std::move(info));
  }
  return out;
}

}  // namespace

OpenLaneFrame parse_openlane_frame(const Json& frame) {
  try {
    return parse_frame(frame);
  } catch (const Json::exception& e) {
    fail(ErrorCode::InvalidField, std::string("unexpected value type in frame: ") + e.what());
  }
}

OpenLaneFrame parse_openlane_frame(std::string_view json_text) { return parse_openlane_frame(parse_json(json_text)); }

OpenLaneFrame parse_openlane_frame(const std::string& json_text) {
  return parse_openlane_frame(std::string_view(json_text));
}

OpenLaneFrame parse_openlane_frame(const char* json_text) { return parse_openlane_frame(std::string_view(json_text)); }

Json export_openlane_frame(const SceneRecord& scene, const std::string& file_path) {
  const Eigen::Matrix3d cam_to_road = scene.rig.extrinsics.rotation.transpose() * optical_from_road_axes();
  const Eigen::Vector3d center = scene.rig.extrinsics.center();

  Json extrinsic = Json::array();
  for (int r = 0; r < 3; ++r) {
    extrinsic.push_back({cam_to_road(r, 0), cam_to_road(r, 1), cam_to_road(r, 2), center(r)});
  }
  extrinsic.push_back({0.0, 0.0, 0.0, 1.0});
  const Eigen::Matrix3d k = scene.rig.intrinsics.matrix();
  Json intrinsic = Json::array();
  for (int r = 0; r < 3; ++r) intrinsic.push_back({k(r, 0), k(r, 1), k(r, 2)});

  Json lines = Json::array();
  for (const Lane3D& lane : scene.lanes) {
    Json xyz = Json::array(), vis = Json::array();
    for (const auto& p : lane.points) {
      const Eigen::Vector3d c = cam_to_road.transpose() * (p - center);
      xyz.push_back({c.x(), c.y(), c.z()});
      vis.push_back(1.0);
    }
    lines.push_back({{"xyz", xyz}, {"category", 1}, {"visibility", vis}, {"track_id", lane.id}});
  }
  return {{"file_path", file_path},
          {"intrinsic", intrinsic},
          {"extrinsic", extrinsic},
          {"image_size", {scene.rig.image_size.width, scene.rig.image_size.height}},
          {"scene_tag", scene.scene_tag},
          {"lane_lines", lines}};
}

}  // namespace lanebev
