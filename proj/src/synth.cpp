#include "lanebev/synth.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "lanebev/errors.hpp"

namespace lanebev {

void SceneParams::validate() const {
  if (n_lanes < 0) fail(ErrorCode::InvalidArgument, "n_lanes must be non-negative");
  if (!(lane_spacing > 0.0)) fail(ErrorCode::InvalidArgument, "lane_spacing must be positive");
  if (!(hill_wavelength > 0.0)) fail(ErrorCode::InvalidArgument, "hill_wavelength must be positive");
  if (max_curvature < 0.0 || jitter_rotation_deg < 0.0 || jitter_translation < 0.0) {
    fail(ErrorCode::InvalidArgument, "ranges must be non-negative");
  }
}

bool SceneParams::lanes_separated() const { return lane_spacing > 2.0 * max_curvature * 103.0 * 103.0; }

SceneRng::SceneRng(std::uint64_t seed) : engine_(seed) {}

double SceneRng::uniform(double lo, double hi) {
  // 53 high bits -> [0, 1); independent of the standard library's distributions.
  const double unit = static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  return lo + (hi - lo) * unit;
}

SceneRecord generate_scene(const SceneParams& params) {
  params.validate();
  SceneRng rng(params.seed);
  auto symmetric = [&](double range) { return range == 0.0 ? 0.0 : rng.uniform(-range, range); };

  const double c2 = symmetric(params.max_curvature);
  const double deg = std::numbers::pi / 180.0;
  const double d_pitch = symmetric(params.jitter_rotation_deg) * deg;
  const double d_yaw = symmetric(params.jitter_rotation_deg) * deg;
  const double d_roll = symmetric(params.jitter_rotation_deg) * deg;
  const Eigen::Vector3d d_center(symmetric(params.jitter_translation), symmetric(params.jitter_translation),
                                 symmetric(params.jitter_translation));

  SceneRecord record;
  record.scene_tag = params.scene_tag;
  record.rig = canonical_rig();
  if (d_pitch != 0.0 || d_yaw != 0.0 || d_roll != 0.0 || !d_center.isZero()) {
    const Eigen::Vector3d center = record.rig.extrinsics.center() + d_center;
    record.rig.extrinsics =
        extrinsics_from_center(road_to_camera_rotation(3.0 * deg + d_pitch, d_yaw, d_roll), center);
  }

  const double mid = (params.n_lanes - 1) / 2.0;
  for (int k = 0; k < params.n_lanes; ++k) {
    Lane3D lane{k + 1, {}};
    lane.points.reserve(101);
    for (int i = 0; i <= 100; ++i) {
      const double x = 3.0 + i;
      const double y = (k - mid) * params.lane_spacing + c2 * x * x;
      const double z = params.hill_amplitude * std::sin(2.0 * std::numbers::pi * x / params.hill_wavelength);
      lane.points.emplace_back(x, y, z);
    }
    record.lanes.push_back(std::move(lane));
  }
  return record;
}

Image render_ground_pattern(const CameraRigd& rig, const Image& pattern, const GridSpec& spec, ImageSize out_size) {
  if (pattern.empty()) fail(ErrorCode::InvalidShape, "pattern is empty");
  Image out(out_size.width, out_size.height, pattern.channels());
  const Eigen::Matrix3d k_inv = rig.intrinsics.matrix().inverse();
  const Eigen::Matrix3d r_t = rig.extrinsics.rotation.transpose();
  const Eigen::Vector3d center = rig.extrinsics.center();
  const double dx = (spec.x_max - spec.x_min) / pattern.height();
  const double dy = (spec.y_max - spec.y_min) / pattern.width();

  for (int v = 0; v < out_size.height; ++v) {
    for (int u = 0; u < out_size.width; ++u) {
      const Eigen::Vector3d ray = r_t * (k_inv * Eigen::Vector3d(u, v, 1.0));
      if (!(ray.z() < 0.0)) continue;
      const double t = -center.z() / ray.z();
      if (!(t > 0.0)) continue;
      const double x = center.x() + t * ray.x();
      const double y = center.y() + t * ray.y();
      if (!(x >= spec.x_min && x <= spec.x_max && y >= spec.y_min && y <= spec.y_max)) continue;

      const double fr = std::clamp((x - spec.x_min) / dx - 0.5, 0.0, pattern.height() - 1.0);
      const double fc = std::clamp((y - spec.y_min) / dy - 0.5, 0.0, pattern.width() - 1.0);
      const int r0 = std::min(static_cast<int>(fr), std::max(pattern.height() - 2, 0));
      const int c0 = std::min(static_cast<int>(fc), std::max(pattern.width() - 2, 0));
      const double ar = fr - r0;
      const double ac = fc - c0;
      const int r1 = std::min(r0 + 1, pattern.height() - 1);
      const int c1 = std::min(c0 + 1, pattern.width() - 1);
      for (int ch = 0; ch < pattern.channels(); ++ch) {
        const double value = (1 - ar) * ((1 - ac) * pattern.at(r0, c0, ch) + ac * pattern.at(r0, c1, ch)) +
                             ar * ((1 - ac) * pattern.at(r1, c0, ch) + ac * pattern.at(r1, c1, ch));
        out.at(v, u, ch) = static_cast<float>(value);
      }
    }
  }
  return out;
}

Image checkerboard_pattern(const GridSpec& spec, double resolution, double square) {
  if (!(resolution > 0.0) || !(square > 0.0)) fail(ErrorCode::InvalidArgument, "checkerboard sizes must be positive");
  const int rows = static_cast<int>(std::lround((spec.x_max - spec.x_min) / resolution));
  const int cols = static_cast<int>(std::lround((spec.y_max - spec.y_min) / resolution));
  Image pattern(cols, rows, 1);
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      const auto i = static_cast<long>(std::floor((r + 0.5) * resolution / square));
      const auto j = static_cast<long>(std::floor((c + 0.5) * resolution / square));
      pattern.at(r, c) = ((i + j) % 2 == 0) ? 1.0f : 0.0f;
    }
  }
  return pattern;
}

}  // namespace lanebev
