#pragma once

// Two-path rendering check shared by the synth tests and the acceptance
// binary: a ground checkerboard rendered with rig A and warped by H(A->B)
// against the same pattern rendered directly with rig B.

#include <Eigen/Dense>

#include "lanebev/camera.hpp"
#include "lanebev/image.hpp"
#include "lanebev/synth.hpp"

namespace lanebev::testing {

struct TwoPathResult {
  double mean_abs_diff = 0.0;  // intensity units of 255
  long pixels = 0;
};

/// Interior pixels are those of B whose ground point lies in
/// [x_near, x_far] x [-8, 8] m and whose preimage under H lies at least two
/// pixels inside A. The checkerboard has 4 m squares stored at 0.5 m per
/// pattern pixel, so bilinear pattern sampling gives edges a 0.5 m ramp.
/// Sharper edges alias in both renderings and the residual would measure
/// aliasing rather than geometry. `shift` offsets the warp horizontally by
/// that many pixels (for negative controls).
inline TwoPathResult two_path_difference(const CameraRigd& a, const CameraRigd& b, double x_near = 5.0,
                                         double x_far = 30.0, double shift = 0.0) {
  const double square = 4.0, res = 0.5;
  GridSpec extent;
  extent.x_min = 0;
  extent.x_max = 110;
  extent.y_min = -12;
  extent.y_max = 12;
  Image pattern = checkerboard_pattern(extent, res, square);
  for (float& v : pattern.data()) v *= 255.0f;

  const Image direct = render_ground_pattern(b, pattern, extent, b.image_size);
  Homographyd h = compute_homography(a, b);
  Eigen::Matrix3d offset = Eigen::Matrix3d::Identity();
  offset(0, 2) = shift;
  h = Homographyd::normalized(offset * h.matrix);
  const Image warped = warp_image(render_ground_pattern(a, pattern, extent, a.image_size), h, b.image_size);

  const Eigen::Matrix3d k_inv = b.intrinsics.matrix().inverse();
  const Eigen::Matrix3d r_t = b.extrinsics.rotation.transpose();
  const Eigen::Vector3d c = b.extrinsics.center();
  const Eigen::Matrix3d h_inv = h.inverse().matrix;
  TwoPathResult result;
  double sum = 0.0;
  for (int v = 0; v < b.image_size.height; ++v)
    for (int u = 0; u < b.image_size.width; ++u) {
      const Eigen::Vector3d ray = r_t * (k_inv * Eigen::Vector3d(u, v, 1));
      if (ray.z() >= 0) continue;
      const Eigen::Vector3d g = c - (c.z() / ray.z()) * ray;
      if (g.x() < x_near || g.x() > x_far || std::abs(g.y()) > 8.0) continue;
      const Eigen::Vector3d s = h_inv * Eigen::Vector3d(u, v, 1);
      const double su = s.x() / s.z(), sv = s.y() / s.z();
      if (su < 2 || sv < 2 || su > a.image_size.width - 3 || sv > a.image_size.height - 3) continue;
      sum += std::abs(double(direct.at(v, u)) - double(warped.at(v, u)));
      ++result.pixels;
    }
  result.mean_abs_diff = result.pixels > 0 ? sum / result.pixels : 0.0;
  return result;
}

}  // namespace lanebev::testing
