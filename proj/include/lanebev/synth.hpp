#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "lanebev/camera.hpp"
#include "lanebev/grid.hpp"
#include "lanebev/image.hpp"

namespace lanebev {

struct SceneParams {
  int n_lanes = 4;
  double lane_spacing = 3.5;
  double max_curvature = 0.0;       // quadratic lateral coefficient drawn from [-max, max] (1/m)
  double hill_amplitude = 0.0;      // m
  double hill_wavelength = 80.0;    // m
  double jitter_rotation_deg = 0.0; // per-axis range
  double jitter_translation = 0.0;  // per-axis range (m)
  std::uint64_t seed = 0;
  std::string scene_tag = "synthetic";

  void validate() const;
  /// True when lanes cannot cross inside the default grid for any curvature
  /// in range.
  bool lanes_separated() const;
};

struct SceneRecord {
  CameraRigd rig;
  std::vector<Lane3D> lanes;
  std::string scene_tag;
};

/// Deterministic 64-bit generator (mt19937_64) with portable uniform draws.
class SceneRng {
 public:
  explicit SceneRng(std::uint64_t seed);
  /// Uniform in [lo, hi).
  double uniform(double lo, double hi);

 private:
  std::mt19937_64 engine_;
};

/// Lanes y_k(x) = (k - (n-1)/2) * spacing + c2 * x^2, z(x) = A sin(2 pi x / L),
/// sampled every metre over [3, 103]; lane k gets id k + 1. The camera is the
/// canonical rig perturbed by the seeded jitter.
SceneRecord generate_scene(const SceneParams& params);

/// Renders a BEV pattern (rows along x, columns along y over the extent of
/// `spec`) into the camera image by back-projecting every pixel onto the
/// road plane. Pixels whose ray misses the plane or the pattern are 0.
Image render_ground_pattern(const CameraRigd& rig, const Image& pattern, const GridSpec& spec, ImageSize out_size);

/// Checkerboard pattern with `square` metre squares covering `spec` at
/// `resolution` metres per pattern pixel, values in {0, 1}.
Image checkerboard_pattern(const GridSpec& spec, double resolution, double square);

}  // namespace lanebev
