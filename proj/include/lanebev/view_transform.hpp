#pragma once

// Front-view -> BEV feature transforms as explicit linear operators.
// Feature maps are flattened row-major: pixel (i, j) of an H x W map is row
// i * W + j of the data matrix, and each column is one channel.

#include <Eigen/Dense>

#include <utility>
#include <vector>

#include "lanebev/camera.hpp"
#include "lanebev/grid.hpp"
#include "lanebev/image.hpp"

namespace lanebev {

struct FeatureShape {
  int height = 0;
  int width = 0;
  Eigen::Index size() const { return static_cast<Eigen::Index>(height) * width; }
  friend bool operator==(const FeatureShape&, const FeatureShape&) = default;
};

struct FeatureTensor {
  FeatureShape shape;
  int scale = 32;
  Eigen::MatrixXd data;  // (H*W) x C

  FeatureTensor() = default;
  FeatureTensor(FeatureShape s, int channels, int scale_factor = 32);

  int channels() const { return static_cast<int>(data.cols()); }
  double& at(int row, int col, int channel) { return data(static_cast<Eigen::Index>(row) * shape.width + col, channel); }
  double at(int row, int col, int channel) const {
    return data(static_cast<Eigen::Index>(row) * shape.width + col, channel);
  }
};

struct ViewRelationMap {
  FeatureShape fv_shape;
  FeatureShape bev_shape;
  int scale = 32;
  Eigen::MatrixXd matrix;  // (bev H*W) x (fv H*W)

  /// Throws ShapeMismatch when the matrix does not match the declared shapes.
  void validate() const;
};

struct PyramidSpec {
  std::vector<int> scales{32, 64};
  FeatureShape bev_shape{50, 10};

  void validate() const;
};

/// Bilinear sampling operator that looks up, for every BEV cell centre on the
/// ground plane, the front-view feature at its projection. Feature pixel j
/// covers image pixels [j*scale, (j+1)*scale), so image coordinate u maps to
/// feature coordinate (u + 0.5) / scale - 0.5. Rows whose projection is behind
/// the camera or outside the feature plane are zero.
ViewRelationMap build_ipm_sampling_map(const CameraRigd& rig, FeatureShape fv_shape, int scale,
                                       const GridSpec& bev_extent, FeatureShape bev_shape);

FeatureTensor apply_vrm(const ViewRelationMap& map, const FeatureTensor& fv);

/// Applies one map per pyramid scale and concatenates the results along the
/// channel axis in spec order.
FeatureTensor apply_pyramid(const std::vector<ViewRelationMap>& maps, const std::vector<FeatureTensor>& features,
                            const PyramidSpec& spec);

using VrmSample = std::pair<FeatureTensor, FeatureTensor>;  // (front view, BEV)

/// Ridge-regularised least-squares fit of M in  min sum ||M x - y||^2 + ridge ||M||_F^2
/// where every channel of every sample contributes one (x, y) pair.
/// With ridge == 0 an under-determined system raises InsufficientRank.
ViewRelationMap fit_vrm_least_squares(const std::vector<VrmSample>& samples, double ridge);

/// 1e-6 times the mean squared input feature norm per front-view pixel, a
/// scale-aware ridge for ill-posed fits.
double default_ridge(const std::vector<VrmSample>& samples);

/// Area-average downsampling of a single-channel image into scale x scale
/// blocks, the front-view feature synthesiser used by the transform checks.
FeatureTensor area_average_features(const Image& image, int scale);

}  // namespace lanebev
