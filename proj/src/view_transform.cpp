#include "lanebev/view_transform.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <string>

#include "lanebev/errors.hpp"

namespace lanebev {

FeatureTensor::FeatureTensor(FeatureShape s, int channels, int scale_factor)
    : shape(s), scale(scale_factor), data(Eigen::MatrixXd::Zero(s.size(), channels)) {
  if (s.height <= 0 || s.width <= 0 || channels <= 0) {
    fail(ErrorCode::InvalidShape, "feature tensor dimensions must be positive");
  }
}

void ViewRelationMap::validate() const {
  if (matrix.rows() != bev_shape.size() || matrix.cols() != fv_shape.size()) {
    fail(ErrorCode::ShapeMismatch, "view relation matrix is " + std::to_string(matrix.rows()) + "x" +
                                       std::to_string(matrix.cols()) + " but shapes declare " +
                                       std::to_string(bev_shape.size()) + "x" + std::to_string(fv_shape.size()));
  }
}

void PyramidSpec::validate() const {
  if (scales.empty()) fail(ErrorCode::InvalidArgument, "pyramid needs at least one scale");
  if (std::set<int>(scales.begin(), scales.end()).size() != scales.size()) {
    fail(ErrorCode::InvalidArgument, "pyramid scales must be distinct");
  }
}

ViewRelationMap build_ipm_sampling_map(const CameraRigd& rig, FeatureShape fv_shape, int scale,
                                       const GridSpec& bev_extent, FeatureShape bev_shape) {
  if (scale <= 0 || fv_shape.size() <= 0 || bev_shape.size() <= 0) {
    fail(ErrorCode::InvalidShape, "sampling map needs positive shapes and scale");
  }
  ViewRelationMap map{fv_shape, bev_shape, scale, Eigen::MatrixXd::Zero(bev_shape.size(), fv_shape.size())};
  const double dx = (bev_extent.x_max - bev_extent.x_min) / bev_shape.height;
  const double dy = (bev_extent.y_max - bev_extent.y_min) / bev_shape.width;
  const Eigen::Matrix3d k = rig.intrinsics.matrix();

  for (int r = 0; r < bev_shape.height; ++r) {
    for (int c = 0; c < bev_shape.width; ++c) {
      const Eigen::Vector3d ground(bev_extent.x_min + (r + 0.5) * dx, bev_extent.y_min + (c + 0.5) * dy, 0.0);
      const Eigen::Vector3d cam = rig.extrinsics.to_camera(ground);
      if (cam.z() <= 1e-9) continue;
      const Eigen::Vector2d pixel = (k * cam).hnormalized();
      const double fx = (pixel.x() + 0.5) / scale - 0.5;
      const double fy = (pixel.y() + 0.5) / scale - 0.5;
      if (!(fx >= 0.0 && fx <= fv_shape.width - 1 && fy >= 0.0 && fy <= fv_shape.height - 1)) continue;

      const int x0 = std::min(static_cast<int>(std::floor(fx)), std::max(fv_shape.width - 2, 0));
      const int y0 = std::min(static_cast<int>(std::floor(fy)), std::max(fv_shape.height - 2, 0));
      const double ax = fx - x0;
      const double ay = fy - y0;
      const Eigen::Index row = static_cast<Eigen::Index>(r) * bev_shape.width + c;
      auto deposit = [&](int yy, int xx, double w) {
        if (w == 0.0) return;
        map.matrix(row, static_cast<Eigen::Index>(yy) * fv_shape.width + xx) += w;
      };
      deposit(y0, x0, (1.0 - ax) * (1.0 - ay));
      deposit(y0, x0 + 1, ax * (1.0 - ay));
      deposit(y0 + 1, x0, (1.0 - ax) * ay);
      deposit(y0 + 1, x0 + 1, ax * ay);
    }
  }
  return map;
}

FeatureTensor apply_vrm(const ViewRelationMap& map, const FeatureTensor& fv) {
  map.validate();
  if (!(fv.shape == map.fv_shape) || fv.data.rows() != map.fv_shape.size()) {
    fail(ErrorCode::ShapeMismatch, "front-view features do not match the map's input shape");
  }
  FeatureTensor bev;
  bev.shape = map.bev_shape;
  bev.scale = fv.scale;
  bev.data.noalias() = map.matrix * fv.data;
  return bev;
}

FeatureTensor apply_pyramid(const std::vector<ViewRelationMap>& maps, const std::vector<FeatureTensor>& features,
                            const PyramidSpec& spec) {
  spec.validate();
  if (maps.size() != spec.scales.size() || features.size() != spec.scales.size()) {
    fail(ErrorCode::ShapeMismatch, "pyramid needs one map and one feature tensor per scale");
  }
  std::vector<FeatureTensor> parts;
  Eigen::Index channels = 0;
  for (std::size_t i = 0; i < maps.size(); ++i) {
    if (!(maps[i].bev_shape == spec.bev_shape)) {
      fail(ErrorCode::ShapeMismatch, "pyramid level " + std::to_string(i) + " has a different BEV shape");
    }
    parts.push_back(apply_vrm(maps[i], features[i]));
    channels += parts.back().data.cols();
  }
  FeatureTensor out;
  out.shape = spec.bev_shape;
  out.scale = spec.scales.front();
  out.data.resize(spec.bev_shape.size(), channels);
  Eigen::Index col = 0;
  for (const auto& part : parts) {
    out.data.middleCols(col, part.data.cols()) = part.data;
    col += part.data.cols();
  }
  return out;
}

namespace {

struct StackedSamples {
  Eigen::MatrixXd inputs;   // pairs x (fv H*W)
  Eigen::MatrixXd targets;  // pairs x (bev H*W)
  FeatureShape fv_shape;
  FeatureShape bev_shape;
  int scale = 32;
};

StackedSamples stack(const std::vector<VrmSample>& samples) {
  if (samples.empty()) fail(ErrorCode::EmptyInput, "no samples to fit");
  StackedSamples s;
  s.fv_shape = samples.front().first.shape;
  s.bev_shape = samples.front().second.shape;
  s.scale = samples.front().first.scale;
  Eigen::Index pairs = 0;
  for (const auto& [fv, bev] : samples) {
    if (!(fv.shape == s.fv_shape) || !(bev.shape == s.bev_shape) || fv.channels() != bev.channels() ||
        fv.data.rows() != s.fv_shape.size() || bev.data.rows() != s.bev_shape.size()) {
      fail(ErrorCode::ShapeMismatch, "samples have inconsistent shapes");
    }
    pairs += fv.channels();
  }
  s.inputs.resize(pairs, s.fv_shape.size());
  s.targets.resize(pairs, s.bev_shape.size());
  Eigen::Index row = 0;
  for (const auto& [fv, bev] : samples) {
    s.inputs.middleRows(row, fv.channels()) = fv.data.transpose();
    s.targets.middleRows(row, bev.channels()) = bev.data.transpose();
    row += fv.channels();
  }
  return s;
}

}  // namespace

ViewRelationMap fit_vrm_least_squares(const std::vector<VrmSample>& samples, double ridge) {
  if (!(ridge >= 0.0)) fail(ErrorCode::InvalidArgument, "ridge must be non-negative");
  const StackedSamples s = stack(samples);
  const Eigen::Index n_in = s.fv_shape.size();
  const Eigen::Index pairs = s.inputs.rows();

  ViewRelationMap map{s.fv_shape, s.bev_shape, s.scale, {}};
  // Solve inputs * M^T = targets, one column of M^T per BEV pixel.
  if (ridge == 0.0) {
    if (pairs < n_in) {
      fail(ErrorCode::InsufficientRank, std::to_string(pairs) + " sample pairs cannot determine " +
                                            std::to_string(n_in) + " inputs without regularisation");
    }
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(s.inputs);
    if (qr.rank() < n_in) {
      fail(ErrorCode::InsufficientRank,
           "sample inputs have rank " + std::to_string(qr.rank()) + " < " + std::to_string(n_in));
    }
    map.matrix = qr.solve(s.targets).transpose();
  } else {
    Eigen::MatrixXd a(pairs + n_in, n_in);
    a.topRows(pairs) = s.inputs;
    a.bottomRows(n_in) = std::sqrt(ridge) * Eigen::MatrixXd::Identity(n_in, n_in);
    Eigen::MatrixXd b = Eigen::MatrixXd::Zero(pairs + n_in, s.targets.cols());
    b.topRows(pairs) = s.targets;
    map.matrix = a.householderQr().solve(b).transpose();
  }
  return map;
}

double default_ridge(const std::vector<VrmSample>& samples) {
  const StackedSamples s = stack(samples);
  return 1e-6 * s.inputs.squaredNorm() / static_cast<double>(s.fv_shape.size());
}

FeatureTensor area_average_features(const Image& image, int scale) {
  if (scale <= 0 || image.width() < scale || image.height() < scale) {
    fail(ErrorCode::InvalidShape, "image is smaller than one feature block");
  }
  const FeatureShape shape{image.height() / scale, image.width() / scale};
  FeatureTensor out(shape, image.channels(), scale);
  const double inv_area = 1.0 / (static_cast<double>(scale) * scale);
  for (int i = 0; i < shape.height; ++i)
    for (int j = 0; j < shape.width; ++j)
      for (int ch = 0; ch < image.channels(); ++ch) {
        double sum = 0.0;
        for (int v = i * scale; v < (i + 1) * scale; ++v)
          for (int u = j * scale; u < (j + 1) * scale; ++u) sum += image.at(v, u, ch);
        out.at(i, j, ch) = sum * inv_area;
      }
  return out;
}

}  // namespace lanebev
