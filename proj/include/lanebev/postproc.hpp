#pragma once

// Turns the four BEV head tensors into lane instances: confidence gate,
// single-pass embedding clustering with running-mean centres, offset and
// height application, then per-lane polynomial fitting.

#include <Eigen/Dense>

#include <vector>

#include "lanebev/grid.hpp"

namespace lanebev {

struct DecodeParams {
  double s_threshold = 0.5;
  double d_gap = 1.5;
  int min_points = 4;
  int fit_degree = 3;

  void validate() const;
};

struct GridCell {
  int row = 0;
  int col = 0;
  friend bool operator==(const GridCell&, const GridCell&) = default;
};

struct LaneInstance {
  int cluster_id = 0;
  std::vector<GridCell> cells;           // assignment order
  std::vector<Eigen::Vector3d> points;   // metric (x, y, z), same order as cells
  Eigen::VectorXd center;                // final running-mean embedding
};

struct Polynomial {
  // y = sum_k coeffs[k] * t^k with t = (x - x_center) / x_scale.
  Eigen::VectorXd coeffs;
  double x_center = 0.0;
  double x_scale = 1.0;

  double operator()(double x) const;
  int degree() const { return static_cast<int>(coeffs.size()) - 1; }
};

struct FittedLane {
  int cluster_id = 0;
  Polynomial y;
  Polynomial z;
  double x_min = 0.0;
  double x_max = 0.0;
};

/// Cells are scanned column by column, rows inner. A cell joins the nearest
/// centre when that distance is below d_gap, otherwise it opens a new centre.
/// Clusters smaller than min_points are dropped; cluster_id is the index of
/// the centre in creation order.
std::vector<LaneInstance> decode_grid(const GridTensors& pred, const GridSpec& spec, const DecodeParams& params);

/// Least-squares polynomial in a centred, scaled abscissa; the degree is
/// capped by the number of distinct abscissae minus one.
Polynomial fit_polynomial(const std::vector<double>& xs, const std::vector<double>& values, int degree);

std::vector<FittedLane> fit_lanes(const std::vector<LaneInstance>& instances, const DecodeParams& params);

/// Decoded instance as a road-frame lane (points sorted by x).
Lane3D to_lane(const LaneInstance& instance);

}  // namespace lanebev
