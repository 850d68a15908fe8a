#pragma once

// BEV grid geometry and the key-point grid encoding of 3D lanes.
//
// Rows index forward distance x, columns index lateral position y:
//   row r    <-> x in [x_min + r*cell, x_min + (r+1)*cell)
//   column c <-> y in [y_min + c*cell, y_min + (c+1)*cell)
// Offsets are lateral and stored in cell units.

#include <Eigen/Dense>

#include <optional>
#include <vector>

namespace lanebev {

using RowMatrixXd = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using RowMatrixXi = Eigen::Matrix<int, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

struct GridSpec {
  double x_min = 3.0;
  double x_max = 103.0;
  double y_min = -10.0;
  double y_max = 10.0;
  double cell = 0.5;

  int rows() const;
  int cols() const;
  int cells() const { return rows() * cols(); }

  double row_center(int r) const { return x_min + (r + 0.5) * cell; }
  double col_center(int c) const { return y_min + (c + 0.5) * cell; }

  /// Throws InvalidArgument unless the extents are positive multiples of cell.
  void validate() const;

  friend bool operator==(const GridSpec&, const GridSpec&) = default;
};

struct Lane3D {
  int id = 0;
  std::vector<Eigen::Vector3d> points;

  double x_begin() const { return points.front().x(); }
  double x_end() const { return points.back().x(); }

  /// Linear interpolation of (y, z) at x; empty outside the lane's span.
  std::optional<Eigen::Vector2d> interpolate(double x) const;
};

/// Sorts points by x and drops repeated abscissae (first occurrence wins).
/// Returns nullopt when fewer than two distinct points remain.
std::optional<Lane3D> make_lane(int id, std::vector<Eigen::Vector3d> points);

/// The four head tensors on an s1 x s2 grid. On the ground-truth side
/// `instance` labels lanes (0 = background); on the prediction side
/// `embedding` holds one D-vector per cell, row index r * cols + c.
struct GridTensors {
  RowMatrixXd confidence;
  RowMatrixXd offset;
  RowMatrixXd height;
  RowMatrixXi instance;
  Eigen::MatrixXd embedding;

  static GridTensors zeros(int rows, int cols, int embed_dim = 0);

  int rows() const { return static_cast<int>(confidence.rows()); }
  int cols() const { return static_cast<int>(confidence.cols()); }
  int embed_dim() const { return static_cast<int>(embedding.cols()); }
};

GridTensors encode_lanes(const std::vector<Lane3D>& lanes, const GridSpec& spec);

/// Distinct positive instance ids of `instance`, ascending.
std::vector<int> instance_ids(const RowMatrixXi& instance);

/// Regular simplex with `count` vertices in R^dim, pairwise distance
/// `edge`. Requires count <= dim + 1. Vertex i is column i.
Eigen::MatrixXd simplex_vertices(int count, int dim, double edge);

/// Oracle prediction for an encoded ground truth: confidence, offset and height
/// copied, every cell of the k-th instance embedded at the k-th simplex vertex
/// with edge margin_scale * 2 * delta_d, background cells at the origin.
GridTensors ideal_prediction(const GridTensors& gt, const GridSpec& spec, double margin_scale,
                             int embed_dim = 4, double delta_d = 3.0);

}  // namespace lanebev
