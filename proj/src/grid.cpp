#include "lanebev/grid.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <string>

#include "lanebev/errors.hpp"

namespace lanebev {

namespace {

int checked_count(double extent, double cell, const char* axis) {
  const double n = extent / cell;
  const double rounded = std::round(n);
  if (!(rounded >= 1.0) || std::abs(n - rounded) > 1e-9 * std::max(1.0, rounded)) {
    fail(ErrorCode::InvalidArgument,
         std::string("grid extent along ") + axis + " is not a positive multiple of the cell size");
  }
  return static_cast<int>(rounded);
}

}  // namespace

int GridSpec::rows() const { return checked_count(x_max - x_min, cell, "x"); }
int GridSpec::cols() const { return checked_count(y_max - y_min, cell, "y"); }

void GridSpec::validate() const {
  if (!(cell > 0.0)) fail(ErrorCode::InvalidArgument, "cell size must be positive");
  (void)rows();
  (void)cols();
}

std::optional<Eigen::Vector2d> Lane3D::interpolate(double x) const {
  if (points.size() < 2 || x < x_begin() || x > x_end()) return std::nullopt;
  auto upper = std::lower_bound(points.begin(), points.end(), x,
                                [](const Eigen::Vector3d& p, double v) { return p.x() < v; });
  if (upper == points.begin()) return Eigen::Vector2d(upper->y(), upper->z());
  const Eigen::Vector3d& b = *upper;
  const Eigen::Vector3d& a = *(upper - 1);
  if (b.x() == x) return Eigen::Vector2d(b.y(), b.z());
  const double t = (x - a.x()) / (b.x() - a.x());
  return Eigen::Vector2d(a.y() + t * (b.y() - a.y()), a.z() + t * (b.z() - a.z()));
}

std::optional<Lane3D> make_lane(int id, std::vector<Eigen::Vector3d> points) {
  std::stable_sort(points.begin(), points.end(),
                   [](const Eigen::Vector3d& a, const Eigen::Vector3d& b) { return a.x() < b.x(); });
  points.erase(std::unique(points.begin(), points.end(),
                           [](const Eigen::Vector3d& a, const Eigen::Vector3d& b) { return a.x() == b.x(); }),
               points.end());
  if (points.size() < 2) return std::nullopt;
  return Lane3D{id, std::move(points)};
}

GridTensors GridTensors::zeros(int rows, int cols, int embed_dim) {
  GridTensors t;
  t.confidence = RowMatrixXd::Zero(rows, cols);
  t.offset = RowMatrixXd::Zero(rows, cols);
  t.height = RowMatrixXd::Zero(rows, cols);
  t.instance = RowMatrixXi::Zero(rows, cols);
  t.embedding = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(rows) * cols, embed_dim);
  return t;
}

GridTensors encode_lanes(const std::vector<Lane3D>& lanes, const GridSpec& spec) {
  spec.validate();
  const int rows = spec.rows();
  const int cols = spec.cols();
  GridTensors out = GridTensors::zeros(rows, cols);

  // Winner per cell: distance of the lane sample to the cell centre, then id.
  RowMatrixXd best_distance = RowMatrixXd::Constant(rows, cols, std::numeric_limits<double>::infinity());
  RowMatrixXd height_sum = RowMatrixXd::Zero(rows, cols);
  RowMatrixXi height_count = RowMatrixXi::Zero(rows, cols);
  const double below_half = std::nextafter(0.5, 0.0);

  for (int r = 0; r < rows; ++r) {
    const double x = spec.row_center(r);
    for (const Lane3D& lane : lanes) {
      const auto yz = lane.interpolate(x);
      if (!yz) continue;
      const double y = (*yz)(0);
      const double z = (*yz)(1);
      if (!(y >= spec.y_min && y < spec.y_max)) continue;

      int c = static_cast<int>(std::floor((y - spec.y_min) / spec.cell));
      c = std::clamp(c, 0, cols - 1);
      double offset = (y - spec.col_center(c)) / spec.cell;
      if (offset >= 0.5 && c + 1 < cols) {
        ++c;
        offset -= 1.0;
      } else if (offset < -0.5 && c > 0) {
        --c;
        offset += 1.0;
      }
      offset = std::clamp(offset, -0.5, below_half);

      const double distance = std::abs(y - spec.col_center(c));
      const int current = out.instance(r, c);
      if (current == lane.id) {
        height_sum(r, c) += z;
        ++height_count(r, c);
        continue;
      }
      const bool wins = current == 0 || distance < best_distance(r, c) ||
                        (distance == best_distance(r, c) && lane.id < current);
      if (!wins) continue;
      best_distance(r, c) = distance;
      out.instance(r, c) = lane.id;
      out.confidence(r, c) = 1.0;
      out.offset(r, c) = offset;
      height_sum(r, c) = z;
      height_count(r, c) = 1;
    }
  }

  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c)
      if (height_count(r, c) > 0) out.height(r, c) = height_sum(r, c) / height_count(r, c);
  return out;
}

std::vector<int> instance_ids(const RowMatrixXi& instance) {
  std::set<int> ids;
  for (Eigen::Index i = 0; i < instance.size(); ++i)
    if (instance.data()[i] > 0) ids.insert(instance.data()[i]);
  return {ids.begin(), ids.end()};
}

Eigen::MatrixXd simplex_vertices(int count, int dim, double edge) {
  if (count < 0 || dim < 0) fail(ErrorCode::InvalidArgument, "negative simplex size");
  if (count > dim + 1) {
    fail(ErrorCode::TooManyInstances, std::to_string(count) + " instances need an embedding of dimension >= " +
                                          std::to_string(count - 1));
  }
  Eigen::MatrixXd v = Eigen::MatrixXd::Zero(dim, count);
  const double s = edge / std::sqrt(2.0);
  for (int i = 0; i < std::min(count, dim); ++i) v(i, i) = s;
  if (count == dim + 1 && dim > 0) {
    const double a = s * (1.0 - std::sqrt(1.0 + dim)) / dim;
    v.col(dim).setConstant(a);
  }
  return v;
}

GridTensors ideal_prediction(const GridTensors& gt, const GridSpec& spec, double margin_scale, int embed_dim,
                             double delta_d) {
  if (gt.rows() != spec.rows() || gt.cols() != spec.cols()) {
    fail(ErrorCode::ShapeMismatch, "ground truth does not match the grid spec");
  }
  const std::vector<int> ids = instance_ids(gt.instance);
  const Eigen::MatrixXd vertices =
      simplex_vertices(static_cast<int>(ids.size()), embed_dim, margin_scale * 2.0 * delta_d);

  GridTensors pred = gt;
  pred.embedding = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(gt.rows()) * gt.cols(), embed_dim);
  for (int r = 0; r < gt.rows(); ++r) {
    for (int c = 0; c < gt.cols(); ++c) {
      const int id = gt.instance(r, c);
      if (id <= 0) continue;
      const auto k = std::lower_bound(ids.begin(), ids.end(), id) - ids.begin();
      pred.embedding.row(static_cast<Eigen::Index>(r) * gt.cols() + c) = vertices.col(k).transpose();
    }
  }
  return pred;
}

}  // namespace lanebev
