#include "lanebev/postproc.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "lanebev/errors.hpp"

namespace lanebev {

void DecodeParams::validate() const {
  if (!(s_threshold > 0.0 && s_threshold < 1.0)) fail(ErrorCode::InvalidArgument, "s_threshold must lie in (0, 1)");
  if (!(d_gap > 0.0)) fail(ErrorCode::InvalidArgument, "d_gap must be positive");
  if (min_points < 2) fail(ErrorCode::InvalidArgument, "min_points must be at least 2");
  if (fit_degree < 1) fail(ErrorCode::InvalidArgument, "fit_degree must be at least 1");
}

double Polynomial::operator()(double x) const {
  const double t = (x - x_center) / x_scale;
  double value = 0.0;
  for (Eigen::Index k = coeffs.size() - 1; k >= 0; --k) value = value * t + coeffs(k);
  return value;
}

std::vector<LaneInstance> decode_grid(const GridTensors& pred, const GridSpec& spec, const DecodeParams& params) {
  params.validate();
  const int rows = spec.rows();
  const int cols = spec.cols();
  if (pred.rows() != rows || pred.cols() != cols || pred.offset.rows() != rows || pred.offset.cols() != cols ||
      pred.height.rows() != rows || pred.height.cols() != cols ||
      pred.embedding.rows() != static_cast<Eigen::Index>(rows) * cols) {
    fail(ErrorCode::ShapeMismatch, "prediction tensors do not match the grid spec");
  }

  struct Center {
    Eigen::VectorXd value;
    long count = 0;
  };
  std::vector<Center> centers;
  std::vector<LaneInstance> lanes;

  for (int c = 0; c < cols; ++c) {
    for (int r = 0; r < rows; ++r) {
      if (!(pred.confidence(r, c) >= params.s_threshold)) continue;
      const Eigen::VectorXd value = pred.embedding.row(static_cast<Eigen::Index>(r) * cols + c).transpose();

      double min_gap = params.d_gap + 1.0;
      int min_id = -1;
      for (std::size_t j = 0; j < centers.size(); ++j) {
        const double diff = (value - centers[j].value).norm();
        if (diff < min_gap) {
          min_gap = diff;
          min_id = static_cast<int>(j);
        }
      }
      if (min_gap < params.d_gap) {
        Center& center = centers[min_id];
        center.value += (value - center.value) / static_cast<double>(center.count + 1);
        ++center.count;
      } else {
        centers.push_back({value, 1});
        lanes.push_back(LaneInstance{static_cast<int>(centers.size()) - 1, {}, {}, {}});
        min_id = static_cast<int>(centers.size()) - 1;
      }

      const double offset = std::clamp(pred.offset(r, c), -0.5, 0.5);
      LaneInstance& lane = lanes[min_id];
      lane.cells.push_back({r, c});
      lane.points.emplace_back(spec.row_center(r), spec.y_min + (c + 0.5 + offset) * spec.cell, pred.height(r, c));
    }
  }

  std::vector<LaneInstance> kept;
  for (std::size_t j = 0; j < lanes.size(); ++j) {
    if (static_cast<int>(lanes[j].cells.size()) < params.min_points) continue;
    lanes[j].center = centers[j].value;
    kept.push_back(std::move(lanes[j]));
  }
  return kept;
}

Polynomial fit_polynomial(const std::vector<double>& xs, const std::vector<double>& values, int degree) {
  if (xs.size() != values.size() || xs.empty()) fail(ErrorCode::ShapeMismatch, "abscissae and values differ");
  const auto [lo, hi] = std::minmax_element(xs.begin(), xs.end());
  if (!(*hi > *lo)) fail(ErrorCode::DegenerateAbscissae, "all abscissae are equal");

  std::vector<double> distinct(xs);
  std::sort(distinct.begin(), distinct.end());
  distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
  const int used_degree = std::min(degree, static_cast<int>(distinct.size()) - 1);

  Polynomial poly;
  poly.x_center = 0.5 * (*lo + *hi);
  poly.x_scale = 0.5 * (*hi - *lo);
  const Eigen::Index n = static_cast<Eigen::Index>(xs.size());
  Eigen::MatrixXd vander(n, used_degree + 1);
  Eigen::VectorXd rhs(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double t = (xs[i] - poly.x_center) / poly.x_scale;
    double power = 1.0;
    for (int k = 0; k <= used_degree; ++k) {
      vander(i, k) = power;
      power *= t;
    }
    rhs(i) = values[i];
  }
  poly.coeffs = vander.colPivHouseholderQr().solve(rhs);
  return poly;
}

std::vector<FittedLane> fit_lanes(const std::vector<LaneInstance>& instances, const DecodeParams& params) {
  params.validate();
  std::vector<FittedLane> fitted;
  fitted.reserve(instances.size());
  for (const LaneInstance& inst : instances) {
    std::vector<double> xs, ys, zs;
    for (const auto& p : inst.points) {
      xs.push_back(p.x());
      ys.push_back(p.y());
      zs.push_back(p.z());
    }
    FittedLane lane;
    lane.cluster_id = inst.cluster_id;
    lane.y = fit_polynomial(xs, ys, params.fit_degree);
    lane.z = fit_polynomial(xs, zs, params.fit_degree);
    lane.x_min = *std::min_element(xs.begin(), xs.end());
    lane.x_max = *std::max_element(xs.begin(), xs.end());
    fitted.push_back(std::move(lane));
  }
  return fitted;
}

Lane3D to_lane(const LaneInstance& instance) {
  std::vector<Eigen::Vector3d> pts = instance.points;
  std::stable_sort(pts.begin(), pts.end(),
                   [](const Eigen::Vector3d& a, const Eigen::Vector3d& b) { return a.x() < b.x(); });
  // Several cells of one cluster in the same row collapse to their mean.
  std::vector<Eigen::Vector3d> merged;
  for (std::size_t i = 0; i < pts.size();) {
    std::size_t j = i;
    Eigen::Vector3d sum = Eigen::Vector3d::Zero();
    while (j < pts.size() && pts[j].x() == pts[i].x()) sum += pts[j++];
    merged.push_back(sum / static_cast<double>(j - i));
    i = j;
  }
  return Lane3D{instance.cluster_id + 1, std::move(merged)};
}

}  // namespace lanebev
