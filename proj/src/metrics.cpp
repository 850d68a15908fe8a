#include "lanebev/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "lanebev/errors.hpp"

namespace lanebev {

namespace {

constexpr double kNoOverlapCost = 1e12;

}  // namespace

std::vector<double> EvalConfig::default_sample_xs() {
  std::vector<double> xs;
  for (int x = 3; x < 103; x += 5) xs.push_back(x);
  return xs;
}

void EvalConfig::validate() const {
  if (!std::is_sorted(sample_xs.begin(), sample_xs.end())) {
    fail(ErrorCode::InvalidArgument, "sample_xs must be sorted ascending");
  }
  if (!(match_ratio > 0.0 && match_ratio <= 1.0)) fail(ErrorCode::InvalidArgument, "match_ratio must lie in (0, 1]");
  if (!(match_threshold > 0.0)) fail(ErrorCode::InvalidArgument, "match_threshold must be positive");
  if (!(x_max > x_min && y_max > y_min)) fail(ErrorCode::InvalidArgument, "evaluation window is empty");
}

std::vector<ResampledPoint> resample_lane(const Lane3D& lane, const std::vector<double>& xs) {
  std::vector<ResampledPoint> out;
  out.reserve(xs.size());
  for (double x : xs) {
    const auto yz = lane.interpolate(x);
    out.push_back(yz ? ResampledPoint{x, (*yz)(0), (*yz)(1), true} : ResampledPoint{x, 0.0, 0.0, false});
  }
  return out;
}

std::optional<Lane3D> prune_lane(const Lane3D& lane, const EvalConfig& cfg) {
  Lane3D out{lane.id, {}};
  for (const auto& p : lane.points) {
    if (p.x() >= cfg.x_min && p.x() <= cfg.x_max && p.y() >= cfg.y_min && p.y() <= cfg.y_max) {
      out.points.push_back(p);
    }
  }
  if (out.points.size() < 2) return std::nullopt;
  return out;
}

std::vector<int> solve_assignment(const Eigen::MatrixXd& cost) {
  const Eigen::Index n_rows = cost.rows();
  const Eigen::Index n_cols = cost.cols();
  if (n_rows == 0 || n_cols == 0) return std::vector<int>(n_rows, -1);
  const bool transposed = n_rows > n_cols;
  const Eigen::MatrixXd a = transposed ? Eigen::MatrixXd(cost.transpose()) : cost;
  const Eigen::Index n = a.rows();  // n <= m
  const Eigen::Index m = a.cols();

  // Shortest augmenting path with potentials, 1-based work arrays.
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> u(n + 1, 0.0), v(m + 1, 0.0);
  std::vector<Eigen::Index> p(m + 1, 0), way(m + 1, 0);
  for (Eigen::Index i = 1; i <= n; ++i) {
    p[0] = i;
    Eigen::Index j0 = 0;
    std::vector<double> minv(m + 1, inf);
    std::vector<char> used(m + 1, 0);
    do {
      used[j0] = 1;
      const Eigen::Index i0 = p[j0];
      double delta = inf;
      Eigen::Index j1 = 0;
      for (Eigen::Index j = 1; j <= m; ++j) {
        if (used[j]) continue;
        const double cur = a(i0 - 1, j - 1) - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (Eigen::Index j = 0; j <= m; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      const Eigen::Index j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0 != 0);
  }

  std::vector<int> assignment(n_rows, -1);
  for (Eigen::Index j = 1; j <= m; ++j) {
    if (p[j] == 0) continue;
    const auto row = static_cast<int>(p[j] - 1);
    const auto col = static_cast<int>(j - 1);
    if (transposed) assignment[col] = row;
    else assignment[row] = col;
  }
  return assignment;
}

Matching match_lanes(const std::vector<Lane3D>& preds, const std::vector<Lane3D>& gts, const EvalConfig& cfg) {
  cfg.validate();
  struct Sampled {
    int index;
    std::vector<ResampledPoint> points;
  };
  auto sample_all = [&](const std::vector<Lane3D>& lanes) {
    std::vector<Sampled> out;
    for (std::size_t i = 0; i < lanes.size(); ++i) {
      if (auto pruned = prune_lane(lanes[i], cfg)) {
        out.push_back({static_cast<int>(i), resample_lane(*pruned, cfg.sample_xs)});
      }
    }
    return out;
  };
  const std::vector<Sampled> p = sample_all(preds);
  const std::vector<Sampled> g = sample_all(gts);

  Matching result;
  result.num_pred = static_cast<int>(p.size());
  result.num_gt = static_cast<int>(g.size());
  if (p.empty() || g.empty()) return result;

  const std::size_t n_samples = cfg.sample_xs.size();
  const double nan = std::numeric_limits<double>::quiet_NaN();
  std::vector<std::vector<std::vector<double>>> dist(p.size(), std::vector<std::vector<double>>(g.size()));
  Eigen::MatrixXd cost(p.size(), g.size());
  for (std::size_t i = 0; i < p.size(); ++i) {
    for (std::size_t j = 0; j < g.size(); ++j) {
      auto& d = dist[i][j];
      d.assign(n_samples, nan);
      double sum = 0.0;
      int count = 0;
      for (std::size_t k = 0; k < n_samples; ++k) {
        const auto& a = p[i].points[k];
        const auto& b = g[j].points[k];
        if (!a.valid || !b.valid) continue;
        d[k] = std::hypot(a.y - b.y, a.z - b.z);
        sum += d[k];
        ++count;
      }
      cost(i, j) = count > 0 ? sum / count : kNoOverlapCost;
    }
  }

  const std::vector<int> assignment = solve_assignment(cost);
  for (std::size_t i = 0; i < p.size(); ++i) {
    const int j = assignment[i];
    if (j < 0 || cost(i, j) >= kNoOverlapCost) continue;
    LanePair pair;
    pair.pred = p[i].index;
    pair.gt = g[j].index;
    pair.cost = cost(i, j);
    pair.distances = dist[i][j];
    int gt_valid = 0;
    int close = 0;
    for (std::size_t k = 0; k < n_samples; ++k) {
      if (!g[j].points[k].valid) continue;
      ++gt_valid;
      if (!std::isnan(pair.distances[k]) && pair.distances[k] <= cfg.match_threshold) ++close;
    }
    pair.true_positive = gt_valid > 0 && close >= cfg.match_ratio * gt_valid;
    if (pair.true_positive) ++result.true_positives;
    result.pairs.push_back(std::move(pair));
  }
  std::sort(result.pairs.begin(), result.pairs.end(),
            [](const LanePair& a, const LanePair& b) { return a.gt < b.gt; });
  return result;
}

std::optional<double> EvalAccumulator::ErrorSum::mean() const {
  if (count == 0) return std::nullopt;
  return sum / static_cast<double>(count);
}

EvalAccumulator::EvalAccumulator(EvalConfig cfg) : cfg_(std::move(cfg)) { cfg_.validate(); }

void EvalAccumulator::add_frame(const std::vector<Lane3D>& preds, const std::vector<Lane3D>& gts) {
  const Matching matching = match_lanes(preds, gts, cfg_);
  tp_ += matching.true_positives;
  num_pred_ += matching.num_pred;
  num_gt_ += matching.num_gt;

  for (const LanePair& pair : matching.pairs) {
    if (!pair.true_positive) continue;
    const auto pruned_pred = prune_lane(preds[pair.pred], cfg_);
    const auto pruned_gt = prune_lane(gts[pair.gt], cfg_);
    const auto a = resample_lane(*pruned_pred, cfg_.sample_xs);
    const auto b = resample_lane(*pruned_gt, cfg_.sample_xs);
    for (std::size_t k = 0; k < a.size(); ++k) {
      if (!a[k].valid || !b[k].valid) continue;
      const bool near = a[k].x <= cfg_.near_limit;
      ErrorSum& xs = near ? x_near_ : x_far_;
      ErrorSum& zs = near ? z_near_ : z_far_;
      xs.sum += std::abs(a[k].y - b[k].y);
      ++xs.count;
      zs.sum += std::abs(a[k].z - b[k].z);
      ++zs.count;
    }
  }
}

EvalResult EvalAccumulator::result() const {
  EvalResult r;
  r.true_positives = tp_;
  r.num_pred = num_pred_;
  r.num_gt = num_gt_;
  if (num_pred_ == 0 && num_gt_ == 0) {
    r.precision = r.recall = 1.0;
  } else {
    r.precision = num_pred_ > 0 ? static_cast<double>(tp_) / num_pred_ : 0.0;
    r.recall = num_gt_ > 0 ? static_cast<double>(tp_) / num_gt_ : 0.0;
  }
  r.f_score = r.precision + r.recall > 0.0 ? 2.0 * r.precision * r.recall / (r.precision + r.recall) : 0.0;
  r.x_err_near = x_near_.mean();
  r.x_err_far = x_far_.mean();
  r.z_err_near = z_near_.mean();
  r.z_err_far = z_far_.mean();
  return r;
}

EvalResult evaluate(const std::vector<Lane3D>& preds, const std::vector<Lane3D>& gts, const EvalConfig& cfg) {
  EvalAccumulator acc(cfg);
  acc.add_frame(preds, gts);
  return acc.result();
}

}  // namespace lanebev
