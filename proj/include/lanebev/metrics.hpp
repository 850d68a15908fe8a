#pragma once

// Point-wise 3D lane evaluation: lanes are resampled at fixed forward
// positions, paired one-to-one by minimum mean distance, and a pair is a true
// positive when enough of the ground-truth samples lie within the match
// threshold. Lateral (X) and height (Z) errors are split into near and far
// ranges.

#include <Eigen/Dense>

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "lanebev/grid.hpp"

namespace lanebev {

struct EvalConfig {
  std::vector<double> sample_xs = default_sample_xs();
  double match_threshold = 1.5;
  double match_ratio = 0.75;
  double near_limit = 40.0;
  // Lane points outside this road window are pruned before resampling.
  double x_min = 3.0;
  double x_max = 103.0;
  double y_min = -10.0;
  double y_max = 10.0;

  static std::vector<double> default_sample_xs();
  void validate() const;
};

struct ResampledPoint {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;
  bool valid = false;
};

std::vector<ResampledPoint> resample_lane(const Lane3D& lane, const std::vector<double>& xs);

/// Keeps the points of `lane` inside the config's road window; nullopt when
/// fewer than two remain.
std::optional<Lane3D> prune_lane(const Lane3D& lane, const EvalConfig& cfg);

struct LanePair {
  int pred = 0;
  int gt = 0;
  double cost = 0.0;
  bool true_positive = false;
  std::vector<double> distances;  // per sample x; NaN where not co-valid
};

struct Matching {
  std::vector<LanePair> pairs;
  int true_positives = 0;
  int num_pred = 0;
  int num_gt = 0;
};

/// Minimum-cost one-to-one assignment of an n x m cost matrix (Hungarian).
/// Entry i of the result is the column assigned to row i, or -1.
std::vector<int> solve_assignment(const Eigen::MatrixXd& cost);

Matching match_lanes(const std::vector<Lane3D>& preds, const std::vector<Lane3D>& gts, const EvalConfig& cfg);

struct EvalResult {
  double f_score = 0.0;
  double precision = 0.0;
  double recall = 0.0;
  std::optional<double> x_err_near;
  std::optional<double> x_err_far;
  std::optional<double> z_err_near;
  std::optional<double> z_err_far;
  int true_positives = 0;
  int num_pred = 0;
  int num_gt = 0;
};

/// Micro-averaging accumulator: counts and error sums are pooled across
/// frames and the scores are computed once from the totals.
class EvalAccumulator {
 public:
  explicit EvalAccumulator(EvalConfig cfg = {});

  void add_frame(const std::vector<Lane3D>& preds, const std::vector<Lane3D>& gts);
  EvalResult result() const;

 private:
  struct ErrorSum {
    double sum = 0.0;
    long count = 0;
    std::optional<double> mean() const;
  };
  EvalConfig cfg_;
  int tp_ = 0;
  int num_pred_ = 0;
  int num_gt_ = 0;
  ErrorSum x_near_, x_far_, z_near_, z_far_;
};

EvalResult evaluate(const std::vector<Lane3D>& preds, const std::vector<Lane3D>& gts, const EvalConfig& cfg = {});

}  // namespace lanebev
