#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace lanebev {

struct GradientCheckReport {
  std::string term;
  int batches = 0;
  int resampled = 0;  // embedding batches redrawn because a hinge sat near its kink
  double max_relative_error = 0.0;
  bool passed = false;
};

struct GradientCheckOptions {
  int batches = 20;
  int rows = 10;
  int cols = 8;
  int embed_dim = 4;
  double step = 1e-5;
  double tolerance = 1e-5;
  double kink_margin = 1e-4;
};

/// Compares every analytic loss gradient with central finite differences on
/// random batches. The error of one batch is max_i |analytic_i - numeric_i|
/// divided by max_i |numeric_i| (norm-wise relative error).
std::vector<GradientCheckReport> run_gradient_suite(std::uint64_t seed, const GradientCheckOptions& options = {});

}  // namespace lanebev
