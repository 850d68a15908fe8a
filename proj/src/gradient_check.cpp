#include "lanebev/gradient_check.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <random>

#include "lanebev/losses.hpp"

namespace lanebev {

namespace {

template <typename Matrix>
double finite_difference_error(Matrix& input, const Matrix& analytic, const std::function<double()>& loss,
                               double step) {
  double max_diff = 0.0;
  double max_ref = 0.0;
  for (Eigen::Index i = 0; i < input.size(); ++i) {
    double& x = input.data()[i];
    const double saved = x;
    x = saved + step;
    const double plus = loss();
    x = saved - step;
    const double minus = loss();
    x = saved;
    const double numeric = (plus - minus) / (2.0 * step);
    max_diff = std::max(max_diff, std::abs(numeric - analytic.data()[i]));
    max_ref = std::max(max_ref, std::abs(numeric));
  }
  return max_ref > 0.0 ? max_diff / max_ref : max_diff;
}

struct Batch {
  PredictionBatch pred;
  GridTensors gt;
};

Batch draw_batch(std::mt19937_64& rng, const GradientCheckOptions& opt) {
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_int_distribution<int> label(0, 3);

  Batch b{PredictionBatch::zeros(opt.rows, opt.cols, opt.embed_dim), GridTensors::zeros(opt.rows, opt.cols)};
  for (Eigen::Index i = 0; i < b.gt.confidence.size(); ++i) {
    const int id = label(rng);
    b.gt.instance.data()[i] = id;
    b.gt.confidence.data()[i] = id > 0 ? 1.0 : 0.0;
    b.gt.offset.data()[i] = unit(rng) - 0.5;
    b.gt.height.data()[i] = 2.0 * normal(rng);
    b.pred.raw_confidence.data()[i] = 3.0 * normal(rng);
    b.pred.raw_offset.data()[i] = 2.0 * normal(rng);
    b.pred.height.data()[i] = 2.0 * normal(rng);
  }
  for (Eigen::Index i = 0; i < b.pred.embedding.size(); ++i) b.pred.embedding.data()[i] = 1.5 * normal(rng);
  return b;
}

/// True when some pull or push hinge of the embedding loss sits within
/// `margin` of its kink, where finite differences are not meaningful.
bool near_hinge_kink(const Eigen::MatrixXd& embedding, const RowMatrixXi& instance, const EmbedMargins& m,
                     double margin) {
  std::map<int, std::vector<Eigen::Index>> members;
  for (Eigen::Index i = 0; i < instance.size(); ++i)
    if (instance.data()[i] > 0) members[instance.data()[i]].push_back(i);
  std::vector<Eigen::VectorXd> means;
  for (const auto& [id, idx] : members) {
    Eigen::VectorXd mu = Eigen::VectorXd::Zero(embedding.cols());
    for (auto i : idx) mu += embedding.row(i).transpose();
    mu /= static_cast<double>(idx.size());
    for (auto i : idx)
      if (std::abs((embedding.row(i).transpose() - mu).norm() - m.delta_v) < margin) return true;
    means.push_back(mu);
  }
  for (std::size_t a = 0; a < means.size(); ++a)
    for (std::size_t b = a + 1; b < means.size(); ++b)
      if (std::abs(2.0 * m.delta_d - (means[a] - means[b]).norm()) < margin) return true;
  return false;
}

}  // namespace

std::vector<GradientCheckReport> run_gradient_suite(std::uint64_t seed, const GradientCheckOptions& opt) {
  std::mt19937_64 rng(seed);
  const EmbedMargins margins;
  GradientCheckReport conf{"conf"}, offset{"offset"}, embed{"embed"}, height{"height"}, seg{"seg2d"};

  for (int n = 0; n < opt.batches; ++n) {
    Batch b = draw_batch(rng, opt);
    while (near_hinge_kink(b.pred.embedding, b.gt.instance, margins, opt.kink_margin)) {
      ++embed.resampled;
      b = draw_batch(rng, opt);
    }

    const auto update = [](GradientCheckReport& r, double err) {
      r.max_relative_error = std::max(r.max_relative_error, err);
      ++r.batches;
    };

    update(conf, finite_difference_error(b.pred.raw_confidence, conf_loss(b.pred, b.gt).grad,
                                         [&] { return conf_loss(b.pred, b.gt).value; }, opt.step));
    update(offset, finite_difference_error(b.pred.raw_offset, offset_loss(b.pred, b.gt).grad,
                                           [&] { return offset_loss(b.pred, b.gt).value; }, opt.step));
    update(height, finite_difference_error(b.pred.height, height_loss(b.pred, b.gt).grad,
                                           [&] { return height_loss(b.pred, b.gt).value; }, opt.step));
    update(embed, finite_difference_error(
                      b.pred.embedding, embed_loss(b.pred.embedding, b.gt.instance, margins).grad,
                      [&] { return embed_loss(b.pred.embedding, b.gt.instance, margins).value; }, opt.step));

    // Front-view segmentation on the same-sized grid: lane pixels are the labelled cells.
    RowMatrixXi mask = (b.gt.instance.array() > 0).cast<int>();
    RowMatrixXd raw_seg = b.pred.raw_offset;
    update(seg, finite_difference_error(raw_seg, seg_loss_2d(raw_seg, mask).grad,
                                        [&] { return seg_loss_2d(raw_seg, mask).value; }, opt.step));
  }

  std::vector<GradientCheckReport> reports{conf, offset, embed, height, seg};
  for (auto& r : reports) r.passed = r.max_relative_error < opt.tolerance;
  return reports;
}

}  // namespace lanebev
