#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <map>

#include "lanebev/gradient_check.hpp"
#include "lanebev/losses.hpp"
#include "test_support.hpp"

using namespace lanebev;
using lanebev::testing::Gen;

namespace {

constexpr int kRows = 10;
constexpr int kCols = 8;

/// Central differences over every entry of `x`; returns the norm-wise
/// relative error against `analytic`.
template <typename Matrix, typename F>
double fd_error(Matrix x, const Matrix& analytic, F loss) {
  const double h = 1e-5;
  double diff = 0, ref = 0;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const double saved = x.data()[i];
    x.data()[i] = saved + h;
    const double plus = loss(x);
    x.data()[i] = saved - h;
    const double minus = loss(x);
    x.data()[i] = saved;
    const double numeric = (plus - minus) / (2 * h);
    diff = std::max(diff, std::abs(numeric - analytic.data()[i]));
    ref = std::max(ref, std::abs(numeric));
  }
  return diff / ref;
}

struct Batch {
  PredictionBatch pred = PredictionBatch::zeros(kRows, kCols, 4);
  GridTensors gt = GridTensors::zeros(kRows, kCols);
};

Batch random_batch(Gen& gen) {
  Batch b;
  for (Eigen::Index i = 0; i < b.gt.instance.size(); ++i) {
    const int id = gen.integer(0, 3);
    b.gt.instance.data()[i] = id;
    b.gt.confidence.data()[i] = id > 0;
    b.gt.offset.data()[i] = gen.uniform(-0.5, 0.5);
    b.gt.height.data()[i] = gen.normal(2);
    b.pred.raw_confidence.data()[i] = gen.normal(3);
    b.pred.raw_offset.data()[i] = gen.normal(2);
    b.pred.height.data()[i] = gen.normal(2);
  }
  for (Eigen::Index i = 0; i < b.pred.embedding.size(); ++i) b.pred.embedding.data()[i] = gen.normal(1.5);
  return b;
}

// Oracle: the discriminative loss written straight from its definition.
double embed_reference(const Eigen::MatrixXd& e, const RowMatrixXi& inst, double dv, double dd) {
  std::map<int, std::vector<Eigen::Index>> groups;
  for (Eigen::Index i = 0; i < inst.size(); ++i)
    if (inst.data()[i] > 0) groups[inst.data()[i]].push_back(i);
  if (groups.empty()) return 0;
  std::vector<Eigen::VectorXd> mu;
  double pull = 0;
  for (auto& [id, idx] : groups) {
    Eigen::VectorXd m = Eigen::VectorXd::Zero(e.cols());
    for (auto i : idx) m += e.row(i).transpose();
    m /= double(idx.size());
    double s = 0;
    for (auto i : idx) s += std::pow(std::max(0.0, (m - e.row(i).transpose()).norm() - dv), 2);
    pull += s / double(idx.size());
    mu.push_back(m);
  }
  const double c = double(mu.size());
  double push = 0;
  for (std::size_t a = 0; a < mu.size(); ++a)
    for (std::size_t b = 0; b < mu.size(); ++b)
      if (a != b) push += std::pow(std::max(0.0, 2 * dd - (mu[a] - mu[b]).norm()), 2);
  return pull / c + (mu.size() > 1 ? push / (c * (c - 1)) : 0.0);
}

}  // namespace

TEST_CASE("saturated correct logits give near-zero BCE") {
  Gen gen(1);
  Batch b = random_batch(gen);
  for (Eigen::Index i = 0; i < b.gt.confidence.size(); ++i)
    b.pred.raw_confidence.data()[i] = b.gt.confidence.data()[i] > 0 ? 20.0 : -20.0;
  CHECK(conf_loss(b.pred, b.gt).value < 1e-6 * kRows * kCols);
}

TEST_CASE("zero logits give ln 2 per cell") {
  Gen gen(2);
  Batch b = random_batch(gen);
  b.pred.raw_confidence.setZero();
  CHECK(conf_loss(b.pred, b.gt).value == doctest::Approx(kRows * kCols * std::log(2.0)).epsilon(1e-14));
  CHECK(seg_loss_2d(b.pred.raw_confidence, b.gt.instance).value ==
        doctest::Approx(kRows * kCols * std::log(2.0)).epsilon(1e-14));
}

TEST_CASE("BCE clamp has zero slope") {
  const RowMatrixXd logits = RowMatrixXd::Constant(1, 2, 40.0);
  RowMatrixXd targets(1, 2);
  targets << 1.0, 0.0;
  const GridLoss l = binary_cross_entropy(logits, targets);
  CHECK(l.grad.isZero());
  CHECK(l.value == doctest::Approx(-std::log(1e-7) - std::log(1 - 1e-7)));
}

TEST_CASE("offset loss vanishes at the exact inverse sigmoid") {
  Gen gen(3);
  Batch b = random_batch(gen);
  for (Eigen::Index i = 0; i < b.gt.offset.size(); ++i) {
    const double p = b.gt.offset.data()[i] + 0.5;
    b.pred.raw_offset.data()[i] = std::log(p / (1 - p));
  }
  CHECK(offset_loss(b.pred, b.gt).value < 1e-28);
  b.gt.instance.setZero();
  b.pred.raw_offset.setRandom();
  CHECK(offset_loss(b.pred, b.gt).value == 0.0);
}

TEST_CASE("height loss examples") {
  Gen gen(4);
  Batch b = random_batch(gen);
  b.pred.height = b.gt.height;
  CHECK(height_loss(b.pred, b.gt).value == 0.0);
  b.pred.height.array() += 0.1;
  const double n = (b.gt.instance.array() > 0).count();
  CHECK(height_loss(b.pred, b.gt).value == doctest::Approx(0.01 * n).epsilon(1e-12));
}

TEST_CASE("masked losses ignore background predictions") {
  Gen gen(5);
  Batch b = random_batch(gen);
  const double offset = offset_loss(b.pred, b.gt).value;
  const double height = height_loss(b.pred, b.gt).value;
  for (Eigen::Index i = 0; i < b.gt.instance.size(); ++i) {
    if (b.gt.instance.data()[i] > 0) continue;
    b.pred.raw_offset.data()[i] = gen.normal(50);
    b.pred.height.data()[i] = gen.normal(50);
  }
  CHECK(offset_loss(b.pred, b.gt).value == offset);
  CHECK(height_loss(b.pred, b.gt).value == height);
}

TEST_CASE("embedding loss examples") {
  RowMatrixXi inst(1, 4);
  inst << 1, 1, 2, 2;
  Eigen::MatrixXd e = Eigen::MatrixXd::Zero(4, 2);
  // Clusters at their centres, centres 2 * delta_d + 1 apart.
  e.row(2) << 7.0, 0.0;
  e.row(3) << 7.0, 0.0;
  CHECK(embed_loss(e, inst).value == 0.0);

  RowMatrixXi single(1, 3);
  single << 1, 1, 1;
  Eigen::MatrixXd near(3, 2);
  near << 0.1, 0.0, -0.1, 0.2, 0.0, -0.2;
  CHECK(embed_loss(near, single).value == 0.0);

  CHECK(embed_loss(Eigen::MatrixXd::Ones(4, 2), RowMatrixXi::Zero(1, 4)).value == 0.0);
  CHECK_THROWS_AS(embed_loss(Eigen::MatrixXd::Zero(3, 2), inst), Error);
  CHECK_THROWS_AS(embed_loss(e, inst, {1.0, 0.5}), Error);
}

TEST_CASE("embedding loss matches the direct definition and is rotation invariant") {
  Gen gen(6);
  for (int trial = 0; trial < 20; ++trial) {
    const Batch b = random_batch(gen);
    const double value = embed_loss(b.pred.embedding, b.gt.instance).value;
    CHECK(value == doctest::Approx(embed_reference(b.pred.embedding, b.gt.instance, 0.5, 3.0)).epsilon(1e-12));

    Eigen::Matrix4d q = Eigen::Matrix4d::Random().householderQr().householderQ();
    const Eigen::MatrixXd rotated = b.pred.embedding * q.transpose();
    CHECK(embed_loss(rotated, b.gt.instance).value == doctest::Approx(value).epsilon(1e-12));
  }
}

TEST_CASE("analytic gradients match central differences") {
  Gen gen(7);
  double conf = 0, offset = 0, height = 0, embed = 0, seg = 0;
  for (int trial = 0; trial < 20; ++trial) {
    Batch b = random_batch(gen);
    conf = std::max(conf, fd_error(b.pred.raw_confidence, conf_loss(b.pred, b.gt).grad, [&](const RowMatrixXd& x) {
      PredictionBatch p = b.pred;
      p.raw_confidence = x;
      return conf_loss(p, b.gt).value;
    }));
    offset = std::max(offset, fd_error(b.pred.raw_offset, offset_loss(b.pred, b.gt).grad, [&](const RowMatrixXd& x) {
      PredictionBatch p = b.pred;
      p.raw_offset = x;
      return offset_loss(p, b.gt).value;
    }));
    height = std::max(height, fd_error(b.pred.height, height_loss(b.pred, b.gt).grad, [&](const RowMatrixXd& x) {
      PredictionBatch p = b.pred;
      p.height = x;
      return height_loss(p, b.gt).value;
    }));
    embed = std::max(embed, fd_error(b.pred.embedding, embed_loss(b.pred.embedding, b.gt.instance).grad,
                                     [&](const Eigen::MatrixXd& x) { return embed_loss(x, b.gt.instance).value; }));
    seg = std::max(seg, fd_error(b.pred.raw_offset, seg_loss_2d(b.pred.raw_offset, b.gt.instance).grad,
                                 [&](const RowMatrixXd& x) { return seg_loss_2d(x, b.gt.instance).value; }));
  }
  CHECK(conf < 1e-6);
  CHECK(offset < 1e-6);
  CHECK(height < 1e-8);
  CHECK(embed < 1e-5);
  CHECK(seg < 1e-6);
}

TEST_CASE("library gradient suite agrees") {
  for (std::uint64_t seed : {0u, 1u, 2u}) {
    for (const auto& r : run_gradient_suite(seed)) {
      INFO(r.term);
      CHECK(r.batches == 20);
      CHECK(r.passed);
    }
  }
}

TEST_CASE("total loss is the weighted sum of its terms") {
  Gen gen(8);
  const Batch b = random_batch(gen);
  FrontViewPrediction fv{RowMatrixXd::Random(6, 9), Eigen::MatrixXd::Random(54, 4) * 3};
  FrontViewTruth fv_gt{RowMatrixXi::Zero(6, 9)};
  for (int c = 0; c < 9; ++c) fv_gt.instance(c % 6, c) = 1 + c % 2;

  const double conf = conf_loss(b.pred, b.gt).value;
  CHECK(total_loss(b.pred, b.gt, fv, fv_gt, {1, 0, 0, 0, 0, 0}) == conf);
  CHECK(total_loss(b.pred, b.gt, fv, fv_gt, {0, 0, 0, 0, 0, 0}) == 0.0);
  const double sum = conf + embed_reference(b.pred.embedding, b.gt.instance, 0.5, 3.0) +
                     offset_loss(b.pred, b.gt).value + height_loss(b.pred, b.gt).value +
                     seg_loss_2d(fv.raw_segmentation, fv_gt.instance).value +
                     embed_reference(fv.embedding, fv_gt.instance, 0.5, 3.0);
  CHECK(std::abs(total_loss(b.pred, b.gt, fv, fv_gt, {}) - sum) < 1e-12 * std::max(1.0, sum));
  CHECK_THROWS_AS(total_loss(b.pred, b.gt, fv, fv_gt, {-1, 0, 0, 0, 0, 0}), Error);
}

TEST_CASE("every loss is non-negative and shape mismatches are rejected") {
  Gen gen(9);
  for (int trial = 0; trial < 20; ++trial) {
    const Batch b = random_batch(gen);
    CHECK(conf_loss(b.pred, b.gt).value >= 0);
    CHECK(offset_loss(b.pred, b.gt).value >= 0);
    CHECK(height_loss(b.pred, b.gt).value >= 0);
    CHECK(embed_loss(b.pred.embedding, b.gt.instance).value >= 0);
  }
  Batch b;
  b.pred.height = RowMatrixXd::Zero(3, 3);
  try {
    height_loss(b.pred, b.gt);
    FAIL("expected ShapeMismatch");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::ShapeMismatch);
  }
}
