#include "lanebev/losses.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <vector>

#include "lanebev/errors.hpp"

namespace lanebev {

namespace {

constexpr double kProbabilityClamp = 1e-7;

template <typename A, typename B>
void require_same_shape(const A& a, const B& b, const char* what) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    fail(ErrorCode::ShapeMismatch, std::string(what) + ": shapes " + std::to_string(a.rows()) + "x" +
                                       std::to_string(a.cols()) + " and " + std::to_string(b.rows()) + "x" +
                                       std::to_string(b.cols()) + " differ");
  }
}

}  // namespace

PredictionBatch PredictionBatch::zeros(int rows, int cols, int embed_dim) {
  return PredictionBatch{RowMatrixXd::Zero(rows, cols), RowMatrixXd::Zero(rows, cols),
                         Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(rows) * cols, embed_dim),
                         RowMatrixXd::Zero(rows, cols)};
}

double sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

GridLoss binary_cross_entropy(const RowMatrixXd& logits, const RowMatrixXd& targets) {
  require_same_shape(logits, targets, "binary cross-entropy");
  GridLoss out{0.0, RowMatrixXd::Zero(logits.rows(), logits.cols())};
  for (Eigen::Index i = 0; i < logits.size(); ++i) {
    const double t = targets.data()[i];
    const double raw_p = sigmoid(logits.data()[i]);
    const double p = std::clamp(raw_p, kProbabilityClamp, 1.0 - kProbabilityClamp);
    out.value -= t * std::log(p) + (1.0 - t) * std::log(1.0 - p);
    // d/dz of -[t log p + (1-t) log(1-p)] with p = sigmoid(z) is p - t.
    const bool clamped = raw_p != p;
    out.grad.data()[i] = clamped ? 0.0 : p - t;
  }
  return out;
}

GridLoss conf_loss(const PredictionBatch& pred, const GridTensors& gt) {
  return binary_cross_entropy(pred.raw_confidence, gt.confidence);
}

GridLoss offset_loss(const PredictionBatch& pred, const GridTensors& gt) {
  require_same_shape(pred.raw_offset, gt.offset, "offset loss");
  require_same_shape(pred.raw_offset, gt.instance, "offset loss");
  GridLoss out{0.0, RowMatrixXd::Zero(gt.rows(), gt.cols())};
  for (Eigen::Index i = 0; i < pred.raw_offset.size(); ++i) {
    if (gt.instance.data()[i] <= 0) continue;
    const double s = sigmoid(pred.raw_offset.data()[i]);
    const double residual = (s - 0.5) - gt.offset.data()[i];
    out.value += residual * residual;
    out.grad.data()[i] = 2.0 * residual * s * (1.0 - s);
  }
  return out;
}

GridLoss height_loss(const PredictionBatch& pred, const GridTensors& gt) {
  require_same_shape(pred.height, gt.height, "height loss");
  require_same_shape(pred.height, gt.instance, "height loss");
  GridLoss out{0.0, RowMatrixXd::Zero(gt.rows(), gt.cols())};
  for (Eigen::Index i = 0; i < pred.height.size(); ++i) {
    if (gt.instance.data()[i] <= 0) continue;
    const double residual = pred.height.data()[i] - gt.height.data()[i];
    out.value += residual * residual;
    out.grad.data()[i] = 2.0 * residual;
  }
  return out;
}

EmbeddingLoss embed_loss(const Eigen::MatrixXd& embedding, const RowMatrixXi& instance,
                         const EmbedMargins& margins) {
  if (embedding.rows() != instance.size()) {
    fail(ErrorCode::ShapeMismatch, "embedding rows must equal the number of grid cells");
  }
  if (!(margins.delta_v > 0.0) || !(margins.delta_d > margins.delta_v)) {
    fail(ErrorCode::InvalidArgument, "embedding margins need delta_d > delta_v > 0");
  }
  const Eigen::Index dim = embedding.cols();
  EmbeddingLoss out{0.0, Eigen::MatrixXd::Zero(embedding.rows(), dim)};

  // Members per instance, ascending id, cells in row-major order.
  std::map<int, std::vector<Eigen::Index>> members;
  for (Eigen::Index i = 0; i < instance.size(); ++i)
    if (instance.data()[i] > 0) members[instance.data()[i]].push_back(i);
  const auto count = static_cast<Eigen::Index>(members.size());
  if (count == 0) return out;

  std::vector<const std::vector<Eigen::Index>*> clusters;
  Eigen::MatrixXd means(count, dim);
  for (const auto& [id, cells] : members) {
    const Eigen::Index k = static_cast<Eigen::Index>(clusters.size());
    clusters.push_back(&cells);
    Eigen::RowVectorXd sum = Eigen::RowVectorXd::Zero(dim);
    for (Eigen::Index i : cells) sum += embedding.row(i);
    means.row(k) = sum / static_cast<double>(cells.size());
  }

  // Gradients with respect to the means, scattered to members at the end.
  Eigen::MatrixXd mean_grad = Eigen::MatrixXd::Zero(count, dim);

  // Pull term.
  const double c = static_cast<double>(count);
  for (Eigen::Index k = 0; k < count; ++k) {
    const auto& cells = *clusters[k];
    const double weight = 1.0 / (c * static_cast<double>(cells.size()));
    for (Eigen::Index i : cells) {
      const Eigen::RowVectorXd diff = means.row(k) - embedding.row(i);
      const double dist = diff.norm();
      const double hinge = dist - margins.delta_v;
      if (hinge <= 0.0) continue;
      out.value += weight * hinge * hinge;
      const Eigen::RowVectorXd g = (2.0 * weight * hinge / dist) * diff;
      mean_grad.row(k) += g;
      out.grad.row(i) -= g;
    }
  }

  // Push term over ordered pairs.
  if (count > 1) {
    const double weight = 1.0 / (c * (c - 1.0));
    for (Eigen::Index a = 0; a < count; ++a) {
      for (Eigen::Index b = 0; b < count; ++b) {
        if (a == b) continue;
        const Eigen::RowVectorXd diff = means.row(a) - means.row(b);
        const double dist = diff.norm();
        const double hinge = 2.0 * margins.delta_d - dist;
        if (hinge <= 0.0) continue;
        out.value += weight * hinge * hinge;
        if (dist > 0.0) {
          const Eigen::RowVectorXd g = (2.0 * weight * hinge / dist) * diff;
          mean_grad.row(a) -= g;
          mean_grad.row(b) += g;
        }
      }
    }
  }

  for (Eigen::Index k = 0; k < count; ++k) {
    const auto& cells = *clusters[k];
    const Eigen::RowVectorXd share = mean_grad.row(k) / static_cast<double>(cells.size());
    for (Eigen::Index i : cells) out.grad.row(i) += share;
  }
  return out;
}

GridLoss seg_loss_2d(const RowMatrixXd& raw_segmentation, const RowMatrixXi& mask) {
  require_same_shape(raw_segmentation, mask, "segmentation loss");
  const RowMatrixXd targets = (mask.array() > 0).cast<double>().matrix();
  return binary_cross_entropy(raw_segmentation, targets);
}

double total_loss(const PredictionBatch& pred3d, const GridTensors& gt3d, const FrontViewPrediction& pred2d,
                  const FrontViewTruth& gt2d, const LossWeights& weights, const EmbedMargins& margins) {
  if (weights.conf < 0 || weights.embed < 0 || weights.offset < 0 || weights.height < 0 || weights.seg2d < 0 ||
      weights.embed2d < 0) {
    fail(ErrorCode::InvalidArgument, "loss weights must be non-negative");
  }
  double total = 0.0;
  if (weights.conf != 0.0) total += weights.conf * conf_loss(pred3d, gt3d).value;
  if (weights.embed != 0.0) total += weights.embed * embed_loss(pred3d.embedding, gt3d.instance, margins).value;
  if (weights.offset != 0.0) total += weights.offset * offset_loss(pred3d, gt3d).value;
  if (weights.height != 0.0) total += weights.height * height_loss(pred3d, gt3d).value;
  if (weights.seg2d != 0.0) total += weights.seg2d * seg_loss_2d(pred2d.raw_segmentation, gt2d.instance).value;
  if (weights.embed2d != 0.0) {
    total += weights.embed2d * embed_loss(pred2d.embedding, gt2d.instance, margins).value;
  }
  return total;
}

}  // namespace lanebev
