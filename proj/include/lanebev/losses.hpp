#pragma once

// Reference values and analytic gradients of the BEV head losses and the
// front-view auxiliary losses. All reductions run in row-major cell order.

#include <Eigen/Dense>

#include "lanebev/grid.hpp"

namespace lanebev {

/// Raw head outputs on an s1 x s2 grid. Confidence and offset are logits;
/// the predicted offset is sigmoid(raw_offset) - 0.5.
struct PredictionBatch {
  RowMatrixXd raw_confidence;
  RowMatrixXd raw_offset;
  Eigen::MatrixXd embedding;  // (s1*s2) x D
  RowMatrixXd height;

  static PredictionBatch zeros(int rows, int cols, int embed_dim);
};

struct FrontViewPrediction {
  RowMatrixXd raw_segmentation;
  Eigen::MatrixXd embedding;  // (H*W) x D
};

/// Front-view lane labels: 0 = background, k > 0 = lane instance.
struct FrontViewTruth {
  RowMatrixXi instance;
};

struct LossWeights {
  double conf = 1.0;
  double embed = 1.0;
  double offset = 1.0;
  double height = 1.0;
  double seg2d = 1.0;
  double embed2d = 1.0;
};

struct EmbedMargins {
  double delta_v = 0.5;
  double delta_d = 3.0;
};

template <typename Gradient>
struct LossValue {
  double value = 0.0;
  Gradient grad;
};

using GridLoss = LossValue<RowMatrixXd>;
using EmbeddingLoss = LossValue<Eigen::MatrixXd>;

double sigmoid(double x);

/// Summed binary cross-entropy of sigmoid(logits) against {0,1} targets.
/// Probabilities are clamped to [1e-7, 1 - 1e-7]; the clamp has zero slope.
GridLoss binary_cross_entropy(const RowMatrixXd& logits, const RowMatrixXd& targets);

GridLoss conf_loss(const PredictionBatch& pred, const GridTensors& gt);
GridLoss offset_loss(const PredictionBatch& pred, const GridTensors& gt);
GridLoss height_loss(const PredictionBatch& pred, const GridTensors& gt);

/// Discriminative embedding loss: squared-hinge pull towards each instance
/// mean beyond delta_v plus squared-hinge push between means closer than
/// 2 delta_d. Cells with instance 0 are ignored.
EmbeddingLoss embed_loss(const Eigen::MatrixXd& embedding, const RowMatrixXi& instance,
                         const EmbedMargins& margins = {});

GridLoss seg_loss_2d(const RowMatrixXd& raw_segmentation, const RowMatrixXi& mask);

double total_loss(const PredictionBatch& pred3d, const GridTensors& gt3d, const FrontViewPrediction& pred2d,
                  const FrontViewTruth& gt2d, const LossWeights& weights, const EmbedMargins& margins = {});

}  // namespace lanebev
