#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "roadnet/adjacency.hpp"
#include "roadnet/hungarian.hpp"
#include "roadnet/score_maps.hpp"

namespace roadnet {

/// Weights of the segmentation, class and coordinate terms.
struct LossWeights {
  double seg = 1.0;
  double cls = 1.0;
  double coord = 10.0;

  void validate() const;
};

struct LossComponents {
  double seg = 0.0;
  double cls = 0.0;
  double coord = 0.0;
};

inline constexpr double kProbClamp = 1e-7;

/// weights.coord * |pred.offset - gt_offset| + weights.cls * (1 - pred.p_road)
double match_cost(const AdjacencyEntry& pred, Vec2 gt_offset, const LossWeights& weights = {});

/// Cost matrix with predictions as rows and GT neighbors as columns.
CostMatrix build_cost_matrix(std::span<const AdjacencyEntry> preds, std::span<const Vec2> gt_offsets,
                             const LossWeights& weights = {});

/// Mean L2 distance over matched (predicted offset, GT offset) pairs; 0 when
/// there are no pairs.
double coord_loss(std::span<const std::pair<Vec2, Vec2>> matched);

/// Mean over all predictions of -log p(correct class): road for matched
/// predictions, non-road otherwise. Probabilities are clamped to
/// [1e-7, 1 - 1e-7]. `matched.size()` must equal `preds.size()`.
double class_loss(std::span<const AdjacencyEntry> preds, const std::vector<bool>& matched);

/// Mean binary cross-entropy of predicted probabilities against targets.
double bce(std::span<const double> pred, std::span<const double> target);
double bce(const Grid& pred, const Grid& target);

/// Sum of the per-channel mean BCEs over (keypoint, sampling, road).
double seg_loss(const ScoreMaps& pred, const ScoreMaps& gt);
using ChannelValues = std::array<std::vector<double>, 3>;
double seg_loss(const ChannelValues& pred, const ChannelValues& gt);

double total_loss(const LossComponents& c, const LossWeights& weights = {});

/// Result of matching one candidate's predictions to its GT neighbors.
struct SampleLoss {
  Assignment assignment;
  LossComponents components;  ///< seg left at 0
};

/// Hungarian matching with match_cost, then class and coordinate losses.
/// Throws ValidationError when there are fewer predictions than GT neighbors.
SampleLoss evaluate_sample(std::span<const AdjacencyEntry> preds, std::span<const Vec2> gt_offsets,
                           const LossWeights& weights = {});

}  // namespace roadnet
