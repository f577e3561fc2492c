#include "roadnet/loss.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "roadnet/error.hpp"

namespace roadnet {

namespace {

double clamp_prob(double p) { return std::clamp(p, kProbClamp, 1.0 - kProbClamp); }

}  // namespace

void LossWeights::validate() const {
  if (!(seg >= 0.0 && cls >= 0.0 && coord >= 0.0)) throw ValidationError("loss weights must be non-negative");
}

double match_cost(const AdjacencyEntry& pred, Vec2 gt_offset, const LossWeights& weights) {
  return weights.coord * distance(pred.offset, gt_offset) + weights.cls * (1.0 - pred.p_road);
}

CostMatrix build_cost_matrix(std::span<const AdjacencyEntry> preds, std::span<const Vec2> gt_offsets,
                             const LossWeights& weights) {
  CostMatrix m(preds.size(), gt_offsets.size());
  for (std::size_t i = 0; i < preds.size(); ++i)
    for (std::size_t j = 0; j < gt_offsets.size(); ++j) m(i, j) = match_cost(preds[i], gt_offsets[j], weights);
  return m;
}

double coord_loss(std::span<const std::pair<Vec2, Vec2>> matched) {
  if (matched.empty()) return 0.0;
  double sum = 0.0;
  for (const auto& [pred, gt] : matched) sum += distance(pred, gt);
  return sum / static_cast<double>(matched.size());
}

double class_loss(std::span<const AdjacencyEntry> preds, const std::vector<bool>& matched) {
  if (matched.size() != preds.size()) throw ValidationError("class_loss needs one match flag per prediction");
  if (preds.empty()) return 0.0;
  double sum = 0.0;
  for (std::size_t i = 0; i < preds.size(); ++i) {
    const double p = clamp_prob(preds[i].p_road);
    sum += matched[i] ? -std::log(p) : -std::log(1.0 - p);
  }
  return sum / static_cast<double>(preds.size());
}

double bce(std::span<const double> pred, std::span<const double> target) {
  if (pred.size() != target.size()) throw ValidationError("BCE inputs differ in size");
  if (pred.empty()) return 0.0;
  double sum = 0.0;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    const double p = clamp_prob(pred[i]);
    const double t = target[i];
    sum += -(t * std::log(p) + (1.0 - t) * std::log(1.0 - p));
  }
  return sum / static_cast<double>(pred.size());
}

double bce(const Grid& pred, const Grid& target) {
  if (pred.width != target.width || pred.height != target.height)
    throw ValidationError("BCE inputs differ in size");
  const std::vector<double> p(pred.values.begin(), pred.values.end());
  const std::vector<double> t(target.values.begin(), target.values.end());
  return bce(p, t);
}

double seg_loss(const ScoreMaps& pred, const ScoreMaps& gt) {
  return bce(pred.keypoint, gt.keypoint) + bce(pred.sampling, gt.sampling) + bce(pred.road, gt.road);
}

double seg_loss(const ChannelValues& pred, const ChannelValues& gt) {
  return bce(pred[0], gt[0]) + bce(pred[1], gt[1]) + bce(pred[2], gt[2]);
}

double total_loss(const LossComponents& c, const LossWeights& weights) {
  return weights.seg * c.seg + weights.cls * c.cls + weights.coord * c.coord;
}

SampleLoss evaluate_sample(std::span<const AdjacencyEntry> preds, std::span<const Vec2> gt_offsets,
                           const LossWeights& weights) {
  weights.validate();
  SampleLoss out;
  out.assignment = hungarian(build_cost_matrix(preds, gt_offsets, weights));
  std::vector<bool> matched(preds.size(), false);
  std::vector<std::pair<Vec2, Vec2>> pairs;
  for (std::size_t j = 0; j < gt_offsets.size(); ++j) {
    const std::size_t i = out.assignment.gt_to_pred[j];
    matched[i] = true;
    pairs.emplace_back(preds[i].offset, gt_offsets[j]);
  }
  out.components.cls = class_loss(preds, matched);
  out.components.coord = coord_loss(pairs);
  return out;
}

}  // namespace roadnet
