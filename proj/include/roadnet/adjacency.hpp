#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <span>
#include <string_view>
#include <vector>

#include "roadnet/geometry.hpp"
#include "roadnet/graph.hpp"
#include "roadnet/spatial_index.hpp"

namespace roadnet {

/// One predicted neighbor: offset relative to the query and P(road).
struct AdjacencyEntry {
  Vec2 offset;
  double p_road = 0.0;
  friend bool operator==(const AdjacencyEntry&, const AdjacencyEntry&) = default;
};

/// Exactly N entries for one query point; unused slots carry p_road = 0.
struct AdjacencyPrediction {
  std::size_t source = 0;  ///< index of the query in the batch
  Vec2 origin;             ///< the query point
  std::vector<AdjacencyEntry> entries;
  friend bool operator==(const AdjacencyPrediction&, const AdjacencyPrediction&) = default;
};

struct PredictorConfig {
  std::size_t n_queries = 10;
  double t_valid = 0.5;
  double t_valid_expand = 0.7;
  double roi_halfwidth = 32.0;  ///< cap on predicted offset length, pixels

  /// Requires 0 < t_valid <= t_valid_expand <= 1.
  void validate() const;
};

/// Absolute positions (origin + offset) of entries with p_road >= threshold,
/// in slot order.
std::vector<Vec2> filter_valid(const AdjacencyPrediction& pred, double threshold);
/// Slot indices of the entries filter_valid would return.
std::vector<std::size_t> valid_slots(const AdjacencyPrediction& pred, double threshold);

/// Swappable source of adjacency predictions. Implementations are immutable
/// after construction and safe to call concurrently.
class Predictor {
 public:
  virtual ~Predictor() = default;
  virtual std::size_t n_queries() const = 0;
  /// Throws LookupError when the point cannot be answered.
  virtual AdjacencyPrediction predict_one(Vec2 query) const = 0;

  /// One prediction per query with `source` set to the query's position in
  /// the batch. Output does not depend on `threads`.
  std::vector<AdjacencyPrediction> predict(std::span<const Vec2> queries, std::size_t threads = 1) const;
};

struct OracleConfig {
  double noise_sigma = 0.0;
  double drop_prob = 0.0;
  double spurious_prob = 0.0;
  std::uint64_t seed = 0;
  std::size_t n_queries = 10;
  double snap_radius = 4.0;
  double sampling_interval = 20.0;
  double reach = 32.0;

  void validate() const;
  bool clean() const { return noise_sigma == 0.0 && drop_prob == 0.0 && spurious_prob == 0.0; }
};

/// Ground-truth oracle standing in for a learned predictor.
///
/// A query within `snap_radius` of a GT vertex predicts that vertex's
/// neighbors (offsets clipped to `reach`). Otherwise a query within
/// `snap_radius` of an edge predicts the points `sampling_interval` along the
/// edge in both directions (or the edge's endpoint when that is closer).
/// Each true entry is dropped with drop_prob, jittered by N(0, sigma^2) per
/// axis and given p_road in [0.8, 1] (exactly 1 for a clean config). Each
/// remaining slot receives a spurious entry with spurious_prob: offset
/// uniform in [-reach, reach]^2, p_road in [0.5, 0.9]. Randomness is derived
/// from (seed, query coordinates) only.
class OraclePredictor final : public Predictor {
 public:
  OraclePredictor(PlanarGraph gt, OracleConfig cfg);

  std::size_t n_queries() const override { return cfg_.n_queries; }
  AdjacencyPrediction predict_one(Vec2 query) const override;

  const PlanarGraph& ground_truth() const noexcept { return gt_; }
  const OracleConfig& config() const noexcept { return cfg_; }

 private:
  PlanarGraph gt_;
  OracleConfig cfg_;
  SpatialIndex vertex_index_;
  SegmentIndex edge_index_;
};

/// Single-shot form of the oracle (builds the indices each call).
AdjacencyPrediction oracle_predict(const PlanarGraph& gt, Vec2 query, const OracleConfig& cfg);

/// Predictions loaded from a JSON-lines file, answered by the stored record
/// whose query lies within 1 px of the requested point.
class FilePredictor final : public Predictor {
 public:
  explicit FilePredictor(std::vector<AdjacencyPrediction> records);
  static FilePredictor load(const std::filesystem::path& path);

  std::size_t n_queries() const override { return n_; }
  AdjacencyPrediction predict_one(Vec2 query) const override;
  const std::vector<AdjacencyPrediction>& records() const noexcept { return records_; }

 private:
  std::vector<AdjacencyPrediction> records_;
  SpatialIndex index_;
  std::size_t n_ = 0;
};

/// JSON lines, one record per prediction: {"q":[x,y],"p":[[dx,dy,prob],...]}.
std::string predictions_to_jsonl(std::span<const AdjacencyPrediction> preds);
/// Throws ParseError (with line number) on malformed records or when the
/// record sizes disagree.
std::vector<AdjacencyPrediction> predictions_from_jsonl(std::string_view text);
void write_predictions(const std::filesystem::path& path, std::span<const AdjacencyPrediction> preds);
std::vector<AdjacencyPrediction> read_predictions(const std::filesystem::path& path);

}  // namespace roadnet
