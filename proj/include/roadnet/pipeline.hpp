#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "roadnet/adjacency.hpp"
#include "roadnet/decode.hpp"
#include "roadnet/detect.hpp"
#include "roadnet/expand.hpp"
#include "roadnet/metrics.hpp"
#include "roadnet/score_maps.hpp"
#include "roadnet/synth.hpp"

namespace roadnet {

enum class Strategy { decode_only, expand_only, hybrid };

std::string_view to_string(Strategy s);
/// Throws ValidationError for an unknown name.
Strategy strategy_from_string(std::string_view s);

struct PipelineConfig {
  int patch_size = 512;
  int patch_overlap = 64;
  Strategy strategy = Strategy::hybrid;
  /// Fraction of detected candidates removed before decoding.
  double candidate_drop_fraction = 0.0;
  /// Noise added to synthesized score maps.
  double map_noise_sigma = 0.0;
  std::uint64_t seed = 0;

  DetectParams detect;
  PredictorConfig predictor;
  DecodeParams decode;
  ExpandParams expand;
  OracleConfig oracle;
  MetricParams metrics;
  SceneConfig scene;

  /// Copy with the shared thresholds and query counts pushed from
  /// `predictor` into decode, expand and oracle.
  PipelineConfig resolved() const;
  void validate() const;
};

/// Stable JSON text for the whole configuration.
std::string config_to_json(const PipelineConfig& cfg);
/// Keys absent from the document keep their defaults. Throws ParseError for
/// malformed JSON and ValidationError for unknown keys or bad values.
PipelineConfig config_from_json(std::string_view text);
/// Sets one dotted path (e.g. "expand.d_merge") from a JSON or bare string
/// value.
void set_config_value(PipelineConfig& cfg, std::string_view path, std::string_view value);

/// Patch origins along one axis of length `extent`.
std::vector<int> patch_origins(int extent, int patch_size, int overlap);

/// Detection over overlapping patches. Each patch reports raw detections in
/// the part of the canvas it owns; suppression and fusion run once in global
/// coordinates, so the result equals fuse_candidates for any patching.
std::vector<Candidate> detect_tiled(const ScoreMaps& maps, const DetectParams& params, int patch_size,
                                    int overlap, std::size_t threads = 1);

/// Removes round(fraction * n) candidates chosen by `seed`, keeping order.
std::vector<Candidate> drop_candidates(const std::vector<Candidate>& cands, double fraction, std::uint64_t seed);

/// Builds the graph from candidates with the configured strategy.
std::pair<PlanarGraph, ExpandStats> build_graph_from_candidates(const PipelineConfig& cfg,
                                                                const std::vector<Candidate>& candidates,
                                                                const Predictor& predictor,
                                                                std::size_t threads = 1,
                                                                PlanarGraph* initial = nullptr);

struct StageTiming {
  std::string stage;
  double seconds = 0.0;
};

struct PipelineInputs {
  const ScoreMaps* maps = nullptr;
  const Predictor* predictor = nullptr;
  const PlanarGraph* ground_truth = nullptr;
};

struct PipelineResult {
  std::vector<Candidate> candidates;
  PlanarGraph initial;
  PlanarGraph graph;
  ExpandStats expand_stats;
  std::optional<MetricReport> metrics;
  std::vector<StageTiming> timings;
  double wall_seconds = 0.0;

  std::string timings_json() const;
};

/// detect -> decode -> expand -> (eval). Errors are rethrown with the stage
/// name prefixed. Throws UsageError when maps or predictor are missing.
PipelineResult run_pipeline(const PipelineConfig& cfg, const PipelineInputs& inputs, std::size_t threads = 1);

/// Synthetic scene with its renders.
struct Scene {
  SceneConfig config;
  PlanarGraph graph;
  ScoreMaps maps;
};

Scene make_scene(const SceneConfig& cfg, double map_noise_sigma = 0.0);

/// Oracle over the scene graph resampled at the scene's sampling interval.
OraclePredictor make_oracle(const PlanarGraph& scene_graph, const PipelineConfig& cfg);

enum class AblationAxis { strategy, expansion_count, thresholds };

std::string_view to_string(AblationAxis a);
AblationAxis ablation_axis_from_string(std::string_view s);

struct AblationConfig {
  PipelineConfig base;
  std::size_t scenes = 5;
  std::vector<int> expansion_counts{0, 1, 2, 3, 4, 5, 6, 7};
  std::vector<double> thresholds{0.5, 0.6, 0.7, 0.8, 0.9};
};

struct AblationRow {
  std::string axis;
  std::string setting;
  std::size_t scenes = 0;
  double topo_precision = 0.0;
  double topo_recall = 0.0;
  double topo_f1 = 0.0;
  double apls = 0.0;
  double iou = 0.0;
  double vertices = 0.0;
  double edges = 0.0;
};

/// Scene k uses scene seed derive_seed(base.seed, {k}). Values are means
/// over scenes.
std::vector<AblationRow> run_ablation(AblationAxis axis, const AblationConfig& cfg, std::size_t threads = 1);

std::string ablation_csv(const std::vector<AblationRow>& rows);

}  // namespace roadnet
