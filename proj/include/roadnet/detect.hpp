#pragma once

#include <string_view>
#include <vector>

#include "roadnet/geometry.hpp"
#include "roadnet/score_maps.hpp"

namespace roadnet {

enum class CandidateSource { keypoint = 0, sampling = 1, road = 2 };

std::string_view to_string(CandidateSource s);
/// Throws ValidationError for an unknown name.
CandidateSource candidate_source_from_string(std::string_view s);

/// A proposed road-centerline vertex.
struct Candidate {
  Vec2 position;
  double score = 0.0;
  CandidateSource source = CandidateSource::keypoint;

  friend bool operator==(const Candidate&, const Candidate&) = default;
};

/// Half-open pixel rectangle [x0, x1) x [y0, y1).
struct PixelRect {
  int x0 = 0, y0 = 0, x1 = 0, y1 = 0;
};

struct DetectParams {
  double point_threshold = 0.5;  ///< keypoint / sampling extrema gate
  double road_threshold = 0.8;   ///< supplemental road-surface gate
  int window = 5;                ///< local-extremum window side, odd
  double nms_radius = 6.0;       ///< per-source and final NMS radius
  /// NMS radius among road-surface candidates and between them and the
  /// keypoint/sampling candidates, so the supplement only fills gaps.
  double road_nms_radius = 16.0;
  /// Refine keypoint/sampling peaks with a per-axis parabola fit.
  bool subpixel = true;

  void validate() const;
};

/// Pixels with value >= threshold that beat every other pixel of the
/// window x window neighborhood (clipped at the map border). A pixel that
/// ties with a neighbor survives only if it is lexicographically smaller in
/// (x, y). Only pixels inside `region` are reported (whole map by default);
/// the neighborhood always reads the full map. Sorted by (x, y).
std::vector<Candidate> local_extrema(const Grid& map, double prob_threshold, int window,
                                     CandidateSource source = CandidateSource::keypoint);
std::vector<Candidate> local_extrema(const Grid& map, double prob_threshold, int window,
                                     CandidateSource source, PixelRect region);

/// Greedy score-descending suppression: keep the best remaining candidate,
/// drop everything within `radius`, repeat. Ties in score resolve by
/// position (x, y) then source. Output is in keep order.
std::vector<Candidate> nms_points(std::vector<Candidate> cands, double radius);

/// Peak offset in [-0.5, 0.5] per axis from the parabola through the
/// pixel and its 4-neighbors (0 on the border or a flat profile).
Vec2 subpixel_offset(const Grid& map, int x, int y);

/// Per-source raw detections before any suppression.
struct RawDetections {
  std::vector<Candidate> keypoint;
  std::vector<Candidate> sampling;
  std::vector<Candidate> road;

  void append(RawDetections&& other);
};

/// Extrema of the keypoint and sampling maps plus thresholded road pixels,
/// restricted to `region`.
RawDetections detect_raw(const ScoreMaps& maps, const DetectParams& params, PixelRect region);

/// Per-source NMS followed by the final NMS over the union. Road candidates
/// rank below every keypoint/sampling candidate.
std::vector<Candidate> fuse_detections(RawDetections raw, const DetectParams& params);

/// Full single-pass detection over the whole map.
std::vector<Candidate> fuse_candidates(const ScoreMaps& maps, const DetectParams& params);

std::vector<Vec2> positions(const std::vector<Candidate>& cands);

}  // namespace roadnet
