#include "roadnet/detect.hpp"

#include <algorithm>
#include <string>
#include <tuple>

#include "roadnet/error.hpp"
#include "roadnet/spatial_index.hpp"

namespace roadnet {

std::string_view to_string(CandidateSource s) {
  switch (s) {
    case CandidateSource::keypoint: return "keypoint";
    case CandidateSource::sampling: return "sampling";
    case CandidateSource::road: return "road";
  }
  return "unknown";
}

CandidateSource candidate_source_from_string(std::string_view s) {
  if (s == "keypoint") return CandidateSource::keypoint;
  if (s == "sampling") return CandidateSource::sampling;
  if (s == "road") return CandidateSource::road;
  throw ValidationError("unknown candidate source '" + std::string(s) + "'");
}

void DetectParams::validate() const {
  if (!(point_threshold >= 0.0 && point_threshold <= 1.0)) throw ValidationError("point_threshold must be in [0, 1]");
  if (!(road_threshold >= 0.0 && road_threshold <= 1.0)) throw ValidationError("road_threshold must be in [0, 1]");
  if (window < 3 || window % 2 == 0) throw ValidationError("extremum window must be odd and >= 3");
  if (!(nms_radius > 0.0)) throw ValidationError("nms_radius must be positive");
  if (!(road_nms_radius >= nms_radius)) throw ValidationError("road_nms_radius must be >= nms_radius");
}

std::vector<Candidate> local_extrema(const Grid& map, double prob_threshold, int window, CandidateSource source) {
  return local_extrema(map, prob_threshold, window, source, PixelRect{0, 0, map.width, map.height});
}

std::vector<Candidate> local_extrema(const Grid& map, double prob_threshold, int window, CandidateSource source,
                                     PixelRect region) {
  if (window < 3 || window % 2 == 0) throw ValidationError("extremum window must be odd and >= 3");
  const int half = window / 2;
  const int x0 = std::max(region.x0, 0), x1 = std::min(region.x1, map.width);
  const int y0 = std::max(region.y0, 0), y1 = std::min(region.y1, map.height);

  std::vector<Candidate> out;
  for (int y = y0; y < y1; ++y) {
    for (int x = x0; x < x1; ++x) {
      const float v = map.at(x, y);
      if (!(static_cast<double>(v) >= prob_threshold)) continue;
      bool keep = true;
      for (int qy = std::max(0, y - half); keep && qy <= std::min(map.height - 1, y + half); ++qy) {
        for (int qx = std::max(0, x - half); qx <= std::min(map.width - 1, x + half); ++qx) {
          if (qx == x && qy == y) continue;
          const float q = map.at(qx, qy);
          if (q > v || (q == v && std::pair(qx, qy) < std::pair(x, y))) {
            keep = false;
            break;
          }
        }
      }
      if (keep) out.push_back({{static_cast<double>(x), static_cast<double>(y)}, static_cast<double>(v), source});
    }
  }
  std::sort(out.begin(), out.end(), [](const Candidate& a, const Candidate& b) { return a.position < b.position; });
  return out;
}

namespace {

auto rank_key(const Candidate& c) {
  return std::make_tuple(-c.score, c.position.x, c.position.y, static_cast<int>(c.source));
}

// Greedy suppression over an already ranked list. `radius_of` gives the
// suppression radius for the candidate being considered.
template <typename RadiusFn>
std::vector<Candidate> suppress_ranked(const std::vector<Candidate>& ranked, double cell, RadiusFn radius_of) {
  std::vector<Candidate> kept;
  SpatialIndex index(cell);
  for (const Candidate& c : ranked) {
    if (index.nearest_within(c.position, radius_of(c))) continue;
    index.insert(c.position);
    kept.push_back(c);
  }
  return kept;
}

}  // namespace

std::vector<Candidate> nms_points(std::vector<Candidate> cands, double radius) {
  if (!(radius > 0.0)) throw ValidationError("NMS radius must be positive");
  std::sort(cands.begin(), cands.end(), [](const Candidate& a, const Candidate& b) { return rank_key(a) < rank_key(b); });
  return suppress_ranked(cands, radius, [radius](const Candidate&) { return radius; });
}

Vec2 subpixel_offset(const Grid& map, int x, int y) {
  auto fit = [](double l, double c, double r) {
    const double den = l - 2.0 * c + r;
    if (!(den < 0.0)) return 0.0;
    return std::clamp(0.5 * (l - r) / den, -0.5, 0.5);
  };
  Vec2 d{0.0, 0.0};
  if (x > 0 && x + 1 < map.width) d.x = fit(map.at(x - 1, y), map.at(x, y), map.at(x + 1, y));
  if (y > 0 && y + 1 < map.height) d.y = fit(map.at(x, y - 1), map.at(x, y), map.at(x, y + 1));
  return d;
}

void RawDetections::append(RawDetections&& other) {
  keypoint.insert(keypoint.end(), other.keypoint.begin(), other.keypoint.end());
  sampling.insert(sampling.end(), other.sampling.begin(), other.sampling.end());
  road.insert(road.end(), other.road.begin(), other.road.end());
}

RawDetections detect_raw(const ScoreMaps& maps, const DetectParams& params, PixelRect region) {
  RawDetections raw;
  raw.keypoint = local_extrema(maps.keypoint, params.point_threshold, params.window, CandidateSource::keypoint, region);
  raw.sampling = local_extrema(maps.sampling, params.point_threshold, params.window, CandidateSource::sampling, region);
  if (params.subpixel) {
    auto refine = [](std::vector<Candidate>& cands, const Grid& map) {
      for (Candidate& c : cands) {
        const int x = static_cast<int>(c.position.x), y = static_cast<int>(c.position.y);
        c.position = c.position + subpixel_offset(map, x, y);
      }
    };
    refine(raw.keypoint, maps.keypoint);
    refine(raw.sampling, maps.sampling);
  }
  const int x0 = std::max(region.x0, 0), x1 = std::min(region.x1, maps.width());
  const int y0 = std::max(region.y0, 0), y1 = std::min(region.y1, maps.height());
  for (int y = y0; y < y1; ++y) {
    for (int x = x0; x < x1; ++x) {
      const float v = maps.road.at(x, y);
      if (static_cast<double>(v) >= params.road_threshold && v > 0.0f) {
        raw.road.push_back({{static_cast<double>(x), static_cast<double>(y)}, static_cast<double>(v), CandidateSource::road});
      }
    }
  }
  return raw;
}

std::vector<Candidate> fuse_detections(RawDetections raw, const DetectParams& params) {
  params.validate();
  std::vector<Candidate> primary = nms_points(std::move(raw.keypoint), params.nms_radius);
  std::vector<Candidate> sampling = nms_points(std::move(raw.sampling), params.nms_radius);
  const std::vector<Candidate> road = nms_points(std::move(raw.road), params.road_nms_radius);

  primary.insert(primary.end(), sampling.begin(), sampling.end());
  std::sort(primary.begin(), primary.end(), [](const Candidate& a, const Candidate& b) { return rank_key(a) < rank_key(b); });
  primary.insert(primary.end(), road.begin(), road.end());  // already ranked among themselves

  return suppress_ranked(primary, params.road_nms_radius, [&](const Candidate& c) {
    return c.source == CandidateSource::road ? params.road_nms_radius : params.nms_radius;
  });
}

std::vector<Candidate> fuse_candidates(const ScoreMaps& maps, const DetectParams& params) {
  maps.validate();
  params.validate();
  return fuse_detections(detect_raw(maps, params, PixelRect{0, 0, maps.width(), maps.height()}), params);
}

std::vector<Vec2> positions(const std::vector<Candidate>& cands) {
  std::vector<Vec2> out;
  out.reserve(cands.size());
  for (const auto& c : cands) out.push_back(c.position);
  return out;
}

}  // namespace roadnet
