#include "roadnet/adjacency.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>

#include <json.hpp>

#include "roadnet/error.hpp"
#include "roadnet/graph_io.hpp"
#include "roadnet/parallel.hpp"
#include "roadnet/random.hpp"

namespace roadnet {

using nlohmann::json;

namespace {

std::string describe(Vec2 p) {
  std::ostringstream os;
  os << '(' << p.x << ", " << p.y << ')';
  return os.str();
}

Vec2 clip_length(Vec2 v, double cap) {
  const double n = norm(v);
  if (n <= cap || n == 0.0) return v;
  return (cap / n) * v;
}

}  // namespace

void PredictorConfig::validate() const {
  if (n_queries == 0) throw ValidationError("n_queries must be positive");
  if (!(t_valid > 0.0 && t_valid <= t_valid_expand && t_valid_expand <= 1.0))
    throw ValidationError("thresholds must satisfy 0 < t_valid <= t_valid_expand <= 1");
  if (!(roi_halfwidth > 0.0)) throw ValidationError("roi_halfwidth must be positive");
}

void OracleConfig::validate() const {
  if (!(noise_sigma >= 0.0)) throw ValidationError("oracle noise_sigma must be >= 0");
  for (double p : {drop_prob, spurious_prob})
    if (!(p >= 0.0 && p <= 1.0)) throw ValidationError("oracle probabilities must be in [0, 1]");
  if (n_queries == 0) throw ValidationError("oracle n_queries must be positive");
  if (!(snap_radius > 0.0 && sampling_interval > 0.0 && reach > 0.0))
    throw ValidationError("oracle radii must be positive");
}

std::vector<std::size_t> valid_slots(const AdjacencyPrediction& pred, double threshold) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < pred.entries.size(); ++i)
    if (pred.entries[i].p_road >= threshold) out.push_back(i);
  return out;
}

std::vector<Vec2> filter_valid(const AdjacencyPrediction& pred, double threshold) {
  std::vector<Vec2> out;
  for (const auto& e : pred.entries)
    if (e.p_road >= threshold) out.push_back(pred.origin + e.offset);
  return out;
}

std::vector<AdjacencyPrediction> Predictor::predict(std::span<const Vec2> queries, std::size_t threads) const {
  std::vector<AdjacencyPrediction> out(queries.size());
  parallel_for(queries.size(), threads, [&](std::size_t i) {
    out[i] = predict_one(queries[i]);
    out[i].source = i;
  });
  return out;
}

OraclePredictor::OraclePredictor(PlanarGraph gt, OracleConfig cfg)
    : gt_(std::move(gt)), cfg_(cfg), vertex_index_(gt_.vertices(), 16.0), edge_index_(32.0) {
  cfg_.validate();
  for (const Edge& e : gt_.edges()) edge_index_.insert(gt_.position(e.a), gt_.position(e.b));
}

AdjacencyPrediction OraclePredictor::predict_one(Vec2 query) const {
  if (!is_finite(query)) throw LookupError("oracle query " + describe(query) + " is not finite");
  AdjacencyPrediction pred;
  pred.origin = query;

  std::vector<Vec2> targets;  // absolute positions of true neighbors
  if (auto hit = vertex_index_.nearest_within(query, cfg_.snap_radius)) {
    for (VertexId u : gt_.neighbors(hit->index)) targets.push_back(gt_.position(u));
  } else if (auto seg = edge_index_.nearest_within(query, cfg_.snap_radius)) {
    const Edge& e = gt_.edges()[seg->segment];
    const Vec2 a = gt_.position(e.a), b = gt_.position(e.b);
    const double len = distance(a, b);
    const Vec2 dir = (1.0 / len) * (b - a);
    const double along = seg->t * len;
    targets.push_back(len - along <= cfg_.sampling_interval ? b : seg->point + cfg_.sampling_interval * dir);
    targets.push_back(along <= cfg_.sampling_interval ? a : seg->point - cfg_.sampling_interval * dir);
  }

  Rng rng(derive_seed(cfg_.seed, {bits_of(query.x), bits_of(query.y)}));
  const bool clean = cfg_.clean();
  for (const Vec2& t : targets) {
    if (pred.entries.size() == cfg_.n_queries) break;
    // Draw everything unconditionally so one knob never shifts another's stream.
    const bool drop = rng.bernoulli(cfg_.drop_prob);
    const double jx = rng.normal(), jy = rng.normal();
    const double p = rng.uniform(0.8, 1.0);
    if (drop) continue;
    Vec2 offset = clip_length(t - query, cfg_.reach);
    offset += Vec2{cfg_.noise_sigma * jx, cfg_.noise_sigma * jy};
    pred.entries.push_back({offset, clean ? 1.0 : p});
  }
  while (pred.entries.size() < cfg_.n_queries) {
    const bool add = rng.bernoulli(cfg_.spurious_prob);
    const double dx = rng.uniform(-cfg_.reach, cfg_.reach);
    const double dy = rng.uniform(-cfg_.reach, cfg_.reach);
    const double p = rng.uniform(0.5, 0.9);
    pred.entries.push_back(add ? AdjacencyEntry{{dx, dy}, p} : AdjacencyEntry{{0.0, 0.0}, 0.0});
  }
  return pred;
}

AdjacencyPrediction oracle_predict(const PlanarGraph& gt, Vec2 query, const OracleConfig& cfg) {
  return OraclePredictor(gt, cfg).predict_one(query);
}

FilePredictor::FilePredictor(std::vector<AdjacencyPrediction> records) : records_(std::move(records)), index_(8.0) {
  for (std::size_t i = 0; i < records_.size(); ++i) {
    const auto& r = records_[i];
    if (i == 0) n_ = r.entries.size();
    if (r.entries.size() != n_)
      throw ValidationError("prediction record " + std::to_string(i) + " has " + std::to_string(r.entries.size()) +
                            " entries, expected " + std::to_string(n_));
    index_.insert(r.origin);
  }
}

FilePredictor FilePredictor::load(const std::filesystem::path& path) {
  return FilePredictor(read_predictions(path));
}

AdjacencyPrediction FilePredictor::predict_one(Vec2 query) const {
  const auto hit = index_.nearest_within(query, 1.0);
  if (!hit) throw LookupError("no stored prediction within 1 px of " + describe(query));
  AdjacencyPrediction out = records_[hit->index];
  // Re-express offsets relative to the query, keeping absolute targets.
  const Vec2 shift = out.origin - query;
  for (auto& e : out.entries) e.offset += shift;
  out.origin = query;
  return out;
}

std::string predictions_to_jsonl(std::span<const AdjacencyPrediction> preds) {
  std::string out;
  for (const auto& p : preds) {
    json rec;
    rec["q"] = {p.origin.x, p.origin.y};
    json entries = json::array();
    for (const auto& e : p.entries) entries.push_back({e.offset.x, e.offset.y, e.p_road});
    rec["p"] = std::move(entries);
    out += rec.dump();
    out += '\n';
  }
  return out;
}

std::vector<AdjacencyPrediction> predictions_from_jsonl(std::string_view text) {
  std::vector<AdjacencyPrediction> out;
  std::size_t line_no = 0, start = 0;
  std::size_t expected = 0;
  while (start < text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    ++line_no;
    const std::string_view line = text.substr(start, end - start);
    const std::size_t line_offset = start;
    start = end + 1;
    if (line.find_first_not_of(" \t\r") == std::string_view::npos) continue;

    json rec;
    try {
      rec = json::parse(line);
    } catch (const json::parse_error& e) {
      throw ParseError(std::string("malformed prediction record: ") + e.what(), line_no,
                       line_offset + (e.byte > 0 ? e.byte - 1 : 0));
    }
    auto fail = [&](const std::string& why) { throw ParseError(why, line_no, line_offset); };
    if (!rec.is_object() || !rec.contains("q") || !rec.contains("p")) fail("record needs \"q\" and \"p\"");
    const auto& q = rec["q"];
    if (!q.is_array() || q.size() != 2 || !q[0].is_number() || !q[1].is_number()) fail("\"q\" must be [x, y]");
    const auto& p = rec["p"];
    if (!p.is_array()) fail("\"p\" must be an array");

    AdjacencyPrediction pred;
    pred.source = out.size();
    pred.origin = {q[0].get<double>(), q[1].get<double>()};
    for (const auto& e : p) {
      if (!e.is_array() || e.size() != 3 || !e[0].is_number() || !e[1].is_number() || !e[2].is_number())
        fail("each prediction entry must be [dx, dy, prob]");
      const double prob = e[2].get<double>();
      if (!(prob >= 0.0 && prob <= 1.0)) fail("prediction probability " + std::to_string(prob) + " outside [0, 1]");
      pred.entries.push_back({{e[0].get<double>(), e[1].get<double>()}, prob});
    }
    if (out.empty()) expected = pred.entries.size();
    if (pred.entries.size() != expected || expected == 0)
      fail("record has " + std::to_string(pred.entries.size()) + " entries, expected " + std::to_string(expected));
    out.push_back(std::move(pred));
  }
  return out;
}

void write_predictions(const std::filesystem::path& path, std::span<const AdjacencyPrediction> preds) {
  write_text_file(path, predictions_to_jsonl(preds));
}

std::vector<AdjacencyPrediction> read_predictions(const std::filesystem::path& path) {
  try {
    return predictions_from_jsonl(read_text_file(path));
  } catch (const ParseError& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

}  // namespace roadnet
