#include "roadnet/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <sstream>

#include <json.hpp>

#include "roadnet/error.hpp"
#include "roadnet/parallel.hpp"
#include "roadnet/random.hpp"

namespace roadnet {

using nlohmann::json;
using nlohmann::ordered_json;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

ordered_json to_j(const PipelineConfig& c) {
  ordered_json j;
  j["patch_size"] = c.patch_size;
  j["patch_overlap"] = c.patch_overlap;
  j["strategy"] = std::string(to_string(c.strategy));
  j["candidate_drop_fraction"] = c.candidate_drop_fraction;
  j["map_noise_sigma"] = c.map_noise_sigma;
  j["seed"] = c.seed;
  auto& d = j["detect"];
  d["point_threshold"] = c.detect.point_threshold;
  d["road_threshold"] = c.detect.road_threshold;
  d["window"] = c.detect.window;
  d["nms_radius"] = c.detect.nms_radius;
  d["road_nms_radius"] = c.detect.road_nms_radius;
  d["subpixel"] = c.detect.subpixel;
  auto& p = j["predictor"];
  p["n_queries"] = c.predictor.n_queries;
  p["t_valid"] = c.predictor.t_valid;
  p["t_valid_expand"] = c.predictor.t_valid_expand;
  p["roi_halfwidth"] = c.predictor.roi_halfwidth;
  j["decode"] = {{"w", c.decode.w}, {"r", c.decode.r}};
  auto& e = j["expand"];
  e["d_merge"] = c.expand.d_merge;
  e["iterations"] = c.expand.iterations;
  e["back_edge_angle_deg"] = c.expand.back_edge_angle_deg;
  e["include_isolated"] = c.expand.include_isolated;
  e["max_inserted_degree"] = c.expand.max_inserted_degree ? ordered_json(*c.expand.max_inserted_degree) : ordered_json();
  auto& o = j["oracle"];
  o["noise_sigma"] = c.oracle.noise_sigma;
  o["drop_prob"] = c.oracle.drop_prob;
  o["spurious_prob"] = c.oracle.spurious_prob;
  o["seed"] = c.oracle.seed;
  o["snap_radius"] = c.oracle.snap_radius;
  auto& m = j["metrics"];
  m["topo"]["hole_interval"] = c.metrics.topo.hole_interval;
  m["topo"]["match_radius"] = c.metrics.topo.match_radius;
  m["topo"]["propagation_radius"] = c.metrics.topo.propagation_radius;
  m["topo"]["num_seeds"] = c.metrics.topo.num_seeds;
  m["topo"]["seed"] = c.metrics.topo.seed;
  m["apls"]["snap_radius"] = c.metrics.apls.snap_radius;
  m["apls"]["control_interval"] = c.metrics.apls.control_interval;
  m["iou_width"] = c.metrics.iou_width;
  auto& s = j["scene"];
  s["width"] = c.scene.width;
  s["height"] = c.scene.height;
  s["grid_pitch"] = c.scene.grid_pitch;
  s["jitter"] = c.scene.jitter;
  s["edge_drop_prob"] = c.scene.edge_drop_prob;
  s["diagonal_prob"] = c.scene.diagonal_prob;
  s["sampling_interval"] = c.scene.sampling_interval;
  s["point_render_radius"] = c.scene.point_render_radius;
  s["road_width"] = c.scene.road_width;
  s["blur_sigma"] = c.scene.blur_sigma;
  s["seed"] = c.scene.seed;
  return j;
}

PipelineConfig from_j(const ordered_json& j) {
  PipelineConfig c;
  try {
    c.patch_size = j.at("patch_size").get<int>();
    c.patch_overlap = j.at("patch_overlap").get<int>();
    c.strategy = strategy_from_string(j.at("strategy").get<std::string>());
    c.candidate_drop_fraction = j.at("candidate_drop_fraction").get<double>();
    c.map_noise_sigma = j.at("map_noise_sigma").get<double>();
    c.seed = j.at("seed").get<std::uint64_t>();
    const auto& d = j.at("detect");
    c.detect.point_threshold = d.at("point_threshold").get<double>();
    c.detect.road_threshold = d.at("road_threshold").get<double>();
    c.detect.window = d.at("window").get<int>();
    c.detect.nms_radius = d.at("nms_radius").get<double>();
    c.detect.road_nms_radius = d.at("road_nms_radius").get<double>();
    c.detect.subpixel = d.at("subpixel").get<bool>();
    const auto& p = j.at("predictor");
    c.predictor.n_queries = p.at("n_queries").get<std::size_t>();
    c.predictor.t_valid = p.at("t_valid").get<double>();
    c.predictor.t_valid_expand = p.at("t_valid_expand").get<double>();
    c.predictor.roi_halfwidth = p.at("roi_halfwidth").get<double>();
    c.decode.w = j.at("decode").at("w").get<double>();
    c.decode.r = j.at("decode").at("r").get<double>();
    const auto& e = j.at("expand");
    c.expand.d_merge = e.at("d_merge").get<double>();
    c.expand.iterations = e.at("iterations").get<int>();
    c.expand.back_edge_angle_deg = e.at("back_edge_angle_deg").get<double>();
    c.expand.include_isolated = e.at("include_isolated").get<bool>();
    if (!e.at("max_inserted_degree").is_null())
      c.expand.max_inserted_degree = e.at("max_inserted_degree").get<std::size_t>();
    const auto& o = j.at("oracle");
    c.oracle.noise_sigma = o.at("noise_sigma").get<double>();
    c.oracle.drop_prob = o.at("drop_prob").get<double>();
    c.oracle.spurious_prob = o.at("spurious_prob").get<double>();
    c.oracle.seed = o.at("seed").get<std::uint64_t>();
    c.oracle.snap_radius = o.at("snap_radius").get<double>();
    const auto& m = j.at("metrics");
    c.metrics.topo.hole_interval = m.at("topo").at("hole_interval").get<double>();
    c.metrics.topo.match_radius = m.at("topo").at("match_radius").get<double>();
    c.metrics.topo.propagation_radius = m.at("topo").at("propagation_radius").get<double>();
    c.metrics.topo.num_seeds = m.at("topo").at("num_seeds").get<std::size_t>();
    c.metrics.topo.seed = m.at("topo").at("seed").get<std::uint64_t>();
    c.metrics.apls.snap_radius = m.at("apls").at("snap_radius").get<double>();
    c.metrics.apls.control_interval = m.at("apls").at("control_interval").get<double>();
    c.metrics.iou_width = m.at("iou_width").get<int>();
    const auto& s = j.at("scene");
    c.scene.width = s.at("width").get<int>();
    c.scene.height = s.at("height").get<int>();
    c.scene.grid_pitch = s.at("grid_pitch").get<double>();
    c.scene.jitter = s.at("jitter").get<double>();
    c.scene.edge_drop_prob = s.at("edge_drop_prob").get<double>();
    c.scene.diagonal_prob = s.at("diagonal_prob").get<double>();
    c.scene.sampling_interval = s.at("sampling_interval").get<double>();
    c.scene.point_render_radius = s.at("point_render_radius").get<double>();
    c.scene.road_width = s.at("road_width").get<int>();
    c.scene.blur_sigma = s.at("blur_sigma").get<double>();
    c.scene.seed = s.at("seed").get<std::uint64_t>();
  } catch (const json::exception& ex) {
    throw ValidationError(std::string("bad configuration value: ") + ex.what());
  }
  return c;
}

void merge_checked(ordered_json& dst, const ordered_json& src, const std::string& where) {
  if (!src.is_object()) throw ValidationError("configuration section '" + where + "' must be an object");
  for (const auto& [key, value] : src.items()) {
    const std::string path = where.empty() ? key : where + "." + key;
    if (!dst.contains(key)) throw ValidationError("unknown configuration key '" + path + "'");
    if (dst[key].is_object())
      merge_checked(dst[key], value, path);
    else
      dst[key] = value;
  }
}

void rethrow_with_stage(const std::string& stage) {
  try {
    throw;
  } catch (const UsageError& e) {
    throw UsageError(stage + ": " + e.what());
  } catch (const ParseError& e) {
    throw ParseError(stage + ": " + e.what());
  } catch (const LookupError& e) {
    throw LookupError(stage + ": " + e.what());
  } catch (const ValidationError& e) {
    throw ValidationError(stage + ": " + e.what());
  } catch (const StructuralError& e) {
    throw StructuralError(stage + ": " + e.what());
  } catch (const std::exception& e) {
    throw Error(stage + ": " + e.what());
  }
}

}  // namespace

std::string_view to_string(Strategy s) {
  switch (s) {
    case Strategy::decode_only: return "decode_only";
    case Strategy::expand_only: return "expand_only";
    case Strategy::hybrid: return "hybrid";
  }
  return "hybrid";
}

Strategy strategy_from_string(std::string_view s) {
  if (s == "decode_only" || s == "decode") return Strategy::decode_only;
  if (s == "expand_only" || s == "expand") return Strategy::expand_only;
  if (s == "hybrid") return Strategy::hybrid;
  throw ValidationError("unknown strategy '" + std::string(s) + "'");
}

PipelineConfig PipelineConfig::resolved() const {
  PipelineConfig c = *this;
  c.decode.t_valid = predictor.t_valid;
  c.expand.t_valid = predictor.t_valid;
  c.expand.t_valid_expand = predictor.t_valid_expand;
  c.oracle.n_queries = predictor.n_queries;
  c.oracle.reach = predictor.roi_halfwidth;
  c.oracle.sampling_interval = scene.sampling_interval;
  if (strategy == Strategy::expand_only) c.expand.include_isolated = true;
  return c;
}

void PipelineConfig::validate() const {
  if (patch_size <= 0) throw ValidationError("patch_size must be positive");
  if (patch_overlap < 0 || patch_overlap >= patch_size)
    throw ValidationError("patch_overlap must be in [0, patch_size)");
  if (!(candidate_drop_fraction >= 0.0 && candidate_drop_fraction < 1.0))
    throw ValidationError("candidate_drop_fraction must be in [0, 1)");
  if (!(map_noise_sigma >= 0.0)) throw ValidationError("map_noise_sigma must be non-negative");
  const PipelineConfig r = resolved();
  r.detect.validate();
  r.predictor.validate();
  r.decode.validate();
  r.expand.validate();
  r.oracle.validate();
  r.metrics.topo.validate();
  r.metrics.apls.validate();
  if (r.metrics.iou_width < 1 || r.metrics.iou_width % 2 == 0) throw ValidationError("iou_width must be odd");
  r.scene.validate();
}

std::string config_to_json(const PipelineConfig& cfg) { return to_j(cfg).dump(2) + "\n"; }

PipelineConfig config_from_json(std::string_view text) {
  ordered_json doc;
  try {
    doc = ordered_json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("malformed configuration: ") + e.what(), {}, e.byte);
  }
  ordered_json base = to_j(PipelineConfig{});
  merge_checked(base, doc, "");
  PipelineConfig c = from_j(base);
  c.validate();
  return c;
}

void set_config_value(PipelineConfig& cfg, std::string_view path, std::string_view value) {
  ordered_json j = to_j(cfg);
  ordered_json* node = &j;
  std::string p(path);
  std::size_t start = 0;
  while (true) {
    const std::size_t dot = p.find('.', start);
    const std::string key = p.substr(start, dot == std::string::npos ? std::string::npos : dot - start);
    if (!node->is_object() || !node->contains(key))
      throw ValidationError("unknown configuration key '" + p + "'");
    node = &(*node)[key];
    if (dot == std::string::npos) break;
    start = dot + 1;
  }
  if (node->is_object()) throw ValidationError("configuration key '" + p + "' is a section");
  ordered_json v = ordered_json::parse(value, nullptr, false);
  if (v.is_discarded()) v = std::string(value);
  *node = v;
  cfg = from_j(j);
}

std::vector<int> patch_origins(int extent, int patch_size, int overlap) {
  std::vector<int> out{0};
  if (extent <= patch_size) return out;
  const int stride = patch_size - overlap;
  while (out.back() + patch_size < extent) out.push_back(std::min(out.back() + stride, extent - patch_size));
  return out;
}

std::vector<Candidate> detect_tiled(const ScoreMaps& maps, const DetectParams& params, int patch_size,
                                    int overlap, std::size_t threads) {
  maps.validate();
  params.validate();
  const auto xs = patch_origins(maps.width(), patch_size, overlap);
  const auto ys = patch_origins(maps.height(), patch_size, overlap);
  // Owned span of patch k along an axis: from the middle of its overlap with
  // patch k-1 to the middle of its overlap with patch k+1.
  auto owned = [&](const std::vector<int>& o, std::size_t k, int extent) {
    const int lo = k == 0 ? 0 : (o[k] + o[k - 1] + patch_size) / 2;
    const int hi = k + 1 == o.size() ? extent : (o[k + 1] + o[k] + patch_size) / 2;
    return std::pair{lo, hi};
  };
  std::vector<RawDetections> raw(xs.size() * ys.size());
  parallel_for(raw.size(), threads, [&](std::size_t i) {
    const auto [x0, x1] = owned(xs, i % xs.size(), maps.width());
    const auto [y0, y1] = owned(ys, i / xs.size(), maps.height());
    raw[i] = detect_raw(maps, params, PixelRect{x0, y0, x1, y1});
  });
  RawDetections all;
  for (auto& r : raw) all.append(std::move(r));
  return fuse_detections(std::move(all), params);
}

std::vector<Candidate> drop_candidates(const std::vector<Candidate>& cands, double fraction, std::uint64_t seed) {
  const auto k = static_cast<std::size_t>(std::llround(fraction * static_cast<double>(cands.size())));
  if (k == 0) return cands;
  std::vector<std::size_t> order(cands.size());
  std::iota(order.begin(), order.end(), 0);
  Rng rng(derive_seed(seed, {0x64726f70}));
  for (std::size_t i = 0; i < k; ++i) std::swap(order[i], order[i + rng.index(order.size() - i)]);
  std::vector<char> dropped(cands.size(), 0);
  for (std::size_t i = 0; i < k; ++i) dropped[order[i]] = 1;
  std::vector<Candidate> out;
  for (std::size_t i = 0; i < cands.size(); ++i)
    if (!dropped[i]) out.push_back(cands[i]);
  return out;
}

std::pair<PlanarGraph, ExpandStats> build_graph_from_candidates(const PipelineConfig& cfg_in,
                                                                const std::vector<Candidate>& candidates,
                                                                const Predictor& predictor, std::size_t threads,
                                                                PlanarGraph* initial) {
  const PipelineConfig cfg = cfg_in.resolved();
  const auto pts = positions(candidates);
  PlanarGraph g;
  if (cfg.strategy == Strategy::expand_only) {
    GraphBuilder b;
    for (const Vec2& p : pts) b.add_vertex(p);
    g = b.build();
  } else {
    const auto preds = predictor.predict(pts, threads);
    g = decode_initial_graph(pts, preds, cfg.decode, threads);
  }
  if (initial) *initial = g;
  if (cfg.strategy == Strategy::decode_only) return {g, {}};
  return expand(g, predictor, cfg.expand, threads);
}

std::string PipelineResult::timings_json() const {
  ordered_json j;
  ordered_json stages = ordered_json::array();
  for (const auto& t : timings) stages.push_back({{"stage", t.stage}, {"seconds", t.seconds}});
  j["stages"] = stages;
  j["wall_seconds"] = wall_seconds;
  ordered_json it = ordered_json::array();
  for (const auto& s : expand_stats.iterations)
    it.push_back({{"frontier", s.frontier}, {"insertions", s.insertions}, {"merges", s.merges}});
  j["expand_iterations"] = it;
  j["candidates"] = candidates.size();
  j["vertices"] = graph.vertex_count();
  j["edges"] = graph.edge_count();
  return j.dump(2) + "\n";
}

PipelineResult run_pipeline(const PipelineConfig& cfg_in, const PipelineInputs& inputs, std::size_t threads) {
  if (!inputs.maps) throw UsageError("pipeline needs score maps");
  if (!inputs.predictor) throw UsageError("pipeline needs a predictor");
  cfg_in.validate();
  const PipelineConfig cfg = cfg_in.resolved();
  PipelineResult r;
  const auto wall0 = Clock::now();
  auto stage = [&](const std::string& name, auto&& fn) {
    const auto t0 = Clock::now();
    try {
      fn();
    } catch (...) {
      rethrow_with_stage(name);
    }
    r.timings.push_back({name, seconds_since(t0)});
  };

  stage("detect", [&] {
    r.candidates = detect_tiled(*inputs.maps, cfg.detect, cfg.patch_size, cfg.patch_overlap, threads);
    r.candidates = drop_candidates(r.candidates, cfg.candidate_drop_fraction, cfg.seed);
  });
  const auto pts = positions(r.candidates);
  stage("decode", [&] {
    if (cfg.strategy == Strategy::expand_only) {
      GraphBuilder b;
      for (const Vec2& p : pts) b.add_vertex(p);
      r.initial = b.build();
    } else {
      const auto preds = inputs.predictor->predict(pts, threads);
      r.initial = decode_initial_graph(pts, preds, cfg.decode, threads);
    }
  });
  stage("expand", [&] {
    if (cfg.strategy == Strategy::decode_only) {
      r.graph = r.initial;
    } else {
      auto [g, stats] = expand(r.initial, *inputs.predictor, cfg.expand, threads);
      r.graph = std::move(g);
      r.expand_stats = std::move(stats);
    }
  });
  if (inputs.ground_truth) {
    stage("eval", [&] {
      r.metrics = evaluate(r.graph, *inputs.ground_truth, Canvas{inputs.maps->width(), inputs.maps->height()},
                           cfg.metrics, threads);
    });
  }
  r.wall_seconds = seconds_since(wall0);
  return r;
}

Scene make_scene(const SceneConfig& cfg, double map_noise_sigma) {
  Scene s;
  s.config = cfg;
  s.graph = gen_scene(cfg);
  s.maps = render_maps(s.graph, cfg);
  if (map_noise_sigma > 0.0) s.maps = corrupt_maps(s.maps, map_noise_sigma, derive_seed(cfg.seed, {0x6d617073}));
  return s;
}

OraclePredictor make_oracle(const PlanarGraph& scene_graph, const PipelineConfig& cfg) {
  const PipelineConfig r = cfg.resolved();
  return OraclePredictor(densify(scene_graph, r.scene.sampling_interval), r.oracle);
}

std::string_view to_string(AblationAxis a) {
  switch (a) {
    case AblationAxis::strategy: return "strategy";
    case AblationAxis::expansion_count: return "expansion_count";
    case AblationAxis::thresholds: return "thresholds";
  }
  return "strategy";
}

AblationAxis ablation_axis_from_string(std::string_view s) {
  if (s == "strategy") return AblationAxis::strategy;
  if (s == "expansion_count" || s == "expansions") return AblationAxis::expansion_count;
  if (s == "thresholds" || s == "threshold") return AblationAxis::thresholds;
  throw ValidationError("unknown ablation axis '" + std::string(s) + "'");
}

std::vector<AblationRow> run_ablation(AblationAxis axis, const AblationConfig& cfg, std::size_t threads) {
  cfg.base.validate();
  if (cfg.scenes == 0) throw ValidationError("ablation needs at least one scene");

  std::vector<std::pair<std::string, PipelineConfig>> settings;
  switch (axis) {
    case AblationAxis::strategy:
      for (Strategy s : {Strategy::decode_only, Strategy::expand_only, Strategy::hybrid}) {
        PipelineConfig c = cfg.base;
        c.strategy = s;
        settings.emplace_back(std::string(to_string(s)), c);
      }
      break;
    case AblationAxis::expansion_count:
      for (int n : cfg.expansion_counts) {
        PipelineConfig c = cfg.base;
        c.strategy = Strategy::hybrid;
        c.expand.iterations = n;
        settings.emplace_back(std::to_string(n), c);
      }
      break;
    case AblationAxis::thresholds:
      for (double t : cfg.thresholds) {
        PipelineConfig c = cfg.base;
        c.predictor.t_valid = t;
        c.predictor.t_valid_expand = std::max(t, cfg.base.predictor.t_valid_expand);
        char buf[32];
        std::snprintf(buf, sizeof buf, "%g", t);
        settings.emplace_back(buf, c);
      }
      break;
  }
  for (const auto& [name, c] : settings) c.validate();

  // results[scene][setting]
  std::vector<std::vector<AblationRow>> results(cfg.scenes, std::vector<AblationRow>(settings.size()));
  parallel_for(cfg.scenes, threads, [&](std::size_t k) {
    SceneConfig sc = cfg.base.scene;
    sc.seed = derive_seed(cfg.base.seed, {k});
    const Scene scene = make_scene(sc, cfg.base.map_noise_sigma);
    const PipelineConfig base = cfg.base.resolved();
    auto cands = fuse_candidates(scene.maps, base.detect);
    cands = drop_candidates(cands, base.candidate_drop_fraction, derive_seed(cfg.base.seed, {k, 1}));
    for (std::size_t s = 0; s < settings.size(); ++s) {
      PipelineConfig c = settings[s].second;
      c.oracle.seed = derive_seed(cfg.base.oracle.seed, {k});
      const OraclePredictor oracle = make_oracle(scene.graph, c);
      const auto [g, stats] = build_graph_from_candidates(c, cands, oracle, 1);
      const MetricReport m = evaluate(g, scene.graph, sc.canvas(), c.metrics, 1);
      AblationRow& row = results[k][s];
      row.topo_precision = m.topo_precision;
      row.topo_recall = m.topo_recall;
      row.topo_f1 = m.topo_f1;
      row.apls = m.apls;
      row.iou = m.iou;
      row.vertices = static_cast<double>(g.vertex_count());
      row.edges = static_cast<double>(g.edge_count());
    }
  });

  std::vector<AblationRow> rows;
  const double n = static_cast<double>(cfg.scenes);
  for (std::size_t s = 0; s < settings.size(); ++s) {
    AblationRow row;
    row.axis = std::string(to_string(axis));
    row.setting = settings[s].first;
    row.scenes = cfg.scenes;
    for (std::size_t k = 0; k < cfg.scenes; ++k) {
      const AblationRow& x = results[k][s];
      row.topo_precision += x.topo_precision / n;
      row.topo_recall += x.topo_recall / n;
      row.topo_f1 += x.topo_f1 / n;
      row.apls += x.apls / n;
      row.iou += x.iou / n;
      row.vertices += x.vertices / n;
      row.edges += x.edges / n;
    }
    rows.push_back(row);
  }
  return rows;
}

std::string ablation_csv(const std::vector<AblationRow>& rows) {
  std::ostringstream os;
  os << "axis,setting,scenes,topo_precision,topo_recall,topo_f1,apls,iou,vertices,edges\n";
  char buf[512];
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof buf, "%s,%s,%zu,%.6f,%.6f,%.6f,%.6f,%.6f,%.1f,%.1f\n", r.axis.c_str(), r.setting.c_str(),
                  r.scenes, r.topo_precision, r.topo_recall, r.topo_f1, r.apls, r.iou, r.vertices, r.edges);
    os << buf;
  }
  return os.str();
}

}  // namespace roadnet
