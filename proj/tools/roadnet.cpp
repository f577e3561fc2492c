// roadnet: command line front end for the road graph extraction library.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "roadnet/adjacency.hpp"
#include "roadnet/decode.hpp"
#include "roadnet/detect.hpp"
#include "roadnet/error.hpp"
#include "roadnet/expand.hpp"
#include "roadnet/graph_io.hpp"
#include "roadnet/loss_fixture.hpp"
#include "roadnet/metrics.hpp"
#include "roadnet/parallel.hpp"
#include "roadnet/pipeline.hpp"
#include "roadnet/score_maps.hpp"
#include "roadnet/spatial_index.hpp"
#include "roadnet/synth.hpp"

namespace fs = std::filesystem;
using namespace roadnet;

namespace {

void emit(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-")
    std::cout << text;
  else
    write_text_file(path, text);
}

struct ConfigOptions {
  std::string config;
  std::vector<std::string> sets;

  void add(CLI::App* app) {
    app->add_option("--config", config, "JSON configuration file")->check(CLI::ExistingFile);
    app->add_option("--set", sets, "Override a configuration path, e.g. --set expand.d_merge=12");
  }

  PipelineConfig load() const {
    PipelineConfig cfg = config.empty() ? PipelineConfig{} : config_from_json(read_text_file(config));
    for (const auto& s : sets) {
      const auto eq = s.find('=');
      if (eq == std::string::npos) throw UsageError("--set expects key=value, got '" + s + "'");
      set_config_value(cfg, s.substr(0, eq), s.substr(eq + 1));
    }
    return cfg;
  }
};

/// Named flag that maps onto one configuration path.
struct Shortcut {
  std::string path;
  std::string value;
  CLI::Option* opt = nullptr;
};

struct Shortcuts {
  std::vector<std::unique_ptr<Shortcut>> items;

  void add(CLI::App* app, const std::string& flag, const std::string& path, const std::string& help) {
    auto s = std::make_unique<Shortcut>();
    s->path = path;
    s->opt = app->add_option(flag, s->value, help + " (" + path + ")");
    items.push_back(std::move(s));
  }

  void apply(PipelineConfig& cfg) const {
    for (const auto& s : items)
      if (s->opt->count() > 0) set_config_value(cfg, s->path, s->value);
  }
};

struct MapInput {
  std::string maps;
  std::vector<std::string> images;

  void add(CLI::App* app) {
    app->add_option("--maps", maps, "Score map tensor file (RGF1)")->check(CLI::ExistingFile);
    app->add_option("--images", images, "Keypoint, sampling and road grayscale images")
        ->expected(3)
        ->check(CLI::ExistingFile);
  }

  bool given() const { return !maps.empty() || !images.empty(); }

  ScoreMaps load() const {
    if (!maps.empty() && !images.empty()) throw UsageError("use either --maps or --images, not both");
    if (!maps.empty()) return read_score_maps(maps);
    if (images.size() == 3) return read_score_map_images(images[0], images[1], images[2]);
    throw UsageError("score maps required: pass --maps or --images");
  }
};

PlanarGraph load_graph(const std::string& path, bool cityscale) {
  return cityscale ? read_cityscale_graph(path) : read_graph(path);
}

/// Predictions covering the fused candidates and every resampled GT point,
/// so a file-backed run can also answer expansion queries on clean scenes.
std::vector<AdjacencyPrediction> oracle_records(const OraclePredictor& oracle, const std::vector<Vec2>& extra,
                                                std::size_t threads) {
  std::vector<Vec2> queries;
  SpatialIndex seen(8.0);
  auto push = [&](Vec2 p) {
    if (seen.nearest_within(p, 1.0)) return;
    seen.insert(p);
    queries.push_back(p);
  };
  for (const Vec2& p : extra) push(p);
  for (const Vec2& p : oracle.ground_truth().vertices()) push(p);
  return oracle.predict(queries, threads);
}

int run_synth(const ConfigOptions& co, const Shortcuts& sc, const std::string& graph_out, const std::string& maps_out,
              const std::string& pred_out, const std::string& pgm_prefix, std::size_t threads) {
  PipelineConfig cfg = co.load();
  sc.apply(cfg);
  cfg.validate();
  const Scene scene = make_scene(cfg.scene, cfg.map_noise_sigma);
  write_graph(graph_out, scene.graph);
  if (!maps_out.empty()) write_score_maps(maps_out, scene.maps);
  if (!pgm_prefix.empty()) {
    write_pgm(pgm_prefix + "_keypoint.pgm", scene.maps.keypoint);
    write_pgm(pgm_prefix + "_sampling.pgm", scene.maps.sampling);
    write_pgm(pgm_prefix + "_road.pgm", scene.maps.road);
  }
  if (!pred_out.empty()) {
    const PipelineConfig r = cfg.resolved();
    const OraclePredictor oracle = make_oracle(scene.graph, cfg);
    const auto cands = detect_tiled(scene.maps, r.detect, r.patch_size, r.patch_overlap, threads);
    const auto records = oracle_records(oracle, positions(cands), threads);
    write_predictions(pred_out, records);
  }
  std::cerr << "scene: " << scene.graph.vertex_count() << " vertices, " << scene.graph.edge_count() << " edges\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Road network graph extraction: detection, decoding, expansion and evaluation"};
  app.require_subcommand(1);
  app.option_defaults()->always_capture_default();
  std::size_t threads = default_thread_count();
  app.add_option("--threads", threads, "Worker threads (default: ROADNET_THREADS or hardware)")
      ->check(CLI::PositiveNumber);

  // synth
  auto* synth = app.add_subcommand("synth", "Generate a synthetic scene, its score maps and oracle predictions");
  ConfigOptions synth_cfg;
  synth_cfg.add(synth);
  Shortcuts synth_sc;
  synth_sc.add(synth, "--seed", "scene.seed", "Scene seed");
  synth_sc.add(synth, "--width", "scene.width", "Canvas width");
  synth_sc.add(synth, "--height", "scene.height", "Canvas height");
  synth_sc.add(synth, "--pitch", "scene.grid_pitch", "Grid pitch");
  synth_sc.add(synth, "--jitter", "scene.jitter", "Vertex jitter");
  synth_sc.add(synth, "--edge-drop", "scene.edge_drop_prob", "Edge drop probability");
  synth_sc.add(synth, "--diagonal", "scene.diagonal_prob", "Diagonal probability");
  synth_sc.add(synth, "--interval", "scene.sampling_interval", "Sampling interval");
  synth_sc.add(synth, "--noise", "map_noise_sigma", "Score map noise sigma");
  synth_sc.add(synth, "--oracle-sigma", "oracle.noise_sigma", "Oracle offset noise");
  std::string synth_graph, synth_maps, synth_preds, synth_pgm;
  synth->add_option("--graph", synth_graph, "Output graph JSON")->required();
  synth->add_option("--maps", synth_maps, "Output score map tensor");
  synth->add_option("--predictions", synth_preds, "Output oracle predictions (JSON lines)");
  synth->add_option("--pgm", synth_pgm, "Also write the maps as <prefix>_{keypoint,sampling,road}.pgm");

  // detect
  auto* detect = app.add_subcommand("detect", "Fuse candidate vertices from score maps");
  MapInput detect_in;
  detect_in.add(detect);
  DetectParams dp;
  int patch_size = 512, patch_overlap = 64;
  std::string detect_out;
  detect->add_option("--point-threshold", dp.point_threshold, "Keypoint/sampling threshold");
  detect->add_option("--road-threshold", dp.road_threshold, "Road-surface threshold");
  detect->add_option("--window", dp.window, "Local extremum window (odd)");
  detect->add_option("--nms-radius", dp.nms_radius, "NMS radius");
  detect->add_option("--road-nms-radius", dp.road_nms_radius, "Road supplement NMS radius");
  detect->add_option("--patch-size", patch_size, "Patch size");
  detect->add_option("--patch-overlap", patch_overlap, "Patch overlap");
  detect->add_option("-o,--out", detect_out, "Output candidate JSON (default stdout)");

  // decode
  auto* decode = app.add_subcommand("decode", "Decode candidates and adjacency predictions into a graph");
  std::string dec_cands, dec_preds, dec_out;
  DecodeParams decp;
  decode->add_option("--candidates", dec_cands, "Candidate JSON")->required()->check(CLI::ExistingFile);
  decode->add_option("--predictions", dec_preds, "Prediction JSON lines")->required()->check(CLI::ExistingFile);
  decode->add_option("--w", decp.w, "Angle weight");
  decode->add_option("--r", decp.r, "Match radius");
  decode->add_option("--t-valid", decp.t_valid, "Validity threshold");
  decode->add_option("-o,--out", dec_out, "Output graph JSON (default stdout)");

  // expand
  auto* expandc = app.add_subcommand("expand", "Grow a graph from its frontier vertices");
  std::string exp_graph, exp_preds, exp_gt, exp_out, exp_stats;
  ExpandParams ep;
  bool exp_gt_cityscale = false;
  expandc->add_option("--graph", exp_graph, "Input graph JSON")->required()->check(CLI::ExistingFile);
  expandc->add_option("--predictions", exp_preds, "Prediction JSON lines")->check(CLI::ExistingFile);
  expandc->add_option("--oracle-gt", exp_gt, "Answer queries with an oracle over this GT graph")
      ->check(CLI::ExistingFile);
  expandc->add_flag("--cityscale", exp_gt_cityscale, "The oracle GT is CityScale adjacency text");
  expandc->add_option("--d-merge", ep.d_merge, "Merge radius");
  expandc->add_option("--t-valid", ep.t_valid, "Merge threshold");
  expandc->add_option("--t-valid-expand", ep.t_valid_expand, "Insertion threshold");
  expandc->add_option("--iterations", ep.iterations, "Expansion passes");
  expandc->add_option("--back-edge-angle", ep.back_edge_angle_deg, "Back-edge suppression angle (deg)");
  expandc->add_flag("--include-isolated", ep.include_isolated, "Grow from degree-0 vertices too");
  expandc->add_option("-o,--out", exp_out, "Output graph JSON (default stdout)");
  expandc->add_option("--stats", exp_stats, "Per-iteration statistics JSON");

  // pipeline
  auto* pipe = app.add_subcommand("pipeline", "Run detection, decoding, expansion and optional evaluation");
  ConfigOptions pipe_cfg;
  pipe_cfg.add(pipe);
  Shortcuts pipe_sc;
  pipe_sc.add(pipe, "--strategy", "strategy", "decode_only, expand_only or hybrid");
  pipe_sc.add(pipe, "--seed", "seed", "Run seed");
  pipe_sc.add(pipe, "--scene-seed", "scene.seed", "Scene seed for --scene");
  pipe_sc.add(pipe, "--patch-size", "patch_size", "Patch size");
  pipe_sc.add(pipe, "--patch-overlap", "patch_overlap", "Patch overlap");
  pipe_sc.add(pipe, "--iterations", "expand.iterations", "Expansion passes");
  pipe_sc.add(pipe, "--drop-fraction", "candidate_drop_fraction", "Candidates removed before decoding");
  MapInput pipe_in;
  pipe_in.add(pipe);
  bool pipe_scene = false, pipe_cityscale = false;
  std::string pipe_preds, pipe_gt, pipe_out, pipe_report, pipe_timings, pipe_cands;
  pipe->add_flag("--scene", pipe_scene, "Synthesize the input scene from the configuration");
  pipe->add_option("--predictions", pipe_preds, "Prediction JSON lines")->check(CLI::ExistingFile);
  pipe->add_option("--gt", pipe_gt, "Ground-truth graph (oracle source and evaluation target)")
      ->check(CLI::ExistingFile);
  pipe->add_flag("--cityscale", pipe_cityscale, "The GT file is CityScale adjacency text");
  pipe->add_option("-o,--out", pipe_out, "Output graph JSON (default stdout)");
  pipe->add_option("--report", pipe_report, "Metric report JSON");
  pipe->add_option("--timings", pipe_timings, "Stage timing JSON");
  pipe->add_option("--candidates-out", pipe_cands, "Fused candidate JSON");

  // eval
  auto* eval = app.add_subcommand("eval", "Compare a predicted graph with ground truth");
  std::string ev_pred, ev_gt, ev_out;
  bool ev_cityscale = false;
  int ev_w = 0, ev_h = 0;
  MetricParams mp;
  eval->add_option("--pred", ev_pred, "Predicted graph JSON")->required()->check(CLI::ExistingFile);
  eval->add_option("--gt", ev_gt, "Ground-truth graph")->required()->check(CLI::ExistingFile);
  eval->add_flag("--cityscale", ev_cityscale, "The GT file is CityScale adjacency text");
  eval->add_option("--width", ev_w, "Canvas width")->required()->check(CLI::PositiveNumber);
  eval->add_option("--height", ev_h, "Canvas height")->required()->check(CLI::PositiveNumber);
  eval->add_option("--hole-interval", mp.topo.hole_interval, "TOPO resampling interval");
  eval->add_option("--match-radius", mp.topo.match_radius, "TOPO match radius");
  eval->add_option("--propagation", mp.topo.propagation_radius, "TOPO propagation radius");
  eval->add_option("--num-seeds", mp.topo.num_seeds, "TOPO seed count");
  eval->add_option("--seed", mp.topo.seed, "TOPO sampling seed");
  eval->add_option("--snap-radius", mp.apls.snap_radius, "APLS snap radius");
  eval->add_option("--control-interval", mp.apls.control_interval, "APLS control point spacing");
  eval->add_option("--iou-width", mp.iou_width, "Raster line width for IoU");
  eval->add_option("-o,--out", ev_out, "Output report JSON (default stdout)");

  // ablate
  auto* ablate = app.add_subcommand("ablate", "Sweep strategies, expansion counts or thresholds on synthetic scenes");
  ConfigOptions abl_cfg;
  abl_cfg.add(ablate);
  std::string abl_axis = "strategy", abl_out;
  std::size_t abl_scenes = 5;
  ablate->add_option("--axis", abl_axis, "strategy, expansion_count, thresholds or all");
  ablate->add_option("--scenes", abl_scenes, "Scenes per setting")->check(CLI::PositiveNumber);
  ablate->add_option("-o,--out", abl_out, "Output CSV (default stdout)");

  // losscheck
  auto* losscheck = app.add_subcommand("losscheck", "Evaluate a loss fixture file and report every component");
  std::string lc_path;
  double lc_tol = 1e-9;
  losscheck->add_option("fixture", lc_path, "Fixture JSON")->required()->check(CLI::ExistingFile);
  losscheck->add_option("--tol", lc_tol, "Relative tolerance");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (synth->parsed()) return run_synth(synth_cfg, synth_sc, synth_graph, synth_maps, synth_preds, synth_pgm, threads);

    if (detect->parsed()) {
      if (patch_overlap < 0 || patch_overlap >= patch_size) throw UsageError("patch overlap must be in [0, patch size)");
      const ScoreMaps maps = detect_in.load();
      emit(detect_out, candidates_to_json(detect_tiled(maps, dp, patch_size, patch_overlap, threads)));
      return 0;
    }

    if (decode->parsed()) {
      const auto cands = candidates_from_json(read_text_file(dec_cands));
      const FilePredictor pred = FilePredictor::load(dec_preds);
      const auto pts = positions(cands);
      emit(dec_out, graph_to_json(decode_initial_graph(pts, pred.predict(pts, threads), decp, threads)));
      return 0;
    }

    if (expandc->parsed()) {
      if (exp_preds.empty() == exp_gt.empty()) throw UsageError("pass exactly one of --predictions or --oracle-gt");
      const PlanarGraph g = read_graph(exp_graph);
      std::unique_ptr<Predictor> pred;
      if (!exp_preds.empty()) {
        pred = std::make_unique<FilePredictor>(FilePredictor::load(exp_preds));
      } else {
        PipelineConfig cfg;
        pred = std::make_unique<OraclePredictor>(make_oracle(load_graph(exp_gt, exp_gt_cityscale), cfg));
      }
      const auto [out, stats] = expand(g, *pred, ep, threads);
      emit(exp_out, graph_to_json(out));
      if (!exp_stats.empty()) {
        PipelineResult r;
        r.graph = out;
        r.expand_stats = stats;
        emit(exp_stats, r.timings_json());
      }
      return 0;
    }

    if (pipe->parsed()) {
      PipelineConfig cfg = pipe_cfg.load();
      pipe_sc.apply(cfg);
      cfg.validate();
      if (pipe_scene && pipe_in.given()) throw UsageError("--scene cannot be combined with --maps/--images");
      std::optional<Scene> scene;
      ScoreMaps maps;
      std::optional<PlanarGraph> gt;
      if (pipe_scene) {
        scene = make_scene(cfg.scene, cfg.map_noise_sigma);
        maps = scene->maps;
        gt = scene->graph;
      } else {
        maps = pipe_in.load();
      }
      if (!pipe_gt.empty()) gt = load_graph(pipe_gt, pipe_cityscale);
      std::unique_ptr<Predictor> pred;
      if (!pipe_preds.empty())
        pred = std::make_unique<FilePredictor>(FilePredictor::load(pipe_preds));
      else if (gt)
        pred = std::make_unique<OraclePredictor>(make_oracle(*gt, cfg));
      else
        throw UsageError("no predictions: pass --predictions, --gt or --scene");
      PipelineInputs in;
      in.maps = &maps;
      in.predictor = pred.get();
      in.ground_truth = gt ? &*gt : nullptr;
      const PipelineResult r = run_pipeline(cfg, in, threads);
      emit(pipe_out, graph_to_json(r.graph));
      if (!pipe_cands.empty()) emit(pipe_cands, candidates_to_json(r.candidates));
      if (!pipe_timings.empty()) emit(pipe_timings, r.timings_json());
      if (r.metrics) {
        if (!pipe_report.empty()) emit(pipe_report, r.metrics->to_json());
        std::fprintf(stderr, "topo p=%.4f r=%.4f f1=%.4f apls=%.4f iou=%.4f\n", r.metrics->topo_precision,
                     r.metrics->topo_recall, r.metrics->topo_f1, r.metrics->apls, r.metrics->iou);
      } else if (!pipe_report.empty()) {
        throw UsageError("--report needs a ground truth (--gt or --scene)");
      }
      return 0;
    }

    if (eval->parsed()) {
      const PlanarGraph pred = read_graph(ev_pred);
      const PlanarGraph gt = load_graph(ev_gt, ev_cityscale);
      emit(ev_out, evaluate(pred, gt, Canvas{ev_w, ev_h}, mp, threads).to_json());
      return 0;
    }

    if (ablate->parsed()) {
      AblationConfig acfg;
      acfg.base = abl_cfg.load();
      acfg.scenes = abl_scenes;
      std::vector<AblationRow> rows;
      if (abl_axis == "all") {
        for (auto axis : {AblationAxis::strategy, AblationAxis::expansion_count, AblationAxis::thresholds}) {
          auto part = run_ablation(axis, acfg, threads);
          rows.insert(rows.end(), part.begin(), part.end());
        }
      } else {
        rows = run_ablation(ablation_axis_from_string(abl_axis), acfg, threads);
      }
      emit(abl_out, ablation_csv(rows));
      return 0;
    }

    if (losscheck->parsed()) {
      const LossCheckReport report = run_losscheck(read_text_file(lc_path), lc_tol);
      std::cout << report.to_text();
      return report.all_ok() ? 0 : 1;
    }
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 2;
}
