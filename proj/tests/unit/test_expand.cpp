#include <doctest.h>

#include <cmath>
#include <functional>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "helpers.hpp"
#include "roadnet/error.hpp"
#include "roadnet/expand.hpp"
#include "roadnet/metrics.hpp"
#include "roadnet/pipeline.hpp"

using namespace roadnet;

namespace {

// Answers from a fixed table of absolute targets; unknown points get padding.
class TablePredictor final : public Predictor {
 public:
  std::map<std::pair<double, double>, std::vector<AdjacencyEntry>> table;
  bool strict = false;
  std::size_t n_queries() const override { return 10; }
  AdjacencyPrediction predict_one(Vec2 q) const override {
    AdjacencyPrediction p;
    p.origin = q;
    auto it = table.find({q.x, q.y});
    if (it == table.end() && strict) throw LookupError("no record for query");
    if (it != table.end()) p.entries = it->second;
    p.entries.resize(10);
    return p;
  }
};

double topo_f1(const PlanarGraph& pred, const PlanarGraph& gt) { return topo(pred, gt).f1; }

struct DropSetup {
  PipelineConfig cfg;
  Scene scene;
  std::vector<Candidate> cands;
};

DropSetup drop_setup(std::uint64_t seed, double fraction) {
  DropSetup s;
  s.cfg.scene.jitter = 4;
  s.cfg.scene.edge_drop_prob = 0.15;
  s.cfg.scene.diagonal_prob = 0.1;
  s.cfg.scene.seed = seed;
  s.scene = make_scene(s.cfg.scene);
  s.cands = drop_candidates(fuse_candidates(s.scene.maps, DetectParams{}), fraction, seed);
  return s;
}

}  // namespace

TEST_SUITE("expand") {
  TEST_CASE("frontier of path, cycle and random trees") {
    const std::vector<Vec2> pts{{0, 0}, {10, 0}, {20, 0}};
    const std::vector<Edge> path{{0, 1}, {1, 2}};
    CHECK(frontier(build_graph(pts, path)) == std::vector<VertexId>{0, 2});
    const std::vector<Edge> cycle{{0, 1}, {1, 2}, {0, 2}};
    CHECK(frontier(build_graph(pts, cycle)).empty());
    CHECK(frontier(build_graph(pts, std::vector<Edge>{{0, 1}}), true) == std::vector<VertexId>{0, 1, 2});

    std::mt19937_64 rng(12);
    int trees = 0;
    for (int attempt = 0; attempt < 2000 && trees < 10; ++attempt) {
      const std::size_t n = 40;
      std::vector<Vec2> tp;
      std::vector<Edge> te;
      for (std::size_t i = 0; i < n; ++i) {
        tp.push_back({double(i), double(i * i % 17)});
        if (i > 0) te.push_back(Edge::canonical(i, std::uniform_int_distribution<std::size_t>(0, i - 1)(rng)));
      }
      const PlanarGraph t = build_graph(tp, te);
      std::vector<std::size_t> deg(n, 0);
      for (const Edge& e : te) ++deg[e.a], ++deg[e.b];
      std::vector<VertexId> leaves;
      for (std::size_t i = 0; i < n; ++i)
        if (deg[i] == 1) leaves.push_back(i);
      if (leaves.size() != 20) continue;
      ++trees;
      CHECK(frontier(t) == leaves);
    }
    CHECK(trees == 10);
  }

  TEST_CASE("merge into a nearby disconnected vertex") {
    const std::vector<Vec2> pts{{0, 0}, {20, 0}, {43, 0}};
    const std::vector<Edge> edges{{0, 1}};
    const PlanarGraph g = build_graph(pts, edges);
    TablePredictor p;
    p.table[{20, 0}] = {{{20, 0}, 1.0}, {{-20, 0}, 1.0}};
    ExpandParams params;
    const auto [out, stats] = expand_once(g, p, params);
    CHECK(out.vertex_count() == 3);
    CHECK(out.has_edge(1, 2));
    CHECK(stats.merges == 1);
    CHECK(stats.insertions == 0);
    CHECK(stats.frontier == 2);
  }

  TEST_CASE("insertion into empty space") {
    const std::vector<Vec2> pts{{0, 0}, {20, 0}};
    const std::vector<Edge> edges{{0, 1}};
    TablePredictor p;
    p.table[{20, 0}] = {{{25, 0}, 0.9}, {{0, 25}, 0.6}};  // second passes t_valid only
    const auto [out, stats] = expand_once(build_graph(pts, edges), p, ExpandParams{});
    CHECK(out.vertex_count() == 3);
    CHECK(out.position(2) == Vec2{45, 0});
    CHECK(out.has_edge(1, 2));
    CHECK(stats.insertions == 1);
    CHECK(stats.merges == 0);
    CHECK(out.degree(2) >= 1);
  }

  TEST_CASE("back-edge predictions are ignored") {
    const std::vector<Vec2> pts{{0, 0}, {20, 0}, {-30, 1}};
    const std::vector<Edge> edges{{0, 1}};
    TablePredictor p;
    p.table[{20, 0}] = {{{-20, 2}, 1.0}, {{-50, 1}, 1.0}};  // along the incoming edge
    const auto [out, stats] = expand_once(build_graph(pts, edges), p, ExpandParams{});
    CHECK(out.edge_count() == 1);
    CHECK_FALSE(stats.changed());
  }

  TEST_CASE("vertices inserted in a pass are merge targets in that pass") {
    const std::vector<Vec2> pts{{0, 0}, {20, 0}, {60, 0}, {80, 0}};
    const std::vector<Edge> edges{{0, 1}, {2, 3}};
    TablePredictor p;
    p.table[{20, 0}] = {{{20, 0}, 1.0}};
    p.table[{60, 0}] = {{{-18, 0}, 1.0}};
    const auto [out, stats] = expand_once(build_graph(pts, edges), p, ExpandParams{});
    CHECK(out.vertex_count() == 5);
    CHECK(out.has_edge(1, 4));
    CHECK(out.has_edge(2, 4));
    CHECK(stats.insertions == 1);
    CHECK(stats.merges == 1);
    CHECK(frontier(out) == std::vector<VertexId>{0, 3});
  }

  TEST_CASE("identity without frontier or iterations") {
    const std::vector<Vec2> pts{{0, 0}, {20, 0}, {10, 15}};
    const std::vector<Edge> cycle{{0, 1}, {1, 2}, {0, 2}};
    const PlanarGraph g = build_graph(pts, cycle);
    TablePredictor p;
    const auto [out, stats] = expand(g, p, ExpandParams{});
    CHECK(out == g);
    REQUIRE(stats.iterations.size() == 1);
    CHECK(stats.iterations[0] == ExpandIterationStats{});

    const std::vector<Edge> path{{0, 1}};
    ExpandParams zero;
    zero.iterations = 0;
    p.table[{20, 0}] = {{{25, 0}, 1.0}};
    const auto [same, none] = expand(build_graph(pts, path), p, zero);
    CHECK(same == build_graph(pts, path));
    CHECK(none.iterations.empty());
  }

  TEST_CASE("lookup failure names the frontier vertex") {
    const std::vector<Vec2> pts{{0, 0}, {20, 0}, {100, 0}, {120, 0}};
    const std::vector<Edge> edges{{0, 1}, {2, 3}};
    TablePredictor p;
    p.strict = true;
    p.table[{0, 0}] = {};
    p.table[{20, 0}] = {};
    p.table[{100, 0}] = {};
    try {
      expand_once(build_graph(pts, edges), p, ExpandParams{});
      FAIL("expected LookupError");
    } catch (const LookupError& e) {
      CHECK(std::string(e.what()).find("frontier vertex 3") != std::string::npos);
    }
  }

  TEST_CASE("parameter validation") {
    ExpandParams p;
    p.d_merge = 0;
    CHECK_THROWS_AS(p.validate(), ValidationError);
    p = {};
    p.iterations = -1;
    CHECK_THROWS_AS(p.validate(), ValidationError);
  }

  TEST_CASE("growth invariants on a corrupted scene") {
    auto s = drop_setup(5, 0.1);
    s.cfg.oracle.noise_sigma = 1.5;
    s.cfg.oracle.spurious_prob = 0.2;
    const OraclePredictor oracle = make_oracle(s.scene.graph, s.cfg.resolved());
    const auto cands = positions(s.cands);
    PlanarGraph g = decode_initial_graph(cands, oracle.predict(cands), DecodeParams{});
    const double cap = oracle.config().reach + ExpandParams{}.d_merge + 5 * 1.5;
    bool quiet = false;
    for (int it = 0; it < 7; ++it) {
      const auto [next, stats] = expand_once(g, oracle, s.cfg.resolved().expand);
      CHECK(next.vertex_count() >= g.vertex_count());
      CHECK(next.edge_count() >= g.edge_count());
      for (VertexId v = g.vertex_count(); v < next.vertex_count(); ++v) CHECK(next.degree(v) >= 1);
      for (const Edge& e : next.edges())
        if (!g.has_edge(e.a, e.b)) CHECK(next.edge_length(e) <= cap);
      if (quiet) CHECK_FALSE(stats.changed());
      quiet = quiet || !stats.changed();
      g = next;
    }
  }

  TEST_CASE("expansion repairs deleted candidates") {
    double decode_sum = 0, hybrid_sum = 0;
    for (std::uint64_t seed = 1; seed <= 4; ++seed) {
      auto s = drop_setup(seed, 0.1);
      const OraclePredictor oracle = make_oracle(s.scene.graph, s.cfg.resolved());
      PipelineConfig cfg = s.cfg;
      cfg.strategy = Strategy::decode_only;
      decode_sum += topo_f1(build_graph_from_candidates(cfg, s.cands, oracle).first, s.scene.graph);
      cfg.strategy = Strategy::hybrid;
      cfg.expand.iterations = 3;
      const auto [g, stats] = build_graph_from_candidates(cfg, s.cands, oracle);
      hybrid_sum += topo_f1(g, s.scene.graph);
      CHECK(stats.totals().insertions + stats.totals().merges > 0);
    }
    CHECK(hybrid_sum / 4 >= 0.95);
    CHECK(hybrid_sum > decode_sum);
  }

  TEST_CASE("expand-only recovers components from isolated candidates") {
    for (std::uint64_t seed = 1; seed <= 3; ++seed) {
      auto s = drop_setup(seed, 0.0);
      s.cfg.strategy = Strategy::expand_only;
      const PipelineConfig cfg = s.cfg.resolved();
      const OraclePredictor oracle = make_oracle(s.scene.graph, cfg);
      const auto [g, stats] = build_graph_from_candidates(cfg, s.cands, oracle);
      CHECK(component_count(remove_isolated(g)) == component_count(s.scene.graph));
      CHECK(topo_f1(g, s.scene.graph) >= 0.99);
      for (VertexId v = 0; v < g.vertex_count(); ++v) CHECK(g.degree(v) >= 1);
    }
  }
}
