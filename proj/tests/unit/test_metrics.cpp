#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <tuple>
#include <vector>

#include "helpers.hpp"
#include "roadnet/error.hpp"
#include "roadnet/metrics.hpp"
#include "roadnet/synth.hpp"

using namespace roadnet;

namespace {

PlanarGraph polyline(std::vector<Vec2> pts) {
  std::vector<Edge> e;
  for (std::size_t i = 1; i < pts.size(); ++i) e.push_back({i - 1, i});
  return build_graph(pts, e);
}

PlanarGraph segments(const std::vector<std::pair<Vec2, Vec2>>& segs) {
  std::vector<Vec2> pts;
  std::vector<Edge> e;
  for (auto [a, b] : segs) {
    pts.push_back(a);
    pts.push_back(b);
    e.push_back({pts.size() - 2, pts.size() - 1});
  }
  return build_graph(pts, e);
}

// Exhaustive-seed TOPO recall and precision for a horizontal line on
// [0, length] against the same line with the open gap (gap_lo, gap_hi)
// removed, using point counting on the 1-D sample positions.
std::pair<double, double> line_gap_topo(double length, double gap_lo, double gap_hi, double interval,
                                        double match_radius, double propagation) {
  std::vector<double> gt, pred;
  for (double x = 0; x <= length + 1e-9; x += interval) gt.push_back(x);
  for (double x : gt)
    if (x <= gap_lo || x >= gap_hi) pred.push_back(x);
  auto piece = [&](double x) { return x <= gap_lo ? 0 : 1; };
  double matched_sum = 0, holes_sum = 0, marbles_sum = 0;
  for (double s : gt) {
    std::vector<double> holes;
    for (double x : gt)
      if (std::abs(x - s) <= propagation + 1e-9) holes.push_back(x);
    holes_sum += static_cast<double>(holes.size());
    double m = 0;
    bool found = false;
    for (double x : pred)
      if (std::abs(x - s) <= match_radius && (!found || std::abs(x - s) < std::abs(m - s))) {
        m = x;
        found = true;
      }
    if (!found) continue;
    std::vector<double> marbles;
    for (double x : pred)
      if (piece(x) == piece(m) && std::abs(x - m) <= propagation + 1e-9) marbles.push_back(x);
    marbles_sum += static_cast<double>(marbles.size());
    std::vector<std::tuple<double, std::size_t, std::size_t>> pairs;
    for (std::size_t h = 0; h < holes.size(); ++h)
      for (std::size_t k = 0; k < marbles.size(); ++k)
        if (std::abs(holes[h] - marbles[k]) <= match_radius) pairs.push_back({std::abs(holes[h] - marbles[k]), h, k});
    std::sort(pairs.begin(), pairs.end());
    std::vector<char> hu(holes.size(), 0), mu(marbles.size(), 0);
    for (auto [d, h, k] : pairs)
      if (!hu[h] && !mu[k]) {
        hu[h] = mu[k] = 1;
        ++matched_sum;
      }
  }
  return {matched_sum / holes_sum, matched_sum / marbles_sum};
}

}  // namespace

TEST_SUITE("metrics") {
  TEST_CASE("topo identity and empty prediction") {
    const PlanarGraph g = polyline({{10, 10}, {200, 10}, {200, 150}});
    const TopoResult t = topo(g, g);
    CHECK(t.precision == 1.0);
    CHECK(t.recall == 1.0);
    CHECK(t.f1 == 1.0);
    const TopoResult e = topo(PlanarGraph{}, g);
    CHECK(e.recall == 0.0);
    CHECK(e.f1 == 0.0);
    CHECK(f1_score(0, 0) == 0.0);
    CHECK(f1_score(1, 0.5) == doctest::Approx(2.0 / 3));
  }

  TEST_CASE("topo on a line with a gap") {
    const PlanarGraph gt = polyline({{0, 200}, {400, 200}});
    const PlanarGraph pred = segments({{{0, 200}, {150, 200}}, {{250, 200}, {400, 200}}});

    TopoParams local;
    local.propagation_radius = 10;
    local.num_seeds = 4000;
    const TopoResult near = topo(pred, gt, local);
    CHECK(std::abs(near.recall - 0.75) <= 0.05);
    CHECK(near.precision >= 0.99);
    const auto [r10, p10] = line_gap_topo(400, 150, 250, 5, 8, 10);
    CHECK(std::abs(near.recall - r10) <= 0.02);
    CHECK(std::abs(near.precision - p10) <= 0.01);

    TopoParams wide;
    wide.num_seeds = 4000;
    const TopoResult far = topo(pred, gt, wide);
    const auto [r150, p150] = line_gap_topo(400, 150, 250, 5, 8, 150);
    CHECK(std::abs(far.recall - r150) <= 0.02);
    CHECK(std::abs(far.precision - p150) <= 0.01);
    CHECK(far.precision >= 0.99);
  }

  TEST_CASE("resampling ignores subdivision") {
    const PlanarGraph coarse = polyline({{0, 0}, {100, 0}, {100, 80}});
    const PlanarGraph fine = densify(coarse, 7.0);
    const PlanarGraph a = resample_chains(coarse, 5.0), b = resample_chains(fine, 5.0);
    REQUIRE(a.vertex_count() == b.vertex_count());
    for (VertexId v = 0; v < a.vertex_count(); ++v) CHECK(distance(a.position(v), b.position(v)) < 1e-9);
    const TopoResult t = topo(fine, coarse);
    CHECK(t.precision == 1.0);
    CHECK(t.recall == 1.0);
    CHECK(apls(fine, coarse) == doctest::Approx(1.0));
    // closed loop
    const PlanarGraph loop = build_graph(std::vector<Vec2>{{0, 0}, {50, 0}, {50, 50}, {0, 50}},
                                         std::vector<Edge>{{0, 1}, {1, 2}, {2, 3}, {0, 3}});
    const PlanarGraph rl = resample_chains(loop, 30.0);
    CHECK(rl.vertex_count() == 7);
    CHECK(rl.edge_count() == 7);
    CHECK(rl.position(0) == Vec2{0, 0});
    CHECK(rl.position(1).x == doctest::Approx(200.0 / 7));
    CHECK(apls(densify(loop, 9.0), loop) == doctest::Approx(1.0));
  }

  TEST_CASE("apls on two disjoint segments") {
    const PlanarGraph gt = segments({{{0, 0}, {100, 0}}, {{0, 100}, {100, 100}}});
    const PlanarGraph pred = segments({{{0, 0}, {100, 0}}});
    // gt -> pred: 3 exact pairs on the kept segment, 3 missing pairs at 1
    CHECK(apls_directional(gt, pred) == doctest::Approx(0.5));
    CHECK(apls_directional(pred, gt) == doctest::Approx(1.0));
    CHECK(apls(pred, gt) == doctest::Approx(2.0 / 3));
    CHECK(apls(gt, pred) == apls(pred, gt));
    CHECK(apls(PlanarGraph{}, gt) == 0.0);
    CHECK(apls(PlanarGraph{}, PlanarGraph{}) == 1.0);
  }

  TEST_CASE("apls with a cut corner") {
    const PlanarGraph gt = polyline({{0, 0}, {100, 0}, {100, 100}});
    const double a = 20.0 / (2.0 - std::sqrt(2.0));  // corner cut saving 20 px
    const PlanarGraph pred = polyline({{0, 0}, {100 - a, 0}, {100, a}, {100, 100}});
    CHECK(total_length(pred) == doctest::Approx(180.0));
    // gt control points every 50 px of arc; the corner misses the cut path.
    const double gt_terms = 4 + 20.0 / 150 + 20.0 / 200 + 20.0 / 100 + 20.0 / 150;
    // pred control points every 45 px; the one on the cut misses gt.
    const double pred_terms = 4 + 20.0 / 135 + 20.0 / 180 + 20.0 / 90 + 20.0 / 135;
    const double s1 = 1 - gt_terms / 10, s2 = 1 - pred_terms / 10;
    CHECK(apls_directional(gt, pred) == doctest::Approx(s1).epsilon(1e-9));
    CHECK(apls_directional(pred, gt) == doctest::Approx(s2).epsilon(1e-9));
    CHECK(apls(pred, gt) == doctest::Approx(2 * s1 * s2 / (s1 + s2)).epsilon(1e-9));
  }

  TEST_CASE("graph iou fixtures") {
    const PlanarGraph g = polyline({{2, 5}, {8, 5}});
    CHECK(graph_iou(g, g, {12, 12}) == 1.0);
    CHECK(graph_iou(polyline({{2, 6}, {8, 6}}), g, {12, 12}) == 0.5);
    CHECK(graph_iou(polyline({{50, 50}, {60, 60}}), g, {100, 100}) == 0.0);
    CHECK(graph_iou(PlanarGraph{}, PlanarGraph{}, {10, 10}) == 1.0);
  }

  TEST_CASE("identities, ranges and determinism on random graphs") {
    for (std::uint64_t seed = 1; seed <= 12; ++seed) {
      const PlanarGraph g = testutil::random_graph(seed, 40, 55, 400.0, 100.0);
      const PlanarGraph h = testutil::random_graph(seed + 100, 40, 55, 400.0, 100.0);
      const TopoResult t = topo(g, g);
      CHECK(t.precision == 1.0);
      CHECK(t.recall == 1.0);
      CHECK(t.f1 == 1.0);
      CHECK(apls(g, g) == 1.0);
      CHECK(graph_iou(g, g, {400, 400}) == 1.0);

      const MetricReport r = evaluate(h, g, {400, 400});
      for (double v : {r.topo_precision, r.topo_recall, r.topo_f1, r.apls, r.iou}) {
        CHECK(v >= 0.0);
        CHECK(v <= 1.0);
      }
      CHECK(apls(h, g) == apls(g, h));
      CHECK(evaluate(h, g, {400, 400}, {}, 3).to_json() == r.to_json());
      MetricParams other;
      other.topo.seed = 5;
      const auto t2 = topo(h, g, other.topo);
      CHECK(t2.holes > 0);
    }
  }

  TEST_CASE("apls identity with real-valued coordinates") {
    std::mt19937_64 rng(29);
    std::uniform_real_distribution<double> coord(5, 395);
    for (int k = 0; k < 20; ++k) {
      std::vector<Vec2> pts;
      for (int i = 0; i < 30; ++i) pts.push_back({coord(rng), coord(rng)});
      std::vector<Edge> edges;
      for (std::size_t i = 0; i + 1 < pts.size(); i += 2) edges.push_back({i, i + 1});
      const PlanarGraph g = build_graph(pts, edges);
      CHECK(apls(g, g) == 1.0);
    }
  }

  TEST_CASE("deleting prediction edges never raises topo recall") {
    std::mt19937_64 rng(17);
    SceneConfig cfg;
    cfg.jitter = 4;
    cfg.edge_drop_prob = 0.15;
    cfg.diagonal_prob = 0.1;
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
      cfg.seed = seed;
      const PlanarGraph g = gen_scene(cfg);
      PlanarGraph pred = g;
      double prev = topo(pred, g).recall;
      for (int step = 0; step < 5 && pred.edge_count() > 0; ++step) {
        std::vector<Edge> keep;
        for (const Edge& e : pred.edges())
          if (rng() % 5 != 0) keep.push_back(e);
        pred = build_graph(pred.vertices(), keep);
        const double r = topo(pred, g).recall;
        CHECK(r <= prev);
        prev = r;
      }
    }
  }

  TEST_CASE("report json and parameter validation") {
    const PlanarGraph g = polyline({{10, 10}, {90, 10}});
    const std::string json = evaluate(g, g, {100, 100}).to_json();
    CHECK(json.find("\"topo_f1\": 1") != std::string::npos);
    CHECK(json.find("\"propagation_radius\": 150") != std::string::npos);
    TopoParams tp;
    tp.match_radius = 0;
    CHECK_THROWS_AS(tp.validate(), ValidationError);
    AplsParams ap;
    ap.control_interval = -1;
    CHECK_THROWS_AS(ap.validate(), ValidationError);
    CHECK_THROWS_AS(graph_iou(g, g, {0, 0}), ValidationError);
  }
}
