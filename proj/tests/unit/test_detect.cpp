#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "helpers.hpp"
#include "roadnet/detect.hpp"
#include "roadnet/error.hpp"
#include "roadnet/graph_io.hpp"
#include "roadnet/pipeline.hpp"
#include "roadnet/score_maps.hpp"
#include "roadnet/synth.hpp"

using namespace roadnet;

namespace {

void add_bump(Grid& g, double cx, double cy, double peak, double sigma) {
  for (int y = 0; y < g.height; ++y)
    for (int x = 0; x < g.width; ++x) {
      const double r2 = (x - cx) * (x - cx) + (y - cy) * (y - cy);
      g.at(x, y) = std::max(g.at(x, y), static_cast<float>(peak * std::exp(-r2 / (2 * sigma * sigma))));
    }
}

// Every pixel >= threshold that beats its whole window, ties kept only by the
// lexicographically smaller pixel.
std::vector<Vec2> window_scan(const Grid& g, double thr, int window) {
  std::vector<Vec2> out;
  const int h = window / 2;
  for (int x = 0; x < g.width; ++x)
    for (int y = 0; y < g.height; ++y) {
      const float v = g.at(x, y);
      if (v < thr) continue;
      bool keep = true;
      for (int dx = -h; dx <= h && keep; ++dx)
        for (int dy = -h; dy <= h && keep; ++dy) {
          if (dx == 0 && dy == 0) continue;
          const int nx = x + dx, ny = y + dy;
          if (!g.contains(nx, ny)) continue;
          const float w = g.at(nx, ny);
          if (w > v || (w == v && std::pair{nx, ny} < std::pair{x, y})) keep = false;
        }
      if (keep) out.push_back({double(x), double(y)});
    }
  return out;
}

std::vector<Candidate> greedy_nms(std::vector<Candidate> c, double radius) {
  std::sort(c.begin(), c.end(), [](const Candidate& a, const Candidate& b) {
    if (a.score != b.score) return a.score > b.score;
    if (a.position != b.position) return a.position < b.position;
    return a.source < b.source;
  });
  std::vector<Candidate> kept;
  std::vector<char> dead(c.size(), 0);
  for (std::size_t i = 0; i < c.size(); ++i) {
    if (dead[i]) continue;
    kept.push_back(c[i]);
    for (std::size_t j = i + 1; j < c.size(); ++j)
      if (distance(c[i].position, c[j].position) <= radius) dead[j] = 1;
  }
  return kept;
}

std::vector<Candidate> random_cands(std::mt19937_64& rng, std::size_t n, double extent, bool coarse) {
  std::uniform_real_distribution<double> coord(0, extent);
  std::uniform_int_distribution<int> grid(0, static_cast<int>(extent));
  std::uniform_int_distribution<int> score(0, 20);
  std::vector<Candidate> out;
  for (std::size_t i = 0; i < n; ++i) {
    Candidate c;
    c.position = coarse ? Vec2{double(grid(rng)), double(grid(rng))} : Vec2{coord(rng), coord(rng)};
    c.score = score(rng) / 20.0;
    c.source = static_cast<CandidateSource>(i % 3);
    out.push_back(c);
  }
  return out;
}

double min_pairwise(const std::vector<Candidate>& c) {
  double m = INFINITY;
  for (std::size_t i = 0; i < c.size(); ++i)
    for (std::size_t j = i + 1; j < c.size(); ++j) m = std::min(m, distance(c[i].position, c[j].position));
  return m;
}

}  // namespace

TEST_SUITE("vertex-detect") {
  TEST_CASE("single bump") {
    Grid g(64, 64);
    add_bump(g, 20, 30, 0.9, 2.0);
    const auto c = local_extrema(g, 0.5, 5);
    REQUIRE(c.size() == 1);
    CHECK(c[0].position == Vec2{20, 30});
    CHECK(c[0].score == doctest::Approx(0.9));
  }

  TEST_CASE("uniform zero map") {
    CHECK(local_extrema(Grid(32, 32), 0.5, 5).empty());
    CHECK(local_extrema(Grid(32, 32, 0.7f), 0.5, 5).size() == 1);  // flat plateau keeps one pixel
  }

  TEST_CASE("two bumps 4 px apart, window 9") {
    Grid g(40, 40);
    add_bump(g, 15, 20, 0.9, 1.5);
    add_bump(g, 19, 20, 0.8, 1.5);
    const auto c = local_extrema(g, 0.5, 9);
    REQUIRE(c.size() == 1);
    CHECK(c[0].position == Vec2{15, 20});
    CHECK(positions(c) == window_scan(g, 0.5, 9));
  }

  TEST_CASE("plateau keeps the lexicographically smallest pixel") {
    Grid g(10, 10);
    g.at(4, 4) = 0.8f;
    g.at(5, 4) = 0.8f;
    g.at(4, 5) = 0.8f;
    const auto c = local_extrema(g, 0.5, 3);
    REQUIRE(c.size() == 1);
    CHECK(c[0].position == Vec2{4, 4});
  }

  TEST_CASE("local extrema equal exhaustive window scan") {
    std::mt19937_64 rng(3);
    std::uniform_int_distribution<int> level(0, 10);
    for (int trial = 0; trial < 30; ++trial) {
      Grid g(37, 23);
      for (auto& v : g.values) v = level(rng) / 10.0f;  // coarse levels force ties
      for (int w : {3, 5, 7}) {
        CHECK(positions(local_extrema(g, 0.3, w)) == window_scan(g, 0.3, w));
        const PixelRect region{5, 3, 20, 17};
        std::vector<Vec2> inside;
        for (Vec2 p : window_scan(g, 0.3, w))
          if (p.x >= 5 && p.x < 20 && p.y >= 3 && p.y < 17) inside.push_back(p);
        CHECK(positions(local_extrema(g, 0.3, w, CandidateSource::keypoint, region)) == inside);
      }
    }
  }

  TEST_CASE("nms examples") {
    std::vector<Candidate> two{{{0, 0}, 0.6, CandidateSource::keypoint}, {{3, 0}, 0.9, CandidateSource::keypoint}};
    const auto kept = nms_points(two, 5.0);
    REQUIRE(kept.size() == 1);
    CHECK(kept[0].score == 0.9);

    std::vector<Candidate> apart{{{0, 0}, 0.6, CandidateSource::keypoint},
                                 {{10, 0}, 0.9, CandidateSource::sampling},
                                 {{0, 10}, 0.7, CandidateSource::road}};
    const auto same = nms_points(apart, 5.0);
    CHECK(same.size() == 3);
    CHECK(same[0].score == 0.9);
    CHECK(same[2].score == 0.6);
    CHECK(nms_points(same, 5.0) == same);
  }

  TEST_CASE("nms equals greedy reference on random sets") {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 50; ++trial) {
      const auto cands = random_cands(rng, 200, 150.0, trial % 2 == 0);
      const auto kept = nms_points(cands, 8.0);
      CHECK(kept == greedy_nms(cands, 8.0));
      CHECK(min_pairwise(kept) > 8.0);
      CHECK(nms_points(kept, 8.0) == kept);
      for (std::size_t i = 1; i < kept.size(); ++i) CHECK(kept[i - 1].score >= kept[i].score);
    }
  }

  TEST_CASE("sub-pixel offset") {
    Grid g(9, 9);
    add_bump(g, 4.3, 3.8, 0.9, 1.5);
    const Vec2 off = subpixel_offset(g, 4, 4);
    CHECK(off.x == doctest::Approx(0.3).epsilon(0.1));
    CHECK(off.y == doctest::Approx(-0.2).epsilon(0.1));
    CHECK(subpixel_offset(g, 0, 4).x == 0.0);
    CHECK(subpixel_offset(Grid(5, 5, 0.5f), 2, 2) == Vec2{0, 0});
  }

  TEST_CASE("fused candidates of a rendered square") {
    SceneConfig cfg;
    cfg.width = cfg.height = 300;
    const std::vector<Vec2> pts{{100, 100}, {200, 100}, {200, 200}, {100, 200}};
    const std::vector<Edge> edges{{0, 1}, {1, 2}, {2, 3}, {0, 3}};
    const PlanarGraph g = build_graph(pts, edges);
    const ScoreMaps maps = render_maps(g, cfg);
    const auto truth = sampling_points(g, cfg.sampling_interval);
    REQUIRE(truth.size() == 20);
    const auto c = fuse_candidates(maps, DetectParams{});
    CHECK(c.size() == truth.size());
    for (Vec2 t : truth) {
      double best = INFINITY;
      for (const auto& k : c) best = std::min(best, distance(t, k.position));
      CHECK(best <= 1.0);
    }
    for (const auto& k : c) CHECK(k.source != CandidateSource::road);
    CHECK(min_pairwise(c) > DetectParams{}.nms_radius);
  }

  TEST_CASE("all-zero maps give no candidates") {
    CHECK(fuse_candidates(ScoreMaps(64, 64), DetectParams{}).empty());
  }

  TEST_CASE("keypoint and sampling firing at one intersection fuse to one") {
    ScoreMaps maps(40, 40);
    add_bump(maps.keypoint, 20, 20, 0.95, 1.5);
    add_bump(maps.sampling, 21, 20, 0.9, 1.5);
    const auto c = fuse_candidates(maps, DetectParams{});
    REQUIRE(c.size() == 1);
    CHECK(c[0].source == CandidateSource::keypoint);
  }

  TEST_CASE("road supplement only fills gaps") {
    ScoreMaps maps(80, 20);
    for (int x = 5; x < 75; ++x) maps.road.at(x, 10) = 0.9f;
    add_bump(maps.sampling, 10, 10, 0.9, 1.0);
    const auto c = fuse_candidates(maps, DetectParams{});
    REQUIRE(!c.empty());
    CHECK(c[0].source == CandidateSource::sampling);
    for (std::size_t i = 1; i < c.size(); ++i) {
      CHECK(c[i].source == CandidateSource::road);
      CHECK(distance(c[i].position, c[0].position) > DetectParams{}.road_nms_radius);
    }
    CHECK(min_pairwise(c) > DetectParams{}.road_nms_radius);
  }

  TEST_CASE("dimension mismatch and bad values") {
    ScoreMaps maps(10, 10);
    maps.road = Grid(10, 9);
    CHECK_THROWS_AS(fuse_candidates(maps, DetectParams{}), ValidationError);
    ScoreMaps hot(10, 10);
    hot.keypoint.at(1, 1) = 1.5f;
    CHECK_THROWS_AS(hot.validate(), ValidationError);
    DetectParams even;
    even.window = 4;
    CHECK_THROWS_AS(even.validate(), ValidationError);
  }

  TEST_CASE("noiseless renders: detections and truth points pair up") {
    SceneConfig cfg;
    cfg.jitter = 4;
    cfg.edge_drop_prob = 0.15;
    cfg.diagonal_prob = 0.1;
    for (std::uint64_t seed = 1; seed <= 3; ++seed) {
      cfg.seed = seed;
      const PlanarGraph g = gen_scene(cfg);
      const auto c = fuse_candidates(render_maps(g, cfg), DetectParams{});
      const auto truth = sampling_points(g, cfg.sampling_interval);
      const double tol = cfg.point_render_radius + 1;
      for (Vec2 t : truth) {
        double best = INFINITY;
        for (const auto& k : c) best = std::min(best, distance(t, k.position));
        CHECK(best <= tol);
      }
      for (const auto& k : c) {
        if (k.source == CandidateSource::road) continue;
        double best = INFINITY;
        for (Vec2 t : truth) best = std::min(best, distance(t, k.position));
        CHECK(best <= tol);
      }
    }
  }

  TEST_CASE("tiled detection equals untiled") {
    SceneConfig cfg;
    cfg.width = 700;
    cfg.height = 520;
    cfg.jitter = 5;
    cfg.edge_drop_prob = 0.2;
    cfg.diagonal_prob = 0.2;
    cfg.seed = 77;
    const Scene scene = make_scene(cfg, 0.05);
    const auto whole = fuse_candidates(scene.maps, DetectParams{});
    for (auto [size, overlap] : {std::pair{512, 64}, {256, 32}, {200, 20}, {128, 64}, {1024, 0}}) {
      for (std::size_t threads : {1u, 3u}) {
        CHECK(detect_tiled(scene.maps, DetectParams{}, size, overlap, threads) == whole);
      }
    }
  }

  TEST_CASE("score map files round trip") {
    ScoreMaps maps(7, 5);
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<float> u(0, 1);
    for (Grid* g : {&maps.keypoint, &maps.sampling, &maps.road})
      for (auto& v : g->values) v = u(rng);
    const auto dir = testutil::temp_dir("maps");
    write_score_maps(dir / "m.rgf", maps);
    CHECK(read_score_maps(dir / "m.rgf") == maps);

    write_pgm(dir / "k.pgm", maps.keypoint);
    write_pgm(dir / "s.pgm", maps.sampling);
    write_pgm(dir / "r.pgm", maps.road);
    const ScoreMaps img = read_score_map_images(dir / "k.pgm", dir / "s.pgm", dir / "r.pgm");
    CHECK(img.width() == 7);
    CHECK(img.height() == 5);
    for (std::size_t i = 0; i < maps.keypoint.values.size(); ++i)
      CHECK(std::abs(img.keypoint.values[i] - maps.keypoint.values[i]) <= 0.5f / 255.0f + 1e-6f);

    write_text_file(dir / "bad.rgf", "RGF1xx");
    CHECK_THROWS_AS(read_score_maps(dir / "bad.rgf"), ParseError);
  }

  TEST_CASE("candidate source names") {
    CHECK(to_string(CandidateSource::sampling) == "sampling");
    CHECK(candidate_source_from_string("road") == CandidateSource::road);
    CHECK_THROWS_AS(candidate_source_from_string("lane"), ValidationError);
  }
}
