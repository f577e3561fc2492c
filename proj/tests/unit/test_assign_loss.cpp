#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <vector>

#include "helpers.hpp"
#include "roadnet/error.hpp"
#include "roadnet/graph_io.hpp"
#include "roadnet/hungarian.hpp"
#include "roadnet/loss.hpp"
#include "roadnet/loss_fixture.hpp"

using namespace roadnet;

namespace {

// Minimum over all injective column -> row maps, with the lexicographically
// smallest optimal map.
Assignment brute_force(const CostMatrix& c) {
  std::vector<std::size_t> rows(c.rows());
  std::iota(rows.begin(), rows.end(), 0);
  Assignment best;
  bool have = false;
  // permutations of rows; the first cols() entries give the assignment
  do {
    std::vector<std::size_t> a(rows.begin(), rows.begin() + static_cast<std::ptrdiff_t>(c.cols()));
    double cost = 0.0;
    for (std::size_t j = 0; j < c.cols(); ++j) cost += c(a[j], j);
    if (!have || cost < best.total_cost || (cost == best.total_cost && a < best.gt_to_pred)) {
      best.gt_to_pred = a;
      best.total_cost = cost;
      have = true;
    }
  } while (std::next_permutation(rows.begin(), rows.end()));
  return best;
}

CostMatrix random_matrix(std::mt19937_64& rng, std::size_t n, std::size_t m, bool integral) {
  CostMatrix c(n, m);
  std::uniform_int_distribution<int> small(0, 5);
  std::uniform_real_distribution<double> u(0, 100);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < m; ++j) c(i, j) = integral ? small(rng) : u(rng);
  return c;
}

}  // namespace

TEST_SUITE("assign-loss") {
  TEST_CASE("hungarian examples") {
    CostMatrix id(4, 4, 100.0);
    for (std::size_t i = 0; i < 4; ++i) id(i, i) = 0.0;
    const Assignment a = hungarian(id);
    CHECK(a.gt_to_pred == std::vector<std::size_t>{0, 1, 2, 3});
    CHECK(a.total_cost == 0.0);

    CostMatrix one(1, 1, 3.25);
    CHECK(hungarian(one).total_cost == 3.25);

    CHECK(hungarian(CostMatrix(5, 5, 0.0)).gt_to_pred == std::vector<std::size_t>{0, 1, 2, 3, 4});
    CHECK(hungarian(CostMatrix(3, 0)).gt_to_pred.empty());
    CHECK_THROWS_AS(hungarian(CostMatrix(2, 3)), ValidationError);
    CostMatrix bad(2, 2);
    bad(1, 1) = NAN;
    CHECK_THROWS_AS(hungarian(bad), ValidationError);
  }

  TEST_CASE("hungarian equals brute force on 7x7") {
    std::mt19937_64 rng(1);
    for (int trial = 0; trial < 200; ++trial) {
      const CostMatrix c = random_matrix(rng, 7, 7, trial % 2 == 0);
      const Assignment a = hungarian(c), b = brute_force(c);
      CHECK(a.total_cost == b.total_cost);
      CHECK(a.gt_to_pred == b.gt_to_pred);
    }
  }

  TEST_CASE("hungarian on rectangular matrices") {
    std::mt19937_64 rng(2);
    for (int trial = 0; trial < 200; ++trial) {
      const std::size_t n = 1 + trial % 7;
      const std::size_t m = 1 + (trial / 7) % n;
      const CostMatrix c = random_matrix(rng, n, m, trial % 3 == 0);
      const Assignment a = hungarian(c), b = brute_force(c);
      CHECK(a.total_cost == b.total_cost);
      CHECK(a.gt_to_pred == b.gt_to_pred);
    }
  }

  TEST_CASE("hungarian argmin is invariant to row and column shifts") {
    std::mt19937_64 rng(3);
    std::uniform_int_distribution<int> shift(-20, 20);
    for (int trial = 0; trial < 100; ++trial) {
      const CostMatrix c = random_matrix(rng, 6, 6, false);
      const auto base = hungarian(c).gt_to_pred;
      CostMatrix s = c;
      const std::size_t row = trial % 6, col = (trial / 6) % 6;
      const int dr = shift(rng), dc = shift(rng);
      for (std::size_t j = 0; j < 6; ++j) s(row, j) += dr + 50;
      for (std::size_t i = 0; i < 6; ++i) s(i, col) += dc + 50;
      CHECK(hungarian(s).gt_to_pred == base);
    }
  }

  TEST_CASE("match cost") {
    CHECK(match_cost({{3, 4}, 1.0}, {3, 4}) == 0.0);
    CHECK(match_cost({{4, 4}, 1.0}, {3, 4}) == 10.0);
    CHECK(match_cost({{3, 4}, 0.5}, {3, 4}) == 0.5);
    const std::vector<AdjacencyEntry> preds{{{0, 0}, 1.0}, {{5, 0}, 0.5}};
    const std::vector<Vec2> gt{{5, 0}};
    const CostMatrix c = build_cost_matrix(preds, gt);
    CHECK(c.rows() == 2);
    CHECK(c.cols() == 1);
    CHECK(c(0, 0) == 50.0);
    CHECK(c(1, 0) == 0.5);
  }

  TEST_CASE("coordinate loss") {
    const std::vector<std::pair<Vec2, Vec2>> exact{{{1, 2}, {1, 2}}};
    CHECK(coord_loss(exact) == 0.0);
    const std::vector<std::pair<Vec2, Vec2>> two{{{1, 0}, {0, 0}}, {{0, 3}, {0, 0}}};
    CHECK(coord_loss(two) == 2.0);
    const std::vector<std::pair<Vec2, Vec2>> tri{{{3, 4}, {0, 0}}};
    CHECK(coord_loss(tri) == 5.0);
    CHECK(coord_loss(std::vector<std::pair<Vec2, Vec2>>{}) == 0.0);
  }

  TEST_CASE("class loss") {
    const std::vector<AdjacencyEntry> sure{{{0, 0}, 1.0}, {{0, 0}, 0.0}};
    CHECK(class_loss(sure, {true, false}) == doctest::Approx(0.0).epsilon(1e-6));
    const std::vector<AdjacencyEntry> half{{{0, 0}, 0.5}};
    CHECK(class_loss(half, {true}) == doctest::Approx(std::log(2.0)));
    const std::vector<AdjacencyEntry> wrong{{{0, 0}, 1.0}, {{0, 0}, 1.0}};
    const double v = class_loss(wrong, {true, false});
    CHECK(std::isfinite(v));
    CHECK(v == doctest::Approx(-std::log(kProbClamp) / 2).epsilon(1e-6));
    CHECK_THROWS_AS(class_loss(wrong, {true}), ValidationError);
  }

  TEST_CASE("segmentation loss") {
    ScoreMaps gt(4, 3), pred(4, 3);
    std::mt19937_64 rng(4);
    for (Grid* g : {&gt.keypoint, &gt.sampling, &gt.road})
      for (auto& v : g->values) v = static_cast<float>(rng() % 2);
    CHECK(seg_loss(gt, gt) == doctest::Approx(0.0).epsilon(1e-6));
    CHECK(seg_loss(gt, gt) >= 0.0);
    for (Grid* g : {&pred.keypoint, &pred.sampling, &pred.road}) std::fill(g->values.begin(), g->values.end(), 0.5f);
    CHECK(seg_loss(pred, gt) == doctest::Approx(3 * std::log(2.0)));
    const ChannelValues p{{{0.9}, {0.9}, {0.9}}}, t{{{1.0}, {1.0}, {1.0}}};
    CHECK(seg_loss(p, t) == doctest::Approx(-3 * std::log(0.9)));
    CHECK_THROWS_AS(seg_loss(ScoreMaps(2, 2), gt), ValidationError);
  }

  TEST_CASE("total loss") {
    CHECK(total_loss({1, 1, 1}) == 12.0);
    CHECK(total_loss({0, 0, 0}) == 0.0);
    CHECK(total_loss({0.5, 0.2, 0.03}) == doctest::Approx(1.0));
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(0, 3);
    for (int i = 0; i < 100; ++i) {
      const LossComponents c{u(rng), u(rng), u(rng)};
      const LossWeights w{u(rng), u(rng), u(rng)};
      const double k = 0.1 + u(rng);
      CHECK(total_loss(c, {k * w.seg, k * w.cls, k * w.coord}) == doctest::Approx(k * total_loss(c, w)));
    }
    LossWeights neg;
    neg.cls = -1;
    CHECK_THROWS_AS(neg.validate(), ValidationError);
  }

  TEST_CASE("sample loss") {
    const std::vector<AdjacencyEntry> preds{{{19, 1}, 0.9}, {{0, 0}, 0.1}, {{-20, 0}, 0.8}};
    const std::vector<Vec2> gt{{-20, 0}, {20, 0}};
    const SampleLoss s = evaluate_sample(preds, gt);
    CHECK(s.assignment.gt_to_pred == std::vector<std::size_t>{2, 0});
    CHECK(s.components.coord == doctest::Approx(std::sqrt(2.0) / 2));
    const double cls = -(std::log(0.9) + std::log(0.9) + std::log(0.8)) / 3;
    CHECK(s.components.cls == doctest::Approx(cls));
    CHECK_THROWS_AS(evaluate_sample(std::vector<AdjacencyEntry>{preds[0]}, gt), ValidationError);
  }

  TEST_CASE("loss fixture") {
    const LossCheckReport report = run_losscheck(read_text_file(testutil::fixture("losses.json")));
    CHECK(report.cases.size() == 14);
    for (const auto& c : report.cases) CHECK_MESSAGE(c.ok, c.name);
    CHECK(report.all_ok());
    CHECK(report.to_text().find("ok") != std::string::npos);
    CHECK_THROWS_AS(run_losscheck("{\"cases\": [{\"op\": \"nope\"}]}"), ParseError);
    const auto failing = run_losscheck(R"({"cases": [{"name": "x", "op": "total_loss", "components": [1, 1, 1], "expected": 11}]})");
    CHECK_FALSE(failing.all_ok());
  }
}
