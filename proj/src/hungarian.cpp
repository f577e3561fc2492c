#include "roadnet/hungarian.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "roadnet/error.hpp"

namespace roadnet {

namespace {

// Optimal value of assigning every column in `cols` to a distinct row in
// `rows` (rows.size() >= cols.size()). Potentials form of the Hungarian
// method with columns playing the role of the "left" side.
double solve_value(const CostMatrix& cost, const std::vector<std::size_t>& rows, const std::vector<std::size_t>& cols,
                   std::vector<std::size_t>* col_to_row = nullptr) {
  const std::size_t n = cols.size();
  const std::size_t m = rows.size();
  if (n == 0) {
    if (col_to_row) col_to_row->clear();
    return 0.0;
  }
  constexpr double kInf = std::numeric_limits<double>::infinity();
  std::vector<double> u(n + 1, 0.0), v(m + 1, 0.0);
  std::vector<std::size_t> p(m + 1, 0), way(m + 1, 0);
  for (std::size_t i = 1; i <= n; ++i) {
    p[0] = i;
    std::size_t j0 = 0;
    std::vector<double> minv(m + 1, kInf);
    std::vector<char> used(m + 1, 0);
    do {
      used[j0] = 1;
      const std::size_t i0 = p[j0];
      double delta = kInf;
      std::size_t j1 = 0;
      for (std::size_t j = 1; j <= m; ++j) {
        if (used[j]) continue;
        const double cur = cost(rows[j - 1], cols[i0 - 1]) - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (std::size_t j = 0; j <= m; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      const std::size_t j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0 != 0);
  }

  std::vector<std::size_t> assign(n, 0);
  for (std::size_t j = 1; j <= m; ++j)
    if (p[j] != 0) assign[p[j] - 1] = rows[j - 1];
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) total += cost(assign[i], cols[i]);
  if (col_to_row) *col_to_row = std::move(assign);
  return total;
}

}  // namespace

Assignment hungarian(const CostMatrix& cost) {
  const std::size_t n_pred = cost.rows();
  const std::size_t n_gt = cost.cols();
  if (n_pred < n_gt) {
    throw ValidationError("assignment needs at least as many predictions as ground-truth entries (" +
                          std::to_string(n_pred) + " < " + std::to_string(n_gt) + "); pad the predictions");
  }
  double scale = 0.0;
  for (std::size_t r = 0; r < n_pred; ++r) {
    for (std::size_t c = 0; c < n_gt; ++c) {
      if (!std::isfinite(cost(r, c))) throw ValidationError("cost matrix entries must be finite");
      scale = std::max(scale, std::abs(cost(r, c)));
    }
  }

  std::vector<std::size_t> rows(n_pred), cols(n_gt);
  for (std::size_t i = 0; i < n_pred; ++i) rows[i] = i;
  for (std::size_t j = 0; j < n_gt; ++j) cols[j] = j;

  const double optimum = solve_value(cost, rows, cols);
  const double tol = 1e-12 * std::max(1.0, scale * static_cast<double>(std::max<std::size_t>(n_gt, 1)));

  // Fix columns in order to the smallest row that still admits an optimum.
  Assignment out;
  out.gt_to_pred.reserve(n_gt);
  double fixed_cost = 0.0;
  for (std::size_t j = 0; j < n_gt; ++j) {
    const std::vector<std::size_t> rest_cols(cols.begin() + static_cast<std::ptrdiff_t>(j) + 1, cols.end());
    bool placed = false;
    for (std::size_t k = 0; k < rows.size(); ++k) {
      std::vector<std::size_t> rest_rows = rows;
      rest_rows.erase(rest_rows.begin() + static_cast<std::ptrdiff_t>(k));
      const double value = fixed_cost + cost(rows[k], j) + solve_value(cost, rest_rows, rest_cols);
      if (value <= optimum + tol) {
        out.gt_to_pred.push_back(rows[k]);
        fixed_cost += cost(rows[k], j);
        rows = std::move(rest_rows);
        placed = true;
        break;
      }
    }
    if (!placed) {
      // Only reachable through rounding; fall back to the solver's own answer.
      std::vector<std::size_t> all_rows(n_pred), assign;
      for (std::size_t i = 0; i < n_pred; ++i) all_rows[i] = i;
      solve_value(cost, all_rows, cols, &assign);
      out.gt_to_pred = assign;
      break;
    }
  }

  out.total_cost = 0.0;
  for (std::size_t j = 0; j < n_gt; ++j) out.total_cost += cost(out.gt_to_pred[j], j);
  return out;
}

}  // namespace roadnet
