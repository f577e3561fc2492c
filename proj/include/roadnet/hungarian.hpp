#pragma once

#include <cstddef>
#include <vector>

namespace roadnet {

/// Row-major cost matrix: rows are predictions, columns are ground-truth
/// neighbors.
class CostMatrix {
 public:
  CostMatrix() = default;
  CostMatrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }
  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

struct Assignment {
  /// gt_to_pred[j] is the prediction row assigned to ground-truth column j.
  std::vector<std::size_t> gt_to_pred;
  /// Sum of cost(gt_to_pred[j], j) accumulated in column order.
  double total_cost = 0.0;
};

/// Minimum-cost injective assignment of every column to a distinct row
/// (Kuhn-Munkres with potentials, O(M^2 N)). Among optimal assignments the
/// lexicographically smallest gt_to_pred is returned. Throws ValidationError
/// when rows < cols or an entry is not finite.
Assignment hungarian(const CostMatrix& cost);

}  // namespace roadnet
