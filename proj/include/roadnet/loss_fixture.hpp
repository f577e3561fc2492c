#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace roadnet {

struct LossCheckCase {
  std::string name;
  std::string op;
  double value = 0.0;
  std::optional<double> expected;
  bool ok = true;
  /// Named sub-values reported by composite cases.
  std::vector<std::pair<std::string, double>> details;
};

struct LossCheckReport {
  std::vector<LossCheckCase> cases;

  bool all_ok() const;
  /// One line per case: status, name, computed value, expected value.
  std::string to_text() const;
};

/// Evaluates a loss fixture document:
///
///   {"weights": {"seg": 1, "cls": 1, "coord": 10},     (optional)
///    "cases": [{"name": ..., "op": ..., <inputs>, "expected": v}, ...]}
///
/// Supported ops and inputs:
///   match_cost  "pred": [dx, dy, p], "gt": [dx, dy]
///   coord_loss  "pairs": [[[px, py], [gx, gy]], ...]
///   class_loss  "predictions": [[dx, dy, p], ...], "matched": [bool, ...]
///   seg_loss    "pred_maps" / "gt_maps": {"keypoint": [...], "sampling": [...], "road": [...]}
///   total_loss  "components": [seg, cls, coord]
///   sample      "predictions", "gt_neighbors": [[dx, dy], ...], optional maps;
///               matches with the Hungarian method and reports every
///               component plus the weighted total (the case value).
/// A case passes when |value - expected| <= rel_tol * max(1, |expected|).
/// Throws ParseError for malformed documents.
LossCheckReport run_losscheck(std::string_view json_text, double rel_tol = 1e-9);

}  // namespace roadnet
