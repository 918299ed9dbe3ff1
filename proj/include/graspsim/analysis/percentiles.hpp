#pragma once

#include <vector>

namespace graspsim::analysis {

enum class Label { bottom = 0, top = 1, excluded = 2 };

struct Labeling {
  std::vector<Label> labels;
  int per_class = 0;  // floor(fraction * n)
  /// Equal values straddle a class boundary, so stable order decided it.
  bool degenerate = false;
};

/// The floor(fraction * n) highest values are `top`, as many lowest are
/// `bottom`, the rest `excluded`. Ties keep their original order (earlier
/// rows rank lower). Throws std::invalid_argument for n < 10, a fraction
/// outside (0, 0.5] or non-finite values.
Labeling label_percentiles(const std::vector<double>& values, double fraction = 0.3);

}  // namespace graspsim::analysis
