#pragma once

#include <optional>
#include <vector>

namespace graspsim::analysis {

/// Sample Pearson correlation over the pairs where both values are finite.
/// Empty with fewer than 3 such pairs or zero variance in either column.
std::optional<double> pearson_r(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace graspsim::analysis
