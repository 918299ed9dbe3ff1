#include "graspsim/analysis/percentiles.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace graspsim::analysis {

Labeling label_percentiles(const std::vector<double>& values, double fraction) {
  const std::size_t n = values.size();
  if (n < 10) throw std::invalid_argument("percentile labeling needs at least 10 values");
  if (!(fraction > 0.0 && fraction <= 0.5)) throw std::invalid_argument("fraction must lie in (0, 0.5]");
  if (!std::all_of(values.begin(), values.end(), [](double v) { return std::isfinite(v); }))
    throw std::invalid_argument("percentile labeling needs finite values");

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });

  Labeling out;
  out.per_class = static_cast<int>(std::floor(fraction * static_cast<double>(n)));
  out.labels.assign(n, Label::excluded);
  const std::size_t k = static_cast<std::size_t>(out.per_class);
  for (std::size_t i = 0; i < k; ++i) {
    out.labels[order[i]] = Label::bottom;
    out.labels[order[n - 1 - i]] = Label::top;
  }
  if (k > 0) {
    out.degenerate = values[order[k - 1]] == values[order[k]] || values[order[n - k]] == values[order[n - k - 1]];
  }
  return out;
}

}  // namespace graspsim::analysis
