#include "graspsim/analysis/stats.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace graspsim::analysis {

std::optional<double> pearson_r(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size()) throw std::invalid_argument("pearson_r needs equal-length columns");
  std::vector<std::pair<double, double>> pairs;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (std::isfinite(x[i]) && std::isfinite(y[i])) pairs.emplace_back(x[i], y[i]);
  }
  if (pairs.size() < 3) return std::nullopt;

  // Two passes: center first, so large offsets do not cancel.
  double mx = 0.0, my = 0.0;
  for (const auto& [a, b] : pairs) {
    mx += a;
    my += b;
  }
  mx /= static_cast<double>(pairs.size());
  my /= static_cast<double>(pairs.size());
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (const auto& [a, b] : pairs) {
    sxy += (a - mx) * (b - my);
    sxx += (a - mx) * (a - mx);
    syy += (b - my) * (b - my);
  }
  if (sxx <= 0.0 || syy <= 0.0) return std::nullopt;
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

}  // namespace graspsim::analysis
