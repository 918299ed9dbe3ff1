#pragma once

#include <optional>
#include <stdexcept>
#include <vector>

namespace graspsim::analysis {

enum class Direction { positive, negative };

/// The feature's |R| with the metric is below the usefulness floor.
class UninformativeFeature : public std::runtime_error {
 public:
  UninformativeFeature(double r);
  double r() const { return r_; }

 private:
  double r_;
};

struct RankPrediction {
  std::vector<int> predicted_top;     // row indices, most extreme first
  std::vector<int> predicted_bottom;
  double accuracy = 0.0;              // fraction of the 2k predictions that are right
  Direction direction = Direction::positive;
  double r = 0.0;                     // Pearson R of feature and metric
};

inline constexpr double kMinAbsCorrelation = 0.1;

/// Ranks rows by the feature alone and predicts that the k most extreme ones
/// (in the correlation's direction) yield the top metric values and the k
/// least extreme the bottom ones. A top prediction is right when the row is
/// in the actual top floor(0.3 n) by metric, a bottom one likewise. Without
/// `direction` the sign of R decides. Throws std::invalid_argument for
/// n < 20 or 2k > n, and UninformativeFeature for |R| < 0.1.
RankPrediction rank_predict(const std::vector<double>& feature, const std::vector<double>& metric, int k = 5,
                            std::optional<Direction> direction = std::nullopt, double fraction = 0.3);

}  // namespace graspsim::analysis
