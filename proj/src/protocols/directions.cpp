#include "graspsim/protocols/directions.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace graspsim::protocols {

std::vector<Vec3> make_directions(int n) {
  if (n < 1) throw std::invalid_argument("direction count must be positive");
  const double golden_angle = std::numbers::pi * (3.0 - std::sqrt(5.0));
  std::vector<Vec3> dirs;
  dirs.reserve(n);
  for (int i = 0; i < n; ++i) {
    const double z = 1.0 - (2.0 * i + 1.0) / n;
    const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
    const double phi = golden_angle * i;
    dirs.emplace_back(r * std::cos(phi), r * std::sin(phi), z);
    dirs.back().normalize();
  }
  return dirs;
}

double min_pairwise_angle(const std::vector<Vec3>& directions) {
  double best = std::numbers::pi;
  for (std::size_t i = 0; i < directions.size(); ++i)
    for (std::size_t j = i + 1; j < directions.size(); ++j) {
      const double c = std::clamp(directions[i].normalized().dot(directions[j].normalized()), -1.0, 1.0);
      best = std::min(best, std::acos(c));
    }
  return best;
}

std::vector<ReorientationState> reorientation_states(const std::vector<Vec3>& axes,
                                                     const std::vector<double>& angles) {
  std::vector<ReorientationState> states;
  states.reserve(axes.size() * angles.size());
  for (std::size_t a = 0; a < axes.size(); ++a)
    for (double angle : angles) {
      ReorientationState s;
      s.index = static_cast<int>(states.size());
      s.axis_index = static_cast<int>(a);
      s.axis = axes[a].normalized();
      s.angle = angle;
      states.push_back(s);
    }
  return states;
}

}  // namespace graspsim::protocols
