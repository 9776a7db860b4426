#pragma once

#include <array>
#include <cstddef>
#include <functional>

namespace pairsrc {

struct Box2 {
  std::array<double, 2> lower{};
  std::array<double, 2> upper{};

  std::array<double, 2> clamp(std::array<double, 2> x) const;
};

struct SimplexResult {
  std::array<double, 2> x{};
  double value = 0.0;
  std::size_t evaluations = 0;
  bool converged = false;
};

// Nelder–Mead minimization in two dimensions; every trial point is projected
// onto the box. Terminates once all vertices lie within x_tol of the best one.
SimplexResult nelder_mead_box(const std::function<double(const std::array<double, 2>&)>& f,
                              std::array<double, 2> start, double initial_step, const Box2& box,
                              double x_tol, std::size_t max_evaluations = 2000);

}  // namespace pairsrc
