#pragma once

#include <cmath>

#include "pairsrc/errors.hpp"

namespace pairsrc {

// Bisection on a sign-changing bracket. Stops when the bracket is narrower
// than x_tol or f hits zero.
template <typename F>
double bisect(F&& f, double a, double b, double x_tol = 1e-12, int max_iter = 200) {
  double fa = f(a);
  double fb = f(b);
  if (fa == 0.0) return a;
  if (fb == 0.0) return b;
  if ((fa > 0.0) == (fb > 0.0)) throw NoSolutionError("bracket does not change sign");
  for (int it = 0; it < max_iter && std::abs(b - a) > x_tol; ++it) {
    const double m = 0.5 * (a + b);
    const double fm = f(m);
    if (fm == 0.0) return m;
    if ((fm > 0.0) == (fa > 0.0)) {
      a = m;
      fa = fm;
    } else {
      b = m;
    }
  }
  return 0.5 * (a + b);
}

}  // namespace pairsrc
