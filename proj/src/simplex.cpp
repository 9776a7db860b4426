#include "pairsrc/simplex.hpp"

#include <algorithm>
#include <cmath>

namespace pairsrc {

std::array<double, 2> Box2::clamp(std::array<double, 2> x) const {
  for (std::size_t k = 0; k < 2; ++k) x[k] = std::clamp(x[k], lower[k], upper[k]);
  return x;
}

SimplexResult nelder_mead_box(const std::function<double(const std::array<double, 2>&)>& f,
                              std::array<double, 2> start, double initial_step, const Box2& box,
                              double x_tol, std::size_t max_evaluations) {
  using Point = std::array<double, 2>;
  struct Vertex {
    Point x;
    double f;
  };
  std::size_t evals = 0;
  const auto eval = [&](const Point& p) {
    ++evals;
    return f(p);
  };

  start = box.clamp(start);
  std::array<Vertex, 3> v;
  v[0] = {start, eval(start)};
  for (std::size_t k = 0; k < 2; ++k) {
    Point p = start;
    p[k] += initial_step;
    if (p[k] > box.upper[k]) p[k] = start[k] - initial_step;
    p = box.clamp(p);
    v[k + 1] = {p, eval(p)};
  }

  const auto lin = [](const Point& a, const Point& b, double t) {
    return Point{a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1])};
  };

  bool converged = false;
  while (evals < max_evaluations) {
    std::sort(v.begin(), v.end(), [](const Vertex& a, const Vertex& b) { return a.f < b.f; });
    double spread = 0.0;
    for (std::size_t k = 1; k < 3; ++k)
      spread = std::max({spread, std::abs(v[k].x[0] - v[0].x[0]), std::abs(v[k].x[1] - v[0].x[1])});
    if (spread < x_tol) {
      converged = true;
      break;
    }

    const Point centroid{0.5 * (v[0].x[0] + v[1].x[0]), 0.5 * (v[0].x[1] + v[1].x[1])};
    const Point xr = box.clamp(lin(centroid, v[2].x, -1.0));
    const double fr = eval(xr);
    if (fr < v[0].f) {
      const Point xe = box.clamp(lin(centroid, v[2].x, -2.0));
      const double fe = eval(xe);
      v[2] = fe < fr ? Vertex{xe, fe} : Vertex{xr, fr};
      continue;
    }
    if (fr < v[1].f) {
      v[2] = {xr, fr};
      continue;
    }
    const bool outside = fr < v[2].f;
    const Point xc = box.clamp(outside ? lin(centroid, xr, 0.5) : lin(centroid, v[2].x, 0.5));
    const double fc = eval(xc);
    if (fc < (outside ? fr : v[2].f)) {
      v[2] = {xc, fc};
      continue;
    }
    for (std::size_t k = 1; k < 3; ++k) {
      v[k].x = lin(v[0].x, v[k].x, 0.5);
      v[k].f = eval(v[k].x);
    }
  }
  std::sort(v.begin(), v.end(), [](const Vertex& a, const Vertex& b) { return a.f < b.f; });
  return {v[0].x, v[0].f, evals, converged};
}

}  // namespace pairsrc
