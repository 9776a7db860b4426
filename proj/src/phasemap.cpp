#include "pairsrc/phasemap.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <optional>

#include "pairsrc/errors.hpp"
#include "pairsrc/parallel.hpp"
#include "pairsrc/simplex.hpp"

namespace pairsrc {

namespace {

double element_phase(const UniaxialElement& e, double temperature_c, double pump_nm, double signal_nm,
                     double idler_nm) {
  if (e.length_mm == 0.0) return 0.0;
  if (e.acts_on == ActsOn::pump) return birefringent_phase(e, pump_nm, temperature_c);
  return birefringent_phase(e, signal_nm, temperature_c) + birefringent_phase(e, idler_nm, temperature_c);
}

void check_same_grid(const std::vector<double>& a, const std::vector<double>& b, const char* axis) {
  if (a.size() != b.size())
    throw GridMismatchError(std::string("grid mismatch on ") + axis + " axis size");
  for (std::size_t k = 0; k < a.size(); ++k)
    if (std::abs(a[k] - b[k]) > 1e-9 * std::max(1.0, std::abs(a[k])))
      throw GridMismatchError(std::string("grid mismatch on ") + axis + " axis values");
}

// Phase decomposition on the support of a joint spectrum: Δφ is affine in
// the two compensator lengths.
struct SupportPhases {
  std::vector<double> weight;
  std::vector<double> base;
  std::vector<double> pre_per_mm;
  std::vector<double> post_per_mm;
  double weight_sum = 0.0;

  double visibility(double pre_mm, double post_mm) const {
    double re = 0.0, im = 0.0;
    for (std::size_t k = 0; k < weight.size(); ++k) {
      const double phi = base[k] + pre_mm * pre_per_mm[k] + post_mm * post_per_mm[k];
      re += weight[k] * std::cos(phi);
      im += weight[k] * std::sin(phi);
    }
    return std::hypot(re, im) / weight_sum;
  }
};

struct CompensatorSlots {
  std::size_t pre = 0;
  std::size_t post = 0;
};

CompensatorSlots find_slots(const OpticalLayout& layout) {
  std::optional<std::size_t> pre, post;
  for (std::size_t k = 0; k < layout.elements.size(); ++k) {
    const auto& e = layout.elements[k];
    if (e.role != ElementRole::compensator) continue;
    auto& slot = e.acts_on == ActsOn::pump ? pre : post;
    if (slot) throw ValidationError("layout must contain exactly one pump and one SPDC compensator");
    slot = k;
  }
  if (!pre || !post)
    throw ValidationError("layout must contain exactly one pump and one SPDC compensator");
  return {*pre, *post};
}

SupportPhases support_phases(const OpticalLayout& layout, const JointSpectrum& js,
                             const CompensatorSlots& slots) {
  const std::size_t ni = js.grid_i.size();
  SupportPhases sp;
  std::vector<std::size_t> cells;
  for (std::size_t k = 0; k < js.intensity.size(); ++k)
    if (js.intensity[k] > 0.0) cells.push_back(k);
  if (cells.empty()) throw ComputationError("joint spectrum has empty support");

  sp.weight.resize(cells.size());
  sp.base.resize(cells.size());
  sp.pre_per_mm.resize(cells.size());
  sp.post_per_mm.resize(cells.size());

  auto pre = layout.elements[slots.pre];
  auto post = layout.elements[slots.post];
  pre.length_mm = 1.0;
  post.length_mm = 1.0;
  const double t = layout.crystal.temperature_c;

  parallel_for(cells.size(), [&](std::size_t k) {
    const std::size_t r = cells[k] / ni;
    const std::size_t c = cells[k] % ni;
    const double ls = js.grid_s[r];
    const double li = js.grid_i[c];
    const double lp = 1.0 / (1.0 / ls + 1.0 / li);
    double base = 0.0;
    for (std::size_t e = 0; e < layout.elements.size(); ++e) {
      if (e == slots.pre || e == slots.post) continue;
      base += element_phase(layout.elements[e], t, lp, ls, li);
    }
    sp.weight[k] = js.intensity[cells[k]];
    sp.base[k] = base;
    sp.pre_per_mm[k] = element_phase(pre, t, lp, ls, li);
    sp.post_per_mm[k] = element_phase(post, t, lp, ls, li);
  });
  for (double w : sp.weight) sp.weight_sum += w;
  return sp;
}

}  // namespace

void OpticalLayout::validate() const {
  for (const auto& e : elements) e.validate();
  crystal.validate();
}

double total_phase(const OpticalLayout& layout, double signal_nm, double idler_nm) {
  const double pump_nm = 1.0 / (1.0 / signal_nm + 1.0 / idler_nm);
  double phi = 0.0;
  for (const auto& e : layout.elements)
    phi += element_phase(e, layout.crystal.temperature_c, pump_nm, signal_nm, idler_nm);
  return phi;
}

PhaseMap phase_map(const OpticalLayout& layout, const AxisSpec& grid) {
  PhaseMap pm;
  pm.grid_s = grid.values();
  pm.grid_i = pm.grid_s;
  const std::size_t n = pm.grid_s.size();
  pm.phase.assign(n * n, 0.0);
  // total_phase is evaluated without any 2π reduction, so the sampled map is
  // already unwrapped along both axes.
  parallel_for(n, [&](std::size_t r) {
    for (std::size_t c = 0; c < n; ++c) pm.phase[r * n + c] = total_phase(layout, pm.grid_s[r], pm.grid_i[c]);
  });
  return pm;
}

double visibility(const JointSpectrum& js, const PhaseMap& pm) {
  check_same_grid(js.grid_s, pm.grid_s, "signal");
  check_same_grid(js.grid_i, pm.grid_i, "idler");
  if (js.intensity.size() != pm.phase.size()) throw GridMismatchError("grid mismatch in sample count");
  double re = 0.0, im = 0.0, total = 0.0;
  for (std::size_t k = 0; k < js.intensity.size(); ++k) {
    const double w = js.intensity[k];
    if (w == 0.0) continue;
    re += w * std::cos(pm.phase[k]);
    im += w * std::sin(pm.phase[k]);
    total += w;
  }
  if (!(total > 0.0)) throw ComputationError("joint spectrum has empty support");
  return std::min(1.0, std::hypot(re, im) / total);
}

double visibility_with_compensators(const OpticalLayout& layout, const JointSpectrum& js,
                                    double pre_mm, double post_mm) {
  const auto slots = find_slots(layout);
  return std::min(1.0, support_phases(layout, js, slots).visibility(pre_mm, post_mm));
}

CompensatorOptimum optimize_compensators(const OpticalLayout& layout, const JointSpectrum& js,
                                         const CompensatorBounds& bounds) {
  if (!(bounds.min_mm >= 0.0) || !(bounds.max_mm > bounds.min_mm))
    throw ValidationError("compensator bounds must satisfy 0 <= min < max");
  const auto slots = find_slots(layout);
  const auto sp = support_phases(layout, js, slots);

  CompensatorOptimum out;
  constexpr std::size_t kGrid = 5;
  struct Node {
    double pre, post, v;
  };
  std::vector<Node> nodes(kGrid * kGrid);
  const double span = bounds.max_mm - bounds.min_mm;
  parallel_for(nodes.size(), [&](std::size_t k) {
    const double a = bounds.min_mm + span * static_cast<double>(k / kGrid) / (kGrid - 1);
    const double b = bounds.min_mm + span * static_cast<double>(k % kGrid) / (kGrid - 1);
    nodes[k] = {a, b, sp.visibility(a, b)};
  });
  out.evaluations += nodes.size();

  const auto [lo, hi] = std::minmax_element(nodes.begin(), nodes.end(),
                                            [](const Node& x, const Node& y) { return x.v < y.v; });
  if (hi->v - lo->v < 1e-6)
    out.warnings.push_back("flat objective: visibility varies by less than 1e-6 over the bounds");

  std::stable_sort(nodes.begin(), nodes.end(), [](const Node& x, const Node& y) { return x.v > y.v; });

  const Box2 box{{bounds.min_mm, bounds.min_mm}, {bounds.max_mm, bounds.max_mm}};
  const auto objective = [&](const std::array<double, 2>& x) { return -sp.visibility(x[0], x[1]); };
  constexpr std::size_t kRestarts = 3;
  constexpr double kLengthTol = 1e-3;  // mm
  std::vector<SimplexResult> runs(kRestarts);
  parallel_for(kRestarts, [&](std::size_t k) {
    runs[k] = nelder_mead_box(objective, {nodes[k].pre, nodes[k].post}, 0.25 * span / (kGrid - 1), box,
                              kLengthTol);
  });

  double best = -std::numeric_limits<double>::infinity();
  for (const auto& r : runs) {
    out.evaluations += r.evaluations;
    if (-r.value > best) {
      best = -r.value;
      out.pre_mm = r.x[0];
      out.post_mm = r.x[1];
    }
  }
  out.visibility = std::min(1.0, best);
  return out;
}

OpticalLayout with_default_compensators(const OpticalLayout& layout, const MaterialModel& ordinary,
                                       const MaterialModel& extraordinary) {
  OpticalLayout out = layout;
  bool has_pre = false, has_post = false;
  for (const auto& e : layout.elements) {
    if (e.role != ElementRole::compensator) continue;
    (e.acts_on == ActsOn::pump ? has_pre : has_post) = true;
  }
  const auto make = [&](const char* label, ActsOn acts_on, int sign) {
    UniaxialElement c;
    c.label = label;
    c.ordinary = ordinary;
    c.extraordinary = extraordinary;
    c.length_mm = 0.0;
    c.cut_angle_deg = 90.0;
    c.arm_sign = sign;
    c.acts_on = acts_on;
    c.role = ElementRole::compensator;
    return c;
  };
  // Each compensator shares the arm of the walk-off element it follows.
  const auto walkoff = [&](ActsOn acts_on) -> std::optional<std::size_t> {
    for (std::size_t k = 0; k < out.elements.size(); ++k)
      if (out.elements[k].role == ElementRole::walkoff && out.elements[k].acts_on == acts_on) return k;
    return std::nullopt;
  };
  if (!has_pre) {
    const auto k = walkoff(ActsOn::pump);
    const int sign = k ? out.elements[*k].arm_sign : 1;
    const auto at = k ? out.elements.begin() + static_cast<std::ptrdiff_t>(*k + 1) : out.elements.begin();
    out.elements.insert(at, make("pre_compensator", ActsOn::pump, sign));
  }
  if (!has_post) {
    const auto k = walkoff(ActsOn::signal_and_idler);
    const int sign = k ? out.elements[*k].arm_sign : -1;
    out.elements.push_back(make("post_compensator", ActsOn::signal_and_idler, sign));
  }
  return out;
}

}  // namespace pairsrc
