#include "pairsrc/spdc.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <numbers>
#include <sstream>

#include "pairsrc/errors.hpp"
#include "pairsrc/parallel.hpp"
#include "pairsrc/roots.hpp"

namespace pairsrc {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// |Δk| (rad/µm) below which exactly degenerate emission counts as matched.
constexpr double kDegenerateTolerance = 1e-9;

// Phase mismatch without the grating term, rad/µm.
double material_mismatch(const MaterialModel& m, double pump_nm, double signal_nm, double idler_nm,
                         double temperature_c) {
  const double np = refractive_index(m, pump_nm, temperature_c);
  const double ns = refractive_index(m, signal_nm, temperature_c);
  const double ni = refractive_index(m, idler_nm, temperature_c);
  return kTwoPi * 1e3 * (np / pump_nm - ns / signal_nm - ni / idler_nm);
}

bool collinear_allowed(const CrystalSpec& crystal, double pump_nm) {
  return solve_phasematched_signal(crystal, pump_nm).has_value();
}

long nearest_index(double x, double x0, double step) {
  return std::lround((x - x0) / step);
}

}  // namespace

void CrystalSpec::validate() const {
  if (!(length_mm > 0.0)) throw ValidationError("crystal length must be positive");
  if (!(poling_period_um >= 1.0 && poling_period_um <= 50.0))
    throw ValidationError("poling period must lie in [1, 50] um");
  if (!std::isfinite(temperature_c)) throw ValidationError("crystal temperature must be finite");
}

double idler_wavelength(double pump_nm, double signal_nm) {
  const double inv = 1.0 / pump_nm - 1.0 / signal_nm;
  if (!(inv > 0.0)) {
    std::ostringstream os;
    os << "no positive idler wavelength for pump " << pump_nm << " nm, signal " << signal_nm << " nm";
    throw RangeError(os.str());
  }
  return 1.0 / inv;
}

double delta_k(const CrystalSpec& crystal, double pump_nm, double signal_nm) {
  const double idler_nm = idler_wavelength(pump_nm, signal_nm);
  return material_mismatch(crystal.material, pump_nm, signal_nm, idler_nm, crystal.temperature_c) -
         kTwoPi / crystal.poling_period_um;
}

double qpm_intensity(double delta_k_per_um, double length_mm) {
  if (!(length_mm > 0.0)) throw ValidationError("crystal length must be positive");
  const double x = 0.5 * delta_k_per_um * length_mm * 1e3;
  if (std::abs(x) < 1e-8) return 1.0 - x * x / 3.0;
  const double s = std::sin(x) / x;
  return s * s;
}

double solve_poling_period(const MaterialModel& material, double pump_nm, double signal_nm,
                           double temperature_c) {
  const double idler_nm = idler_wavelength(pump_nm, signal_nm);
  const double mismatch = material_mismatch(material, pump_nm, signal_nm, idler_nm, temperature_c);
  if (!(mismatch > 0.0))
    throw NoSolutionError("index contrast does not admit first-order quasi-phase-matching");
  return kTwoPi / mismatch;
}

std::optional<SignalIdler> solve_phasematched_signal(const CrystalSpec& crystal, double pump_nm) {
  const auto& m = crystal.material;
  const double degenerate = 2.0 * pump_nm;
  const auto f = [&](double ls) { return delta_k(crystal, pump_nm, ls); };
  const double f_deg = f(degenerate);
  if (std::abs(f_deg) <= kDegenerateTolerance) return SignalIdler{degenerate, degenerate};

  // Shortest signal wavelength whose idler stays inside the model range.
  const double inv_max = 1.0 / pump_nm - 1.0 / m.valid_max_nm;
  double lower = m.valid_min_nm;
  if (inv_max > 0.0) lower = std::max(lower, 1.0 / inv_max);
  lower = std::max(lower, pump_nm * (1.0 + 1e-9));

  constexpr double kScanStep = 0.05;
  double prev_x = degenerate;
  double prev_f = f_deg;
  for (double x = degenerate - kScanStep; x >= lower; x -= kScanStep) {
    const double fx = f(x);
    if ((fx > 0.0) != (prev_f > 0.0) || fx == 0.0) {
      const double ls = bisect(f, x, prev_x, 1e-10);
      const double li = idler_wavelength(pump_nm, ls);
      return SignalIdler{std::min(ls, li), std::max(ls, li)};
    }
    prev_x = x;
    prev_f = fx;
  }
  return std::nullopt;
}

double solve_degenerate_pump(const CrystalSpec& crystal, double lo_nm, double hi_nm) {
  return bisect([&](double lp) { return delta_k(crystal, lp, 2.0 * lp); }, lo_nm, hi_nm, 1e-10);
}

double solve_tuning_temperature(const CrystalSpec& crystal, double pump_nm, double signal_nm,
                                double lo_c, double hi_c) {
  CrystalSpec c = crystal;
  return bisect(
      [&](double t) {
        c.temperature_c = t;
        return delta_k(c, pump_nm, signal_nm);
      },
      lo_c, hi_c, 1e-9);
}

double integrated_collinear_rate(const CrystalSpec& crystal, double pump_nm,
                                 const CollectionBand& band) {
  if (!collinear_allowed(crystal, pump_nm)) return 0.0;
  const auto steps = static_cast<long>(std::ceil((band.max_nm - band.min_nm) / band.step_nm));
  const double h = (band.max_nm - band.min_nm) / static_cast<double>(steps);
  double sum = 0.0;
  for (long k = 0; k <= steps; ++k) {
    const double ls = band.min_nm + h * static_cast<double>(k);
    const double inv = 1.0 / pump_nm - 1.0 / ls;
    if (!(inv > 0.0)) continue;
    const double li = 1.0 / inv;
    if (li < band.min_nm || li > band.max_nm) continue;
    const double w = (k == 0 || k == steps) ? 0.5 : 1.0;
    sum += w * qpm_intensity(delta_k(crystal, pump_nm, ls), crystal.length_mm);
  }
  return sum * h;
}

std::vector<RatePoint> collinear_rate_vs_pump(const CrystalSpec& crystal, const PumpSpectrum& pump,
                                              const CollectionBand& band) {
  std::vector<RatePoint> out(pump.size());
  const auto& samples = pump.samples();
  parallel_for(samples.size(), [&](std::size_t k) {
    const auto& s = samples[k];
    out[k].pump_nm = s.wavelength_nm;
    out[k].rate = s.weight > 0.0 ? s.weight * integrated_collinear_rate(crystal, s.wavelength_nm, band) : 0.0;
  });
  return out;
}

JointSpectrum joint_spectrum(const CrystalSpec& crystal, const PumpSpectrum& pump,
                             const AxisSpec& grid) {
  const auto& m = crystal.material;
  if (!m.in_range(grid.min_nm) || !m.in_range(grid.max_nm))
    throw RangeError("joint spectrum grid lies outside the range of '" + m.name + "'");

  JointSpectrum js;
  js.grid_s = grid.values();
  js.grid_i = js.grid_s;
  js.temperature_c = crystal.temperature_c;
  const std::size_t n = js.grid_s.size();
  const double h = grid.step();

  // Pump lines that phase-match collinearly; others are not collected.
  std::vector<PumpMode> lines;
  for (const auto& s : pump.samples())
    if (s.weight > 0.0 && collinear_allowed(crystal, s.wavelength_nm)) lines.push_back(s);

  // Row pass: each signal row deposits onto the two idler columns bracketing
  // its conjugate, split linearly. Snapping to one column would leave some
  // columns doubled and others empty where the curve slope differs from -1.
  std::vector<double> rows(n * n, 0.0);
  parallel_for(n, [&](std::size_t r) {
    const double ls = js.grid_s[r];
    for (const auto& p : lines) {
      const double inv = 1.0 / p.wavelength_nm - 1.0 / ls;
      if (!(inv > 0.0)) continue;
      const double x = (1.0 / inv - grid.min_nm) / h;
      if (x < -0.5 || x > static_cast<double>(n) - 0.5) continue;
      const double v = p.weight * qpm_intensity(delta_k(crystal, p.wavelength_nm, ls), crystal.length_mm);
      const double lo = std::floor(x);
      const double f = x - lo;
      const auto c = static_cast<long>(lo);
      if (c >= 0 && c < static_cast<long>(n)) rows[r * n + static_cast<std::size_t>(c)] += (1.0 - f) * v;
      if (c + 1 >= 0 && c + 1 < static_cast<long>(n) && f > 0.0)
        rows[r * n + static_cast<std::size_t>(c + 1)] += f * v;
    }
  });

  js.intensity.assign(n * n, 0.0);
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t c = 0; c < n; ++c)
      js.intensity[r * n + c] = 0.5 * (rows[r * n + c] + rows[c * n + r]);

  // Coarse-grid check: curve steps skipping columns leave unsampled cells.
  for (const auto& p : lines) {
    long prev = -1;
    std::size_t traced = 0, gaps = 0;
    for (std::size_t r = 0; r < n; ++r) {
      const double inv = 1.0 / p.wavelength_nm - 1.0 / js.grid_s[r];
      if (!(inv > 0.0)) continue;
      const long c = nearest_index(1.0 / inv, grid.min_nm, h);
      if (c < 0 || c >= static_cast<long>(n)) {
        prev = -1;
        continue;
      }
      if (prev >= 0) {
        ++traced;
        if (std::abs(c - prev) > 1) ++gaps;
      }
      prev = c;
    }
    if (traced > 0 && static_cast<double>(gaps) > 0.1 * static_cast<double>(traced)) {
      std::ostringstream os;
      os << "grid too coarse: pump line " << p.wavelength_nm << " nm skips cells on "
         << gaps << " of " << traced << " rows";
      js.warnings.push_back(os.str());
    }
  }
  return js;
}

Curve marginal_spectrum(const JointSpectrum& js) {
  const std::size_t ni = js.grid_i.size();
  Curve out(js.grid_s.size());
  for (std::size_t r = 0; r < js.grid_s.size(); ++r) {
    double sum = 0.0;
    for (std::size_t c = 0; c < ni; ++c) sum += js.intensity[r * ni + c];
    out[r] = {js.grid_s[r], sum};
  }
  return out;
}

double fwhm(const Curve& curve) {
  if (curve.size() < 3) throw NoSolutionError("curve too short for a width");
  const auto peak = std::max_element(curve.begin(), curve.end(),
                                     [](const CurvePoint& a, const CurvePoint& b) { return a.y < b.y; });
  const double half = 0.5 * peak->y;
  if (!(peak->y > 0.0)) throw NoSolutionError("curve has no positive maximum");

  std::size_t left = 0;
  while (curve[left].y < half) ++left;
  std::size_t right = curve.size() - 1;
  while (curve[right].y < half) --right;
  if (left == 0 || right == curve.size() - 1)
    throw NoSolutionError("curve does not fall below half maximum on both sides");

  const auto cross = [half](const CurvePoint& below, const CurvePoint& above) {
    return below.x + (half - below.y) * (above.x - below.x) / (above.y - below.y);
  };
  return cross(curve[right + 1], curve[right]) - cross(curve[left - 1], curve[left]);
}

}  // namespace pairsrc
