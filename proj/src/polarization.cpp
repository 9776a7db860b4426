#include "pairsrc/polarization.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <ostream>
#include <random>

#include "pairsrc/errors.hpp"

namespace pairsrc {

namespace {

constexpr double kDegToRad = std::numbers::pi / 180.0;

using Mat3 = std::array<std::array<double, 3>, 3>;

Mat3 invert(const Mat3& m) {
  const double det = m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) -
                     m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0]) +
                     m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
  if (std::abs(det) < 1e-300) throw ComputationError("singular normal equations in curve fit");
  Mat3 inv;
  inv[0][0] = (m[1][1] * m[2][2] - m[1][2] * m[2][1]) / det;
  inv[0][1] = (m[0][2] * m[2][1] - m[0][1] * m[2][2]) / det;
  inv[0][2] = (m[0][1] * m[1][2] - m[0][2] * m[1][1]) / det;
  inv[1][0] = (m[1][2] * m[2][0] - m[1][0] * m[2][2]) / det;
  inv[1][1] = (m[0][0] * m[2][2] - m[0][2] * m[2][0]) / det;
  inv[1][2] = (m[0][2] * m[1][0] - m[0][0] * m[1][2]) / det;
  inv[2][0] = (m[1][0] * m[2][1] - m[1][1] * m[2][0]) / det;
  inv[2][1] = (m[0][1] * m[2][0] - m[0][0] * m[2][1]) / det;
  inv[2][2] = (m[0][0] * m[1][1] - m[0][1] * m[1][0]) / det;
  return inv;
}

}  // namespace

void PolarizationState::validate() const {
  if (!(coherence >= 0.0 && coherence <= 1.0)) throw ValidationError("coherence must lie in [0, 1]");
  if (!(hv_visibility >= 0.0 && hv_visibility <= 1.0))
    throw ValidationError("hv_visibility must lie in [0, 1]");
  if (!std::isfinite(phase_rad)) throw ValidationError("phase must be finite");
}

void MeasurementSetup::validate() const {
  if (!(polarizer_transmission > 0.0 && polarizer_transmission <= 1.0))
    throw ValidationError("polarizer transmission must lie in (0, 1]");
  if (!(true_pair_rate >= 0.0) || !(accidental_rate >= 0.0))
    throw ValidationError("rates must be non-negative");
  if (!(integration_time_s > 0.0)) throw ValidationError("integration time must be positive");
}

double coincidence_probability(const PolarizationState& state, double theta_s_deg, double theta_i_deg) {
  const double s2 = 2.0 * theta_s_deg * kDegToRad;
  const double i2 = 2.0 * theta_i_deg * kDegToRad;
  return 0.25 * (1.0 + state.hv_visibility * std::cos(s2) * std::cos(i2) +
                 state.coherence * std::cos(state.phase_rad) * std::sin(s2) * std::sin(i2));
}

CorrelationCurve correlation_curve(const PolarizationState& state, const MeasurementSetup& setup,
                                   double theta_i_deg, const std::vector<double>& theta_s_deg,
                                   std::optional<std::uint64_t> seed) {
  state.validate();
  setup.validate();
  const double t2 = setup.polarizer_transmission * setup.polarizer_transmission;
  std::optional<std::mt19937_64> rng;
  if (seed) rng.emplace(*seed);

  CorrelationCurve out;
  out.reserve(theta_s_deg.size());
  for (double ts : theta_s_deg) {
    const double p = coincidence_probability(state, ts, theta_i_deg);
    const double mean =
        (setup.true_pair_rate * t2 * p + setup.accidental_rate * t2 * 0.25) * setup.integration_time_s;
    double counts = mean;
    if (rng) {
      std::poisson_distribution<long long> draw(std::max(mean, 0.0));
      counts = mean > 0.0 ? static_cast<double>(draw(*rng)) : 0.0;
    }
    out.push_back({ts, counts, std::sqrt(std::max(counts, 0.0))});
  }
  return out;
}

VisibilityEstimate visibility_from_curve(const CorrelationCurve& curve) {
  if (curve.size() < 8) throw ValidationError("visibility fit needs at least 8 points");
  const auto [mn, mx] = std::minmax_element(
      curve.begin(), curve.end(),
      [](const CorrelationPoint& a, const CorrelationPoint& b) { return a.theta_s_deg < b.theta_s_deg; });
  if (mx->theta_s_deg - mn->theta_s_deg < 180.0 - 1e-9)
    throw ValidationError("visibility fit needs a scan spanning at least 180 degrees");

  Mat3 normal{};
  std::array<double, 3> rhs{};
  const auto basis = [](double theta_deg) {
    const double x = 2.0 * theta_deg * kDegToRad;
    return std::array<double, 3>{1.0, std::cos(x), std::sin(x)};
  };
  const auto variance = [](const CorrelationPoint& p) { return std::max(p.counts, 1.0); };

  for (const auto& p : curve) {
    const auto f = basis(p.theta_s_deg);
    const double w = 1.0 / variance(p);
    for (std::size_t r = 0; r < 3; ++r) {
      rhs[r] += w * f[r] * p.counts;
      for (std::size_t c = 0; c < 3; ++c) normal[r][c] += w * f[r] * f[c];
    }
  }
  const Mat3 cov = invert(normal);
  std::array<double, 3> beta{};
  for (std::size_t r = 0; r < 3; ++r)
    for (std::size_t c = 0; c < 3; ++c) beta[r] += cov[r][c] * rhs[c];

  VisibilityEstimate est;
  for (const auto& p : curve) {
    const auto f = basis(p.theta_s_deg);
    const double fit = beta[0] * f[0] + beta[1] * f[1] + beta[2] * f[2];
    est.chi2 += (p.counts - fit) * (p.counts - fit) / variance(p);
  }
  const double dof = static_cast<double>(curve.size()) - 3.0;
  if (est.chi2 > 5.0 * dof)
    throw ComputationError("curve fit residual exceeds 5x the Poisson expectation");

  const double a = beta[0];
  const double b = std::hypot(beta[1], beta[2]);
  if (!(a > 0.0)) throw ComputationError("curve fit offset is not positive");
  est.offset = a;
  est.amplitude = b;
  est.visibility = b / a;
  est.phase_deg = 0.5 * std::atan2(beta[2], beta[1]) / kDegToRad;

  // Gradient of V = √(b1² + b2²)/a with respect to (a, b1, b2).
  std::array<double, 3> g{};
  if (b > 0.0) {
    g = {-b / (a * a), beta[1] / (a * b), beta[2] / (a * b)};
  } else {
    g = {0.0, 1.0 / a, 0.0};  // isotropic at the origin
  }
  double var = 0.0;
  for (std::size_t r = 0; r < 3; ++r)
    for (std::size_t c = 0; c < 3; ++c) var += g[r] * cov[r][c] * g[c];
  est.sigma = std::sqrt(std::max(var, 0.0));
  return est;
}

double qber_from_visibility(double visibility) {
  if (!(visibility >= 0.0 && visibility <= 1.0)) throw ValidationError("visibility must lie in [0, 1]");
  return 0.5 * (1.0 - visibility);
}

void write_curve_csv(std::ostream& out, const CorrelationCurve& curve, const std::string& comment) {
  if (!comment.empty()) out << "# " << comment << '\n';
  out << "theta_s_deg,counts,sigma_counts\n";
  char buf[128];
  for (const auto& p : curve) {
    std::snprintf(buf, sizeof buf, "%.6g,%.12g,%.12g\n", p.theta_s_deg, p.counts, p.sigma);
    out << buf;
  }
}

}  // namespace pairsrc
