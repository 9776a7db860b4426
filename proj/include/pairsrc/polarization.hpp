#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace pairsrc {

// Two-photon state in the HH/VV subspace. `coherence` is the magnitude of the
// HH–VV coherence (the spectrally averaged phasor), `phase` its argument, and
// `hv_visibility` the H/V-basis contrast limited by polarization crosstalk.
struct PolarizationState {
  double coherence = 1.0;
  double phase_rad = 0.0;
  double hv_visibility = 1.0;

  void validate() const;
};

struct MeasurementSetup {
  double polarizer_transmission = 1.0;
  double true_pair_rate = 0.0;   // pairs/s
  double accidental_rate = 0.0;  // pairs/s
  double integration_time_s = 1.0;

  void validate() const;
};

// Joint projection probability for linear polarizers at θs, θi (H = 0°):
//   P = ¼ [1 + h·cos2θs·cos2θi + V·cosφ·sin2θs·sin2θi].
// With h = 1 this is ½[cos²θs cos²θi + sin²θs sin²θi + (V/2) sin2θs sin2θi cosφ].
double coincidence_probability(const PolarizationState& state, double theta_s_deg, double theta_i_deg);

struct CorrelationPoint {
  double theta_s_deg = 0.0;
  double counts = 0.0;
  double sigma = 0.0;
};
using CorrelationCurve = std::vector<CorrelationPoint>;

// Expected counts per setting:
//   [R·t²·P(θs, θi) + A·t²/4] · T.
// With a seed, counts are Poisson-sampled reproducibly.
CorrelationCurve correlation_curve(const PolarizationState& state, const MeasurementSetup& setup,
                                   double theta_i_deg, const std::vector<double>& theta_s_deg,
                                   std::optional<std::uint64_t> seed = std::nullopt);

struct VisibilityEstimate {
  double visibility = 0.0;
  double sigma = 0.0;
  double offset = 0.0;     // A
  double amplitude = 0.0;  // B
  double phase_deg = 0.0;  // θ₀
  double chi2 = 0.0;
};

// Weighted least-squares fit of A + B·cos(2(θs − θ₀)); V = B/A with σ_V from
// Poisson errors. Requires ≥ 8 points spanning ≥ 180°; throws
// ComputationError when χ² exceeds 5× its expectation.
VisibilityEstimate visibility_from_curve(const CorrelationCurve& curve);

// QBER = (1 − V)/2.
double qber_from_visibility(double visibility);

void write_curve_csv(std::ostream& out, const CorrelationCurve& curve, const std::string& comment);

}  // namespace pairsrc
