#pragma once

#include <optional>
#include <vector>

#include "pairsrc/material.hpp"
#include "pairsrc/spectrum.hpp"

namespace pairsrc {

// Periodically poled crystal for collinear type-0 downconversion.
struct CrystalSpec {
  double length_mm = 10.0;
  double poling_period_um = 3.425;
  double temperature_c = 25.0;
  MaterialModel material;

  // Positive length/temperature-independent fields, period in [1, 50] µm.
  void validate() const;
};

struct SignalIdler {
  double signal_nm = 0.0;
  double idler_nm = 0.0;
};

// λi from 1/λi = 1/λp − 1/λs; throws RangeError when non-positive.
double idler_wavelength(double pump_nm, double signal_nm);

// First-order QPM phase mismatch in rad/µm:
//   Δk = 2π [ n(λp)/λp − n(λs)/λs − n(λi)/λi − 1/Λ ].
double delta_k(const CrystalSpec& crystal, double pump_nm, double signal_nm);

// sinc²(Δk·L/2) with sinc(0) = 1; Δk in rad/µm, L in mm.
double qpm_intensity(double delta_k_per_um, double length_mm);

// Period (µm) that zeroes Δk at the given wavelengths. Throws NoSolutionError
// when the index contrast is not positive.
double solve_poling_period(const MaterialModel& material, double pump_nm, double signal_nm,
                           double temperature_c);

// Collinear phase-matched pair with λs ≤ λi, or nullopt when the pump lies
// beyond the degenerate turning point (emission is non-collinear).
std::optional<SignalIdler> solve_phasematched_signal(const CrystalSpec& crystal, double pump_nm);

// Pump wavelength that phase-matches exactly degenerate emission, searched in
// [lo_nm, hi_nm].
double solve_degenerate_pump(const CrystalSpec& crystal, double lo_nm, double hi_nm);

// Crystal temperature that phase-matches (λp → λs) in [lo_c, hi_c].
double solve_tuning_temperature(const CrystalSpec& crystal, double pump_nm, double signal_nm,
                                double lo_c, double hi_c);

// Signal band over which collinear emission is collected. Both photons of a
// pair must fall inside it.
struct CollectionBand {
  double min_nm = 730.0;
  double max_nm = 890.0;
  double step_nm = 0.01;
};

// ∫ qpm_intensity(Δk(λp, λs)) dλs over the band for a single pump line,
// zero beyond the turning point.
double integrated_collinear_rate(const CrystalSpec& crystal, double pump_nm,
                                 const CollectionBand& band = {});

struct RatePoint {
  double pump_nm = 0.0;
  double rate = 0.0;
};

// Per pump sample: weight × integrated_collinear_rate.
std::vector<RatePoint> collinear_rate_vs_pump(const CrystalSpec& crystal, const PumpSpectrum& pump,
                                              const CollectionBand& band = {});

// Rasterized joint spectrum. Each pump sample contributes along its
// energy-conservation curve. Samples beyond the turning point contribute
// nothing.
JointSpectrum joint_spectrum(const CrystalSpec& crystal, const PumpSpectrum& pump,
                             const AxisSpec& grid);

// Sum over the idler axis for each signal wavelength.
Curve marginal_spectrum(const JointSpectrum& js);

// Distance between the outermost half-maximum crossings, linearly
// interpolated. Throws NoSolutionError when a side never drops below half.
double fwhm(const Curve& curve);

}  // namespace pairsrc
