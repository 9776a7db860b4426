#pragma once

#include <string>
#include <vector>

#include "pairsrc/dispersion.hpp"
#include "pairsrc/spdc.hpp"
#include "pairsrc/spectrum.hpp"

namespace pairsrc {

// Beam-displacement source: ordered birefringent elements around the
// downconversion crystal.
struct OpticalLayout {
  std::vector<UniaxialElement> elements;
  CrystalSpec crystal;
  PumpSpectrum pump;

  void validate() const;
};

// Δφ(λs, λi) = φ(|VV⟩ path) − φ(|HH⟩ path) on a grid, unwrapped, radians.
struct PhaseMap {
  std::vector<double> grid_s;
  std::vector<double> grid_i;
  std::vector<double> phase;

  double at(std::size_t row, std::size_t col) const { return phase[row * grid_i.size() + col]; }
};

// Pump-acting elements are evaluated at λp = (1/λs + 1/λi)⁻¹, the others at
// λs and at λi.
double total_phase(const OpticalLayout& layout, double signal_nm, double idler_nm);

PhaseMap phase_map(const OpticalLayout& layout, const AxisSpec& grid);

// |Σ S·exp(iΔφ)| / Σ S. Throws GridMismatchError when the grids differ.
double visibility(const JointSpectrum& js, const PhaseMap& pm);

struct CompensatorBounds {
  double min_mm = 0.0;
  double max_mm = 3.0;
};

struct CompensatorOptimum {
  double pre_mm = 0.0;
  double post_mm = 0.0;
  double visibility = 0.0;
  std::size_t evaluations = 0;
  std::vector<std::string> warnings;
};

// Maximizes visibility over the lengths of the single pump-acting and the
// single signal/idler-acting compensator. Coarse 5×5 grid, then bounded
// Nelder–Mead from the three best grid nodes; length tolerance 1 µm.
CompensatorOptimum optimize_compensators(const OpticalLayout& layout, const JointSpectrum& js,
                                         const CompensatorBounds& bounds = {});

// Visibility with the two compensators set to the given lengths.
double visibility_with_compensators(const OpticalLayout& layout, const JointSpectrum& js,
                                    double pre_mm, double post_mm);

// Adds a zero-length a-cut compensator for each missing slot: the pump one
// right after the pump walk-off element, the SPDC one at the end.
OpticalLayout with_default_compensators(const OpticalLayout& layout, const MaterialModel& ordinary,
                                       const MaterialModel& extraordinary);

}  // namespace pairsrc
