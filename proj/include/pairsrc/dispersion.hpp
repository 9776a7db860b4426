#pragma once

#include <string>

#include "pairsrc/material.hpp"

namespace pairsrc {

// Beam the element acts on.
enum class ActsOn { pump, signal_and_idler };

// Walk-off crystals form the interferometer; compensators flatten its phase.
enum class ElementRole { walkoff, compensator };

// Uniaxial birefringent plate. arm_sign selects which interferometer arm
// carries the extraordinary polarization: +1 for the |VV⟩ arm, −1 for |HH⟩.
struct UniaxialElement {
  std::string label;
  MaterialModel ordinary;
  MaterialModel extraordinary;
  double length_mm = 0.0;
  double cut_angle_deg = 0.0;
  int arm_sign = 1;
  ActsOn acts_on = ActsOn::pump;
  ElementRole role = ElementRole::walkoff;

  // Throws ValidationError when length < 0, the cut angle is outside
  // [0°, 90°], or arm_sign is not ±1.
  void validate() const;
};

// Extraordinary-wave index for propagation at θ to the optic axis:
// 1/n(θ)² = cos²θ/n_o² + sin²θ/n_e².
double index_at_angle(double n_o, double n_e, double theta_deg);

// Poynting-vector walk-off magnitude (radians).
double walkoff_angle(double n_o, double n_e, double theta_deg);

// Lateral separation of the o and e beams after length_mm of crystal.
double lateral_displacement_mm(double n_o, double n_e, double theta_deg, double length_mm);

// Unwrapped phase (radians) of the extraordinary relative to the ordinary
// polarization, signed by arm_sign:
//   φ = arm_sign · 2π · L · [n(θ) − n_o] / λ.
double birefringent_phase(const UniaxialElement& element, double wavelength_nm,
                          double temperature_c);

std::string to_string(ActsOn a);
std::string to_string(ElementRole r);

}  // namespace pairsrc
