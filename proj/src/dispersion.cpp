#include "pairsrc/dispersion.hpp"

#include <cmath>
#include <numbers>

#include "pairsrc/errors.hpp"

namespace pairsrc {

namespace {
constexpr double kDegToRad = std::numbers::pi / 180.0;

void check_angle_inputs(double n_o, double n_e, double theta_deg) {
  if (!(n_o > 1.0) || !(n_e > 1.0))
    throw ValidationError("refractive indices must exceed 1");
  if (!(theta_deg >= 0.0 && theta_deg <= 90.0))
    throw ValidationError("angle must lie in [0, 90] degrees");
}
}  // namespace

void UniaxialElement::validate() const {
  if (!(length_mm >= 0.0))
    throw ValidationError("element '" + label + "': length must be non-negative");
  if (!(cut_angle_deg >= 0.0 && cut_angle_deg <= 90.0))
    throw ValidationError("element '" + label + "': cut angle must lie in [0, 90] degrees");
  if (arm_sign != 1 && arm_sign != -1)
    throw ValidationError("element '" + label + "': arm_sign must be +1 or -1");
}

double index_at_angle(double n_o, double n_e, double theta_deg) {
  check_angle_inputs(n_o, n_e, theta_deg);
  const double th = theta_deg * kDegToRad;
  const double c = std::cos(th);
  const double s = std::sin(th);
  return 1.0 / std::sqrt(c * c / (n_o * n_o) + s * s / (n_e * n_e));
}

double walkoff_angle(double n_o, double n_e, double theta_deg) {
  const double n = index_at_angle(n_o, n_e, theta_deg);
  const double th = theta_deg * kDegToRad;
  const double tan_rho =
      0.5 * n * n * (1.0 / (n_e * n_e) - 1.0 / (n_o * n_o)) * std::sin(2.0 * th);
  return std::abs(std::atan(tan_rho));
}

double lateral_displacement_mm(double n_o, double n_e, double theta_deg, double length_mm) {
  return length_mm * std::tan(walkoff_angle(n_o, n_e, theta_deg));
}

double birefringent_phase(const UniaxialElement& element, double wavelength_nm,
                          double temperature_c) {
  const double n_o = refractive_index(element.ordinary, wavelength_nm, temperature_c);
  const double n_e = refractive_index(element.extraordinary, wavelength_nm, temperature_c);
  const double n_theta = index_at_angle(n_o, n_e, element.cut_angle_deg);
  // L [mm] / λ [nm] = 1e6 · L/λ in common units.
  return element.arm_sign * 2.0 * std::numbers::pi * element.length_mm * 1e6 *
         (n_theta - n_o) / wavelength_nm;
}

std::string to_string(ActsOn a) {
  return a == ActsOn::pump ? "pump" : "signal_and_idler";
}

std::string to_string(ElementRole r) {
  return r == ElementRole::walkoff ? "walkoff" : "compensator";
}

}  // namespace pairsrc
