#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace pairsrc {

enum class Axis { ordinary, extraordinary, z };

// Functional forms for n²(λ), λ in µm:
//   sellmeier:  n² = A + Σ B_k λ² / (λ² − C_k) − D λ²
//   pole:       n² = A + Σ B_k / (λ² − C_k) − D λ²
enum class SellmeierForm { sellmeier, pole };

struct SellmeierTerm {
  double strength = 0.0;  // B_k
  double resonance = 0.0; // C_k, µm²
};

struct SellmeierCoefficients {
  SellmeierForm form = SellmeierForm::sellmeier;
  double constant = 1.0;          // A
  std::vector<SellmeierTerm> terms;
  double infrared = 0.0;          // D, 1/µm²
};

// Δn(λ, ΔT) = n1(λ)·ΔT + n2(λ)·ΔT², with n_k(λ) = Σ_m c_km / λ^m (λ in µm).
struct ThermoOptic {
  std::vector<double> first_order;
  std::vector<double> second_order;

  bool is_zero() const;
};

struct MaterialModel {
  std::string name;
  Axis axis = Axis::z;
  SellmeierCoefficients sellmeier;
  ThermoOptic thermo_optic;
  double valid_min_nm = 0.0;
  double valid_max_nm = 0.0;
  double reference_temperature_c = 25.0;

  bool in_range(double wavelength_nm) const {
    return wavelength_nm >= valid_min_nm && wavelength_nm <= valid_max_nm;
  }
};

// n(λ, T) = n_sellmeier(λ) + Δn_thermo(λ, T − T_ref). Throws RangeError when
// λ is outside the model's validity window.
double refractive_index(const MaterialModel& model, double wavelength_nm,
                        double temperature_c);

// Named set of material models, loaded from the JSON materials file.
class MaterialLibrary {
 public:
  MaterialLibrary() = default;
  explicit MaterialLibrary(std::vector<MaterialModel> models);

  const MaterialModel& at(const std::string& name) const;
  bool contains(const std::string& name) const;
  const std::map<std::string, MaterialModel>& models() const { return models_; }
  int version() const { return version_; }

  static MaterialLibrary from_json_text(const std::string& text);
  static MaterialLibrary load(const std::filesystem::path& path);

 private:
  std::map<std::string, MaterialModel> models_;
  int version_ = 0;
};

std::string to_string(Axis axis);

}  // namespace pairsrc
