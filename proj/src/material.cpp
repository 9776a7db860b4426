#include "pairsrc/material.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "pairsrc/errors.hpp"

namespace pairsrc {

namespace {

double polynomial_in_inverse_lambda(const std::vector<double>& coeffs, double lambda_um) {
  double acc = 0.0;
  double inv_pow = 1.0;
  for (double c : coeffs) {
    acc += c * inv_pow;
    inv_pow /= lambda_um;
  }
  return acc;
}

double sellmeier_n2(const SellmeierCoefficients& s, double lambda_um) {
  const double l2 = lambda_um * lambda_um;
  double n2 = s.constant;
  for (const auto& t : s.terms) {
    if (s.form == SellmeierForm::sellmeier)
      n2 += t.strength * l2 / (l2 - t.resonance);
    else
      n2 += t.strength / (l2 - t.resonance);
  }
  return n2 - s.infrared * l2;
}

Axis parse_axis(const std::string& s) {
  if (s == "ordinary" || s == "o") return Axis::ordinary;
  if (s == "extraordinary" || s == "e") return Axis::extraordinary;
  if (s == "z") return Axis::z;
  throw ValidationError("unknown axis '" + s + "'");
}

SellmeierForm parse_form(const std::string& s) {
  if (s == "sellmeier") return SellmeierForm::sellmeier;
  if (s == "pole") return SellmeierForm::pole;
  throw ValidationError("unknown functional form '" + s + "'");
}

MaterialModel parse_model(const nlohmann::json& j) {
  MaterialModel m;
  if (!j.is_object() || !j.contains("name") || !j.at("name").is_string())
    throw ValidationError("material entry lacks a string 'name'");
  m.name = j.at("name").get<std::string>();
  const std::string where = "material '" + m.name + "': ";
  try {
    m.axis = parse_axis(j.at("axis").get<std::string>());
    m.sellmeier.form = parse_form(j.at("form").get<std::string>());
    const auto& c = j.at("coefficients");
    m.sellmeier.constant = c.at("A").get<double>();
    for (const auto& t : c.at("terms"))
      m.sellmeier.terms.push_back({t.at(0).get<double>(), t.at(1).get<double>()});
    m.sellmeier.infrared = c.value("D", 0.0);
    if (j.contains("thermo_optic")) {
      const auto& to = j.at("thermo_optic");
      const auto form = to.value("form", std::string("inverse_lambda_polynomial"));
      if (form != "inverse_lambda_polynomial")
        throw ValidationError("unknown thermo-optic form '" + form + "'");
      m.thermo_optic.first_order = to.value("first_order", std::vector<double>{});
      m.thermo_optic.second_order = to.value("second_order", std::vector<double>{});
    }
    const auto range = j.at("valid_range_nm").get<std::vector<double>>();
    if (range.size() != 2 || !(range[0] > 0.0) || !(range[1] > range[0]))
      throw ValidationError("valid_range_nm must be [min, max] with 0 < min < max");
    m.valid_min_nm = range[0];
    m.valid_max_nm = range[1];
    m.reference_temperature_c = j.value("reference_temperature_c", 25.0);
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(where + e.what());
  } catch (const ValidationError& e) {
    throw ValidationError(where + e.what());
  }
  return m;
}

}  // namespace

bool ThermoOptic::is_zero() const {
  for (double c : first_order)
    if (c != 0.0) return false;
  for (double c : second_order)
    if (c != 0.0) return false;
  return true;
}

double refractive_index(const MaterialModel& model, double wavelength_nm,
                        double temperature_c) {
  if (!model.in_range(wavelength_nm)) {
    std::ostringstream os;
    os << "wavelength " << wavelength_nm << " nm outside valid range of '"
       << model.name << "' [" << model.valid_min_nm << ", " << model.valid_max_nm
       << "] nm";
    throw RangeError(os.str());
  }
  const double lambda_um = wavelength_nm * 1e-3;
  const double n2 = sellmeier_n2(model.sellmeier, lambda_um);
  if (!(n2 > 0.0))
    throw ComputationError("non-physical n^2 for '" + model.name + "'");
  double n = std::sqrt(n2);
  const double dt = temperature_c - model.reference_temperature_c;
  if (dt != 0.0) {
    n += polynomial_in_inverse_lambda(model.thermo_optic.first_order, lambda_um) * dt +
         polynomial_in_inverse_lambda(model.thermo_optic.second_order, lambda_um) * dt * dt;
  }
  return n;
}

MaterialLibrary::MaterialLibrary(std::vector<MaterialModel> models) {
  for (auto& m : models) {
    const auto name = m.name;
    if (!models_.emplace(name, std::move(m)).second)
      throw ValidationError("duplicate material '" + name + "'");
  }
}

const MaterialModel& MaterialLibrary::at(const std::string& name) const {
  auto it = models_.find(name);
  if (it == models_.end()) throw ValidationError("unknown material '" + name + "'");
  return it->second;
}

bool MaterialLibrary::contains(const std::string& name) const {
  return models_.count(name) != 0;
}

MaterialLibrary MaterialLibrary::from_json_text(const std::string& text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ValidationError(std::string("materials file: ") + e.what());
  }
  if (!doc.contains("models") || !doc.at("models").is_array())
    throw ValidationError("materials file: missing 'models' array");
  std::vector<MaterialModel> models;
  for (const auto& j : doc.at("models")) models.push_back(parse_model(j));
  MaterialLibrary lib(std::move(models));
  lib.version_ = doc.value("version", 0);
  return lib;
}

MaterialLibrary MaterialLibrary::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open materials file " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return from_json_text(ss.str());
}

std::string to_string(Axis axis) {
  switch (axis) {
    case Axis::ordinary: return "ordinary";
    case Axis::extraordinary: return "extraordinary";
    case Axis::z: return "z";
  }
  return "?";
}

}  // namespace pairsrc
