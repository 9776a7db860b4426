#include "pairsrc/config.hpp"

#include <cmath>
#include <cstdio>
#include <optional>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>

#include <json.hpp>

#include "pairsrc/errors.hpp"
#include "pairsrc/spdc.hpp"

namespace pairsrc {

namespace {

using nlohmann::json;

// Collects every field-level problem so a single load reports all of them.
class FieldReader {
 public:
  std::vector<std::string> errors;
  std::vector<std::string> warnings;

  const json* object(const json& parent, const std::string& path, const char* key, bool required = true) {
    if (!parent.contains(key)) {
      if (required) errors.push_back(join(path, key) + ": missing");
      return nullptr;
    }
    const json& v = parent.at(key);
    if (!v.is_object()) {
      errors.push_back(join(path, key) + ": expected an object");
      return nullptr;
    }
    return &v;
  }

  double number(const json& obj, const std::string& path, const char* key, std::optional<double> fallback,
                const std::function<bool(double)>& ok = {}, const char* rule = "") {
    const auto where = join(path, key);
    if (!obj.contains(key)) {
      if (fallback) return *fallback;
      errors.push_back(where + ": missing");
      return 0.0;
    }
    const json& v = obj.at(key);
    if (!v.is_number()) {
      errors.push_back(where + ": expected a number");
      return 0.0;
    }
    const double x = v.get<double>();
    if (ok && !ok(x)) errors.push_back(where + ": " + rule);
    return x;
  }

  std::string text(const json& obj, const std::string& path, const char* key,
                   std::optional<std::string> fallback = std::nullopt) {
    const auto where = join(path, key);
    if (!obj.contains(key)) {
      if (fallback) return *fallback;
      errors.push_back(where + ": missing");
      return {};
    }
    if (!obj.at(key).is_string()) {
      errors.push_back(where + ": expected a string");
      return {};
    }
    return obj.at(key).get<std::string>();
  }

  bool flag(const json& obj, const std::string& path, const char* key, bool fallback) {
    if (!obj.contains(key)) return fallback;
    if (!obj.at(key).is_boolean()) {
      errors.push_back(join(path, key) + ": expected true or false");
      return fallback;
    }
    return obj.at(key).get<bool>();
  }

  void unknown_keys(const json& obj, const std::string& path, std::initializer_list<const char*> known) {
    std::set<std::string> names(known.begin(), known.end());
    for (auto it = obj.begin(); it != obj.end(); ++it)
      if (!names.count(it.key())) warnings.push_back(join(path, it.key().c_str()) + ": unknown field ignored");
  }

  static std::string join(const std::string& path, const char* key) {
    return path.empty() ? std::string(key) : path + "." + key;
  }
};

const auto positive = [](double x) { return x > 0.0; };
const auto non_negative = [](double x) { return x >= 0.0; };
const auto unit_open = [](double x) { return x > 0.0 && x <= 1.0; };
const auto unit_closed = [](double x) { return x >= 0.0 && x <= 1.0; };

std::size_t line_of_offset(const std::string& text, std::size_t offset) {
  std::size_t line = 1;
  for (std::size_t k = 0; k < offset && k < text.size(); ++k)
    if (text[k] == '\n') ++line;
  return line;
}

const MaterialModel* resolve_material(FieldReader& r, const MaterialLibrary& lib, const json& obj,
                                      const std::string& path, const char* key) {
  const auto name = r.text(obj, path, key);
  if (name.empty()) return nullptr;
  if (!lib.contains(name)) {
    r.errors.push_back(FieldReader::join(path, key) + ": unknown material '" + name + "'");
    return nullptr;
  }
  return &lib.at(name);
}

CountingScenario read_scenario(FieldReader& r, const json& obj, const std::string& path) {
  CountingScenario sc;
  sc.eta_signal = r.number(obj, path, "eta_signal", std::nullopt, unit_open, "must lie in (0, 1]");
  sc.eta_idler = r.number(obj, path, "eta_idler", std::nullopt, unit_open, "must lie in (0, 1]");
  sc.coincidence_window_s = r.number(obj, path, "coincidence_window_s", std::nullopt, non_negative, "must be >= 0");
  sc.dead_time_s = r.number(obj, path, "dead_time_s", 0.0, non_negative, "must be >= 0");
  const double ch = r.number(obj, path, "channels", 1.0, [](double x) { return x >= 1.0 && x == std::floor(x); },
                             "must be an integer >= 1");
  sc.channels = ch >= 1.0 ? static_cast<std::size_t>(ch) : 1;
  return sc;
}

}  // namespace

std::string fnv1a64_hex(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

ToolkitConfig load_config_text(const std::string& text, const std::filesystem::path& base_dir,
                               const std::filesystem::path& source_path) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    std::ostringstream os;
    os << "config parse error at line " << line_of_offset(text, e.byte > 0 ? e.byte - 1 : 0) << ": " << e.what();
    throw ValidationError(os.str());
  }
  if (!doc.is_object()) throw ValidationError("config parse error at line 1: top level must be an object");

  ToolkitConfig cfg;
  cfg.source_path = source_path;
  cfg.config_hash = fnv1a64_hex(text);
  FieldReader r;
  r.unknown_keys(doc, "", {"materials_file", "crystal", "layout", "pump", "narrowband_pump_nm", "grid",
                           "optimizer", "temperature_scan", "polarization", "counting", "simulation", "seed",
                           "description"});

  // Materials.
  std::filesystem::path materials;
  if (const char* env = std::getenv(kMaterialsEnvVar); env && *env) {
    materials = env;
  } else {
    const auto name = r.text(doc, "", "materials_file");
    if (!name.empty()) materials = base_dir / name;
  }
  cfg.materials_path = materials;
  bool have_materials = false;
  if (!materials.empty()) {
    try {
      cfg.materials = MaterialLibrary::load(materials);
      have_materials = true;
    } catch (const ValidationError& e) {
      r.errors.push_back(std::string("materials_file: ") + e.what());
    }
  }

  // Crystal.
  if (const json* c = r.object(doc, "", "crystal")) {
    auto& crystal = cfg.layout.crystal;
    r.unknown_keys(*c, "crystal", {"material", "length_mm", "poling_period_um", "temperature_c"});
    if (have_materials)
      if (const auto* m = resolve_material(r, cfg.materials, *c, "crystal", "material")) crystal.material = *m;
    crystal.length_mm = r.number(*c, "crystal", "length_mm", std::nullopt, positive, "must be positive");
    crystal.poling_period_um = r.number(*c, "crystal", "poling_period_um", std::nullopt,
                                        [](double x) { return x >= 1.0 && x <= 50.0; }, "must lie in [1, 50] um");
    crystal.temperature_c = r.number(*c, "crystal", "temperature_c", std::nullopt,
                                     [](double x) { return x > -273.15 && x < 500.0; }, "must be a plausible temperature");
  }

  // Layout.
  if (!doc.contains("layout") || !doc.at("layout").is_array()) {
    r.errors.push_back("layout: expected an array of elements");
  } else {
    const auto& arr = doc.at("layout");
    for (std::size_t k = 0; k < arr.size(); ++k) {
      const std::string path = "layout[" + std::to_string(k) + "]";
      const auto& j = arr.at(k);
      if (!j.is_object()) {
        r.errors.push_back(path + ": expected an object");
        continue;
      }
      r.unknown_keys(j, path, {"label", "role", "material_o", "material_e", "length_mm", "cut_angle_deg", "arm_sign",
                               "acts_on"});
      UniaxialElement e;
      e.label = r.text(j, path, "label", path);
      const auto role = r.text(j, path, "role", std::string("walkoff"));
      if (role == "walkoff") e.role = ElementRole::walkoff;
      else if (role == "compensator") e.role = ElementRole::compensator;
      else r.errors.push_back(path + ".role: must be 'walkoff' or 'compensator'");
      if (have_materials) {
        if (const auto* m = resolve_material(r, cfg.materials, j, path, "material_o")) e.ordinary = *m;
        if (const auto* m = resolve_material(r, cfg.materials, j, path, "material_e")) e.extraordinary = *m;
      }
      e.length_mm = r.number(j, path, "length_mm", std::nullopt, non_negative, "must be non-negative");
      e.cut_angle_deg = r.number(j, path, "cut_angle_deg", std::nullopt,
                                 [](double x) { return x >= 0.0 && x <= 90.0; }, "must lie in [0, 90] degrees");
      e.arm_sign = static_cast<int>(
          r.number(j, path, "arm_sign", std::nullopt, [](double x) { return x == 1.0 || x == -1.0; }, "must be +1 or -1"));
      const auto acts = r.text(j, path, "acts_on");
      if (acts == "pump") e.acts_on = ActsOn::pump;
      else if (acts == "signal_and_idler") e.acts_on = ActsOn::signal_and_idler;
      else if (!acts.empty()) r.errors.push_back(path + ".acts_on: must be 'pump' or 'signal_and_idler'");
      cfg.layout.elements.push_back(std::move(e));
    }
  }

  // Pump.
  if (const json* p = r.object(doc, "", "pump")) {
    r.unknown_keys(*p, "pump", {"type", "center_nm", "envelope_fwhm_nm", "mode_spacing_nm", "power_mw", "csv_path",
                                "align_to_degeneracy"});
    const auto type = r.text(*p, "pump", "type");
    const double power = r.number(*p, "pump", "power_mw", std::nullopt, non_negative, "must be non-negative");
    if (type == "comb" || type == "single") {
      double center = r.number(*p, "pump", "center_nm", std::nullopt, positive, "must be positive");
      const bool align = r.flag(*p, "pump", "align_to_degeneracy", false);
      double fwhm = 0.0, spacing = 0.0;
      if (type == "comb") {
        fwhm = r.number(*p, "pump", "envelope_fwhm_nm", std::nullopt, positive, "must be positive");
        spacing = r.number(*p, "pump", "mode_spacing_nm", std::nullopt, positive, "must be positive");
      }
      if (r.errors.empty()) {
        if (align) {
          try {
            center = solve_degenerate_pump(cfg.layout.crystal, center - 2.0, center + 2.0);
          } catch (const std::exception& e) {
            r.errors.push_back(std::string("pump.align_to_degeneracy: ") + e.what());
          }
        }
        cfg.layout.pump = type == "comb" ? make_pump_comb(center, fwhm, spacing, power)
                                         : PumpSpectrum::monochromatic(center, power);
      }
    } else if (type == "csv") {
      const auto file = r.text(*p, "pump", "csv_path");
      if (!file.empty()) {
        try {
          cfg.layout.pump = read_pump_csv(base_dir / file, power);
        } catch (const ValidationError& e) {
          r.errors.push_back(std::string("pump.csv_path: ") + e.what());
        }
      }
    } else if (!type.empty()) {
      r.errors.push_back("pump.type: must be 'comb', 'single' or 'csv'");
    }
  }

  cfg.narrowband_pump_nm = r.number(doc, "", "narrowband_pump_nm", 405.0, positive, "must be positive");

  if (const json* g = r.object(doc, "", "grid")) {
    r.unknown_keys(*g, "grid", {"min_nm", "max_nm", "points"});
    cfg.grid.min_nm = r.number(*g, "grid", "min_nm", 730.0, positive, "must be positive");
    cfg.grid.max_nm = r.number(*g, "grid", "max_nm", 890.0, positive, "must be positive");
    const double pts = r.number(*g, "grid", "points", 512.0, [](double x) { return x >= 3 && x == std::floor(x); },
                                "must be an integer >= 3");
    cfg.grid.points = pts >= 3 ? static_cast<std::size_t>(pts) : 3;
    if (!(cfg.grid.max_nm > cfg.grid.min_nm)) r.errors.push_back("grid.max_nm: must exceed grid.min_nm");
  }

  if (const json* o = r.object(doc, "", "optimizer", false)) {
    r.unknown_keys(*o, "optimizer", {"min_mm", "max_mm"});
    cfg.compensator_bounds.min_mm = r.number(*o, "optimizer", "min_mm", 0.0, non_negative, "must be non-negative");
    cfg.compensator_bounds.max_mm = r.number(*o, "optimizer", "max_mm", 3.0, positive, "must be positive");
  }

  if (const json* t = r.object(doc, "", "temperature_scan", false)) {
    r.unknown_keys(*t, "temperature_scan", {"min_c", "max_c", "step_c"});
    cfg.temperature_scan.min_c = r.number(*t, "temperature_scan", "min_c", 30.0);
    cfg.temperature_scan.max_c = r.number(*t, "temperature_scan", "max_c", 50.0);
    cfg.temperature_scan.step_c = r.number(*t, "temperature_scan", "step_c", 0.1, positive, "must be positive");
    if (!(cfg.temperature_scan.max_c > cfg.temperature_scan.min_c))
      r.errors.push_back("temperature_scan.max_c: must exceed min_c");
  }

  if (const json* p = r.object(doc, "", "polarization")) {
    const std::string path = "polarization";
    r.unknown_keys(*p, path, {"hv_visibility", "phase_rad", "polarizer_transmission", "true_pair_rate",
                              "accidental_rate", "integration_time_s", "scan_step_deg"});
    auto& pc = cfg.polarization;
    pc.hv_visibility = r.number(*p, path, "hv_visibility", 1.0, unit_closed, "must lie in [0, 1]");
    pc.phase_rad = r.number(*p, path, "phase_rad", 0.0);
    pc.polarizer_transmission = r.number(*p, path, "polarizer_transmission", 1.0, unit_open, "must lie in (0, 1]");
    pc.true_pair_rate = r.number(*p, path, "true_pair_rate", std::nullopt, non_negative, "must be non-negative");
    pc.accidental_rate = r.number(*p, path, "accidental_rate", 0.0, non_negative, "must be non-negative");
    pc.integration_time_s = r.number(*p, path, "integration_time_s", 1.0, positive, "must be positive");
    pc.scan_step_deg = r.number(*p, path, "scan_step_deg", 10.0,
                                [](double x) { return x > 0.0 && x <= 22.5; }, "must lie in (0, 22.5]");
  }

  if (const json* c = r.object(doc, "", "counting")) {
    const std::string path = "counting";
    r.unknown_keys(*c, path, {"brightness_per_mw", "pump_power_mw", "eta_signal", "eta_idler", "coincidence_window_s",
                              "dead_time_s", "channels", "max_detector_rate_cps", "min_car"});
    auto& cc = cfg.counting;
    cc.scenario = read_scenario(r, *c, path);
    cc.scenario.brightness_per_mw = r.number(*c, path, "brightness_per_mw", std::nullopt, positive, "must be positive");
    cc.scenario.pump_power_mw = r.number(*c, path, "pump_power_mw", std::nullopt, positive, "must be positive");
    if (cc.scenario.eta_signal > 0.0 && cc.scenario.eta_idler > 0.0)
      cc.scenario.generated_pair_rate = generated_rate_from_brightness(
          cc.scenario.brightness_per_mw, cc.scenario.pump_power_mw, cc.scenario.eta_signal, cc.scenario.eta_idler);
    cc.max_detector_rate_cps = r.number(*c, path, "max_detector_rate_cps", 1e7, positive, "must be positive");
    cc.min_car = r.number(*c, path, "min_car", 10.0, positive, "must be positive");
  }

  if (const json* s = r.object(doc, "", "simulation")) {
    const std::string path = "simulation";
    r.unknown_keys(*s, path, {"generated_pair_rate", "eta_signal", "eta_idler", "coincidence_window_s", "dead_time_s",
                              "channels", "duration_s"});
    auto& sc = cfg.simulation;
    sc.scenario = read_scenario(r, *s, path);
    sc.scenario.generated_pair_rate =
        r.number(*s, path, "generated_pair_rate", std::nullopt, non_negative, "must be non-negative");
    sc.duration_s = r.number(*s, path, "duration_s", 1.0, positive, "must be positive");
    if (sc.scenario.generated_pair_rate * sc.duration_s > 1e8)
      r.errors.push_back("simulation: generated_pair_rate * duration_s exceeds the 1e8 event budget");
  }

  const double seed = r.number(doc, "", "seed", 0.0, [](double x) { return x >= 0.0 && x == std::floor(x); },
                               "must be a non-negative integer");
  cfg.seed = seed >= 0.0 ? static_cast<std::uint64_t>(seed) : 0;

  if (r.errors.empty()) {
    try {
      cfg.layout.validate();
    } catch (const ValidationError& e) {
      r.errors.push_back(std::string("layout: ") + e.what());
    }
  }

  if (!r.errors.empty()) {
    std::string msg = "config validation failed (" + std::to_string(r.errors.size()) + " problem" +
                      (r.errors.size() == 1 ? "" : "s") + "):";
    for (const auto& e : r.errors) msg += "\n  " + e;
    throw ValidationError(msg);
  }
  cfg.warnings = std::move(r.warnings);
  return cfg;
}

ToolkitConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open config file " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return load_config_text(ss.str(), path.parent_path(), path);
}

}  // namespace pairsrc
