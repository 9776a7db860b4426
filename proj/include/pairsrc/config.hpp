#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "pairsrc/counting.hpp"
#include "pairsrc/material.hpp"
#include "pairsrc/phasemap.hpp"
#include "pairsrc/spectrum.hpp"

namespace pairsrc {

// Environment variable that overrides the materials file named in a config.
inline constexpr const char* kMaterialsEnvVar = "PAIRSRC_MATERIALS";

struct TemperatureScan {
  double min_c = 30.0;
  double max_c = 50.0;
  double step_c = 0.1;
};

struct PolarizationConfig {
  double hv_visibility = 1.0;
  double phase_rad = 0.0;
  double polarizer_transmission = 1.0;
  double true_pair_rate = 0.0;
  double accidental_rate = 0.0;
  double integration_time_s = 1.0;
  double scan_step_deg = 10.0;
};

struct CountingConfig {
  CountingScenario scenario;
  double max_detector_rate_cps = 1e7;
  double min_car = 10.0;
};

struct SimulationConfig {
  CountingScenario scenario;
  double duration_s = 1.0;
};

struct ToolkitConfig {
  std::filesystem::path source_path;
  std::filesystem::path materials_path;
  std::string config_hash;  // FNV-1a 64 of the config file bytes, hex
  MaterialLibrary materials;
  OpticalLayout layout;
  double narrowband_pump_nm = 405.0;
  AxisSpec grid;
  CompensatorBounds compensator_bounds;
  TemperatureScan temperature_scan;
  PolarizationConfig polarization;
  CountingConfig counting;
  SimulationConfig simulation;
  std::uint64_t seed = 0;
  std::vector<std::string> warnings;
};

// Parse error (with line number) or a validation error listing every
// violated field; both are thrown as ValidationError.
ToolkitConfig load_config(const std::filesystem::path& path);
ToolkitConfig load_config_text(const std::string& text, const std::filesystem::path& base_dir,
                               const std::filesystem::path& source_path = {});

std::string fnv1a64_hex(const std::string& bytes);

}  // namespace pairsrc
