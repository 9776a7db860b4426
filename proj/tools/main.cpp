#include <CLI11.hpp>

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include "pairsrc/commands.hpp"
#include "pairsrc/config.hpp"
#include "pairsrc/errors.hpp"
#include "pairsrc/version.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Design and analysis toolkit for a broadband-pumped entangled photon-pair source"};
  app.set_version_flag("--version", pairsrc::kVersion);

  std::string command;
  std::string config_path;
  std::string out_dir = "out";
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> grid;

  std::string names;
  for (const auto& n : pairsrc::command_names()) names += (names.empty() ? "" : ", ") + n;
  app.add_option("command", command, "One of: " + names)->required();
  app.add_option("--config", config_path, "Source configuration (JSON)")->required();
  app.add_option("--out", out_dir, "Output directory for CSV files");
  app.add_option("--seed", seed, "Override the configured random seed");
  app.add_option("--grid", grid, "Override the number of grid points per wavelength axis");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : pairsrc::kExitValidation;
  }

  pairsrc::ToolkitConfig cfg;
  try {
    cfg = pairsrc::load_config(config_path);
  } catch (const pairsrc::ValidationError& e) {
    std::cerr << e.what() << '\n';
    return pairsrc::kExitValidation;
  } catch (const std::exception& e) {
    std::cerr << "error loading config: " << e.what() << '\n';
    return pairsrc::kExitComputation;
  }
  for (const auto& w : cfg.warnings) std::cerr << "warning: " << w << '\n';

  pairsrc::CommandOptions options;
  options.out_dir = out_dir;
  options.seed = seed;
  options.grid_points = grid;
  return pairsrc::run_command(cfg, command, options, std::cout, std::cerr).exit_code;
}
