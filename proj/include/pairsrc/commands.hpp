#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "pairsrc/config.hpp"

namespace pairsrc {

enum ExitCode : int { kExitOk = 0, kExitValidation = 1, kExitComputation = 2, kExitAcceptance = 3 };

struct CommandOptions {
  std::filesystem::path out_dir = ".";
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> grid_points;
};

struct CommandResult {
  int exit_code = kExitOk;
  std::vector<std::filesystem::path> files;
};

const std::vector<std::string>& command_names();

// Runs one command, writing CSVs under options.out_dir and a human-readable
// report to `report`. Errors are caught and mapped to exit codes; their
// message goes to `errors`.
CommandResult run_command(ToolkitConfig config, const std::string& command, const CommandOptions& options,
                          std::ostream& report, std::ostream& errors);

}  // namespace pairsrc
