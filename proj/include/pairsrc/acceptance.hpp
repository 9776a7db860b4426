#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "pairsrc/config.hpp"

namespace pairsrc {

struct Verdict {
  std::string id;
  std::string description;
  std::string expected;
  double computed = 0.0;
  std::string tolerance;
  bool pass = false;
  std::string note;
  // Wall-clock values are left out of the CSV so reruns stay identical.
  bool timing = false;
};

struct AcceptanceOptions {
  // Randomized scenarios for the analytic/Monte Carlo agreement check.
  std::size_t monte_carlo_scenarios = 20;
};

// Evaluates the reference numbers and the property suite against
// a configuration. Requires the config to describe the beam-displacement
// source: a pump walk-off element, an SPDC walk-off element and one
// compensator of each kind.
std::vector<Verdict> evaluate_acceptance(const ToolkitConfig& cfg, const AcceptanceOptions& options = {});

void write_verdict_csv(std::ostream& out, const std::vector<Verdict>& verdicts, const std::string& comment);

}  // namespace pairsrc
