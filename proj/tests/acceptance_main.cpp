// Prints one PASS/FAIL line per acceptance criterion; exits nonzero if any fails.
#include <cstdio>
#include <exception>
#include <string>

#include "pairsrc/acceptance.hpp"
#include "pairsrc/config.hpp"

int main() {
  try {
    const auto cfg = pairsrc::load_config(std::string(PAIRSRC_CONFIG_DIR) + "/paper_source.json");
    const auto verdicts = pairsrc::evaluate_acceptance(cfg);
    int failed = 0;
    for (const auto& v : verdicts) {
      std::printf("%s criterion %-4s %s: computed %.6g, expected %s, tolerance %s%s%s\n", v.pass ? "PASS" : "FAIL",
                  v.id.c_str(), v.description.c_str(), v.computed, v.expected.c_str(), v.tolerance.c_str(),
                  v.note.empty() ? "" : "; ", v.note.c_str());
      if (!v.pass) ++failed;
    }
    std::printf("%d of %zu criteria failed\n", failed, verdicts.size());
    return failed ? 1 : 0;
  } catch (const std::exception& e) {
    std::printf("FAIL acceptance run aborted: %s\n", e.what());
    return 2;
  }
}
