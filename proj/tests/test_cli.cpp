#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <regex>
#include <sstream>

#include "pairsrc/commands.hpp"
#include "pairsrc/errors.hpp"
#include "pairsrc/version.hpp"
#include "test_support.hpp"

using namespace pairsrc;
namespace fs = std::filesystem;
using testing_support::reference_config;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

std::string source_text() { return slurp(std::string(PAIRSRC_CONFIG_DIR) + "/paper_source.json"); }

ToolkitConfig load_text(const std::string& text) { return load_config_text(text, PAIRSRC_CONFIG_DIR); }

std::string replace(std::string s, const std::string& from, const std::string& to) {
  const auto at = s.find(from);
  REQUIRE(at != std::string::npos);
  return s.replace(at, from.size(), to);
}

fs::path scratch(const std::string& name) {
  const auto p = fs::temp_directory_path() / ("pairsrc_test_" + name);
  fs::remove_all(p);
  return p;
}

struct Run {
  CommandResult result;
  std::string report;
  std::string errors;
};

Run run(const ToolkitConfig& cfg, const std::string& command, const fs::path& out) {
  std::ostringstream rep, err;
  CommandOptions opt;
  opt.out_dir = out;
  Run r{run_command(cfg, command, opt, rep, err), "", ""};
  r.report = rep.str();
  r.errors = err.str();
  return r;
}

std::string validation_message(const std::string& text) {
  try {
    load_text(text);
  } catch (const ValidationError& e) {
    return e.what();
  }
  return {};
}

}  // namespace

TEST_CASE("shipped config loads cleanly") {
  const auto& cfg = reference_config();
  CHECK(cfg.warnings.empty());
  CHECK(cfg.layout.elements.size() == 4);
  CHECK(cfg.layout.crystal.poling_period_um == 3.425);
  CHECK(cfg.config_hash.size() == 16);
  CHECK(cfg.counting.scenario.generated_pair_rate == doctest::Approx(0.56e6 * 1000.0 / (0.21 * 0.21)));
}

TEST_CASE("validation errors name their fields, all at once") {
  auto text = replace(source_text(), "\"length_mm\": 10.0", "\"length_mm\": -10.0");
  text = replace(text, "\"arm_sign\": -1, \"acts_on\": \"signal_and_idler\"}",
                 "\"arm_sign\": 0, \"acts_on\": \"signal_and_idler\"}");
  const auto msg = validation_message(text);
  CHECK(msg.find("crystal.length_mm") != std::string::npos);
  CHECK(msg.find("layout[2].arm_sign") != std::string::npos);
  CHECK(msg.find("2 problems") != std::string::npos);

  const auto missing = validation_message(replace(source_text(), "\"material\": \"KTP_z_fradkin\"",
                                                  "\"material\": \"KTP_nope\""));
  CHECK(missing.find("crystal.material") != std::string::npos);
}

TEST_CASE("parse errors carry a line number") {
  const auto msg = validation_message("{\n  \"seed\": 1,\n  oops\n}");
  CHECK(msg.find("line 3") != std::string::npos);
}

TEST_CASE("unknown fields warn") {
  const auto cfg = load_text(replace(source_text(), "\"seed\": 20240611", "\"seed\": 20240611, \"colour\": 1"));
  REQUIRE(cfg.warnings.size() == 1);
  CHECK(cfg.warnings[0].find("colour") != std::string::npos);
}

TEST_CASE("materials path override from the environment") {
  const auto dir = scratch("materials");
  fs::create_directories(dir);
  fs::copy_file(std::string(PAIRSRC_DATA_DIR) + "/materials.json", dir / "m.json");
  ::setenv(kMaterialsEnvVar, (dir / "m.json").c_str(), 1);
  const auto cfg = load_text(source_text());
  ::unsetenv(kMaterialsEnvVar);
  CHECK(cfg.materials_path == dir / "m.json");
  ::setenv(kMaterialsEnvVar, (dir / "absent.json").c_str(), 1);
  CHECK_THROWS_AS(load_text(source_text()), ValidationError);
  ::unsetenv(kMaterialsEnvVar);
}

TEST_CASE("optimize proposes lengths when the config has no compensators") {
  std::string text = source_text();
  std::regex comp(R"(,\s*\{"label": "(pre|post)_compensator"[^}]*\})");
  text = std::regex_replace(text, comp, "");
  const auto cfg = load_text(text);
  CHECK(cfg.layout.elements.size() == 2);
  const auto r = run(cfg, "optimize", scratch("nocomp"));
  CHECK(r.result.exit_code == kExitOk);
  CHECK(r.report.find("proposing") != std::string::npos);
  std::smatch m;
  REQUIRE(std::regex_search(r.report, m, std::regex(R"(pre ([0-9.]+) mm, post ([0-9.]+) mm)")));
  CHECK(std::abs(std::stod(m[1]) - 0.78) <= 0.15);
  CHECK(std::abs(std::stod(m[2]) - 0.97) <= 0.15);
}

TEST_CASE("command reports") {
  const auto out = scratch("reports");
  const auto opt = run(reference_config(), "optimize", out);
  CHECK(opt.result.exit_code == kExitOk);
  CHECK(opt.report.find("optimal compensators: pre 0.8") != std::string::npos);

  const auto vis = run(reference_config(), "visibility", out);
  CHECK(vis.result.exit_code == kExitOk);
  CHECK(vis.report.find("DA visibility") != std::string::npos);
  CHECK(vis.report.find("0.964") != std::string::npos);

  const auto cnt = run(reference_config(), "counting", out);
  CHECK(cnt.result.exit_code == kExitOk);
  CHECK(cnt.report.find("pair-to-singles 0.210/0.210") != std::string::npos);
  CHECK(cnt.report.find("brightness 5.6e+05 pairs/s/mW") != std::string::npos);
  CHECK(cnt.report.find(": 134") != std::string::npos);
}

TEST_CASE("unknown command and computation errors map to exit codes") {
  const auto r = run(reference_config(), "frobnicate", scratch("unknown"));
  CHECK(r.result.exit_code == kExitValidation);
  CHECK(r.errors.find("unknown command") != std::string::npos);

  ToolkitConfig cfg = reference_config();
  cfg.grid.min_nm = 200.0;  // outside every crystal model
  const auto bad = run(cfg, "spectrum", scratch("range"));
  CHECK(bad.result.exit_code == kExitComputation);
  CHECK(bad.errors.find("error in spectrum") != std::string::npos);
}

TEST_CASE("every command writes CSVs with a provenance header") {
  const auto out = scratch("headers");
  const std::regex header("^# pairsrc " + std::string(kVersion) + " config=[0-9a-f]{16} command=[a-z-]+\n");
  for (const auto& name : command_names()) {
    if (name == "reproduce-all") continue;
    const auto r = run(reference_config(), name, out);
    CAPTURE(name);
    CHECK(r.result.exit_code == kExitOk);
    CHECK_FALSE(r.result.files.empty());
    for (const auto& f : r.result.files) {
      const auto body = slurp(f);
      CHECK(std::regex_search(body.substr(0, 120), header));
    }
  }
}

TEST_CASE("reproduce-all is byte-identical across runs and flags failures") {
  const auto a = scratch("repro_a"), b = scratch("repro_b");
  const auto ra = run(reference_config(), "reproduce-all", a);
  const auto rb = run(reference_config(), "reproduce-all", b);
  CHECK(ra.result.exit_code == rb.result.exit_code);
  CHECK((ra.result.exit_code == kExitOk || ra.result.exit_code == kExitAcceptance));
  REQUIRE(ra.result.files.size() == rb.result.files.size());
  for (std::size_t k = 0; k < ra.result.files.size(); ++k) {
    CAPTURE(ra.result.files[k]);
    CHECK(slurp(ra.result.files[k]) == slurp(rb.result.files[k]));
  }
  const auto verdict = slurp(a / "verdict.csv");
  CHECK(verdict.find("criterion,description,expected,computed,tolerance,verdict,note") != std::string::npos);
  const bool any_fail = verdict.find(",fail,") != std::string::npos;
  CHECK((ra.result.exit_code == kExitAcceptance) == any_fail);
}

TEST_CASE("seed override changes sampled outputs only") {
  CommandOptions o1, o2;
  o1.out_dir = scratch("seed1");
  o2.out_dir = scratch("seed2");
  o2.seed = 12345;
  std::ostringstream sink;
  run_command(reference_config(), "curves", o1, sink, sink);
  run_command(reference_config(), "curves", o2, sink, sink);
  CHECK(slurp(o1.out_dir / "curve_theta_i_45.csv") != slurp(o2.out_dir / "curve_theta_i_45.csv"));
  o1.grid_points = 2;
  CHECK(run_command(reference_config(), "spectrum", o1, sink, sink).exit_code == kExitValidation);
}

TEST_CASE("command-line binary") {
  const char* exe = std::getenv("PAIRSRC_CLI");
  if (!exe) return;
  const std::string cfg = std::string(PAIRSRC_CONFIG_DIR) + "/paper_source.json";
  const auto out = scratch("binary");
  const auto status = [&](const std::string& args) {
    const int s = std::system((std::string(exe) + " " + args + " > /dev/null 2>&1").c_str());
    return WEXITSTATUS(s);
  };
  CHECK(status("counting --config " + cfg + " --out " + out.string()) == 0);
  CHECK(fs::exists(out / "multiplex.csv"));
  CHECK(status("counting --config /nonexistent.json --out " + out.string()) == 1);
  CHECK(status("bogus --config " + cfg + " --out " + out.string()) == 1);
  CHECK(status("spectrum --config " + cfg + " --grid 2 --out " + out.string()) == 1);

  const auto bad = out / "bad.json";
  std::ofstream(bad) << replace(source_text(), "\"length_mm\": 10.0", "\"length_mm\": -1");
  CHECK(status("counting --config " + bad.string() + " --out " + out.string()) == 1);
}
