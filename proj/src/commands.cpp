#include "pairsrc/commands.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <ostream>

#include "pairsrc/acceptance.hpp"
#include "pairsrc/counting.hpp"
#include "pairsrc/errors.hpp"
#include "pairsrc/phasemap.hpp"
#include "pairsrc/polarization.hpp"
#include "pairsrc/spdc.hpp"
#include "pairsrc/version.hpp"

namespace pairsrc {

namespace fs = std::filesystem;

namespace {

std::string fmt(double v, const char* spec = "%.10g") {
  char buf[48];
  std::snprintf(buf, sizeof buf, spec, v);
  return buf;
}

class Context {
 public:
  Context(const ToolkitConfig& cfg, const fs::path& out_dir, std::ostream& report, CommandResult& result)
      : cfg_(cfg), out_dir_(out_dir), report_(report), result_(result) {}

  const ToolkitConfig& cfg() const { return cfg_; }
  std::ostream& report() { return report_; }

  // Every CSV opens with the provenance comment.
  std::ofstream csv(const std::string& command, const std::string& name) {
    const fs::path path = out_dir_ / name;
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ComputationError("cannot write " + path.string());
    out << "# " << header(command) << '\n';
    result_.files.push_back(path);
    return out;
  }

  std::string header(const std::string& command) const {
    return std::string("pairsrc ") + kVersion + " config=" + cfg_.config_hash + " command=" + command;
  }

  const JointSpectrum& broadband() {
    if (!broadband_) broadband_ = joint_spectrum(cfg_.layout.crystal, cfg_.layout.pump, cfg_.grid);
    return *broadband_;
  }

 private:
  const ToolkitConfig& cfg_;
  fs::path out_dir_;
  std::ostream& report_;
  CommandResult& result_;
  std::optional<JointSpectrum> broadband_;
};

void write_curve(std::ostream& out, const std::string& x_name, const std::vector<std::string>& y_names,
                 const std::vector<double>& x, const std::vector<std::vector<double>>& ys) {
  out << x_name;
  for (const auto& n : y_names) out << ',' << n;
  out << '\n';
  for (std::size_t k = 0; k < x.size(); ++k) {
    out << fmt(x[k]);
    for (const auto& y : ys) out << ',' << fmt(y[k]);
    out << '\n';
  }
}

std::vector<double> normalized(const Curve& c) {
  double peak = 0.0;
  for (const auto& p : c) peak = std::max(peak, p.y);
  std::vector<double> y;
  for (const auto& p : c) y.push_back(peak > 0.0 ? p.y / peak : 0.0);
  return y;
}

std::vector<double> xs(const Curve& c) {
  std::vector<double> x;
  for (const auto& p : c) x.push_back(p.x);
  return x;
}

std::string width_or_none(const Curve& c) {
  try {
    return fmt(fwhm(c), "%.3f") + " nm";
  } catch (const NoSolutionError&) {
    return "undefined";
  }
}

double degenerate_temperature(const ToolkitConfig& cfg) {
  const double lp = cfg.narrowband_pump_nm;
  return solve_tuning_temperature(cfg.layout.crystal, lp, 2.0 * lp, cfg.temperature_scan.min_c - 50.0,
                                  cfg.temperature_scan.max_c + 50.0);
}

void cmd_spectrum(Context& ctx) {
  const auto& cfg = ctx.cfg();
  const auto& js = ctx.broadband();
  const auto broad = marginal_spectrum(js);
  {
    auto out = ctx.csv("spectrum", "spectrum_broadband.csv");
    write_curve(out, "lambda_s_nm", {"relative_intensity"}, xs(broad), {normalized(broad)});
  }
  {
    auto out = ctx.csv("spectrum", "joint_spectrum.csv");
    write_grid_csv(out, js.grid_s, js.grid_i, js.intensity, "");
  }
  CrystalSpec deg = cfg.layout.crystal;
  deg.temperature_c = degenerate_temperature(cfg);
  const auto mono = PumpSpectrum::monochromatic(cfg.narrowband_pump_nm, 1.0);
  const auto narrow = marginal_spectrum(joint_spectrum(deg, mono, cfg.grid));
  const auto at_config = marginal_spectrum(joint_spectrum(cfg.layout.crystal, mono, cfg.grid));
  {
    auto out = ctx.csv("spectrum", "spectrum_narrowband.csv");
    out << "# degenerate_temperature_c=" << fmt(deg.temperature_c) << " config_temperature_c="
        << fmt(cfg.layout.crystal.temperature_c) << '\n';
    write_curve(out, "lambda_s_nm", {"degenerate", "config_temperature"}, xs(narrow),
                {normalized(narrow), normalized(at_config)});
  }
  for (const auto& w : js.warnings) ctx.report() << "warning: " << w << '\n';
  ctx.report() << "broadband marginal FWHM: " << width_or_none(broad) << '\n'
               << "narrowband degenerate (T = " << fmt(deg.temperature_c, "%.3f")
               << " C) FWHM: " << width_or_none(narrow) << '\n';
}

void cmd_pump_rate(Context& ctx) {
  const auto& cfg = ctx.cfg();
  const auto& crystal = cfg.layout.crystal;
  const double lp = cfg.narrowband_pump_nm;
  std::vector<double> x, y;
  for (int k = 0; k <= 800; ++k) {
    const double p = lp - 2.0 + 0.005 * k;
    x.push_back(p);
    y.push_back(integrated_collinear_rate(crystal, p));
  }
  const double peak = *std::max_element(y.begin(), y.end());
  for (double& v : y) v = peak > 0.0 ? v / peak : 0.0;
  std::vector<double> weight(x.size(), 0.0);
  {
    auto out = ctx.csv("pump-rate", "pump_rate.csv");
    write_curve(out, "pump_nm", {"relative_rate"}, x, {y});
  }
  const auto modes = collinear_rate_vs_pump(crystal, cfg.layout.pump);
  {
    auto out = ctx.csv("pump-rate", "pump_modes.csv");
    out << "pump_nm,weight,relative_rate\n";
    for (std::size_t k = 0; k < modes.size(); ++k)
      out << fmt(modes[k].pump_nm) << ',' << fmt(cfg.layout.pump.samples()[k].weight) << ','
          << fmt(peak > 0.0 ? modes[k].rate / peak : 0.0) << '\n';
  }
  double total = 0.0;
  for (const auto& m : modes) total += m.rate;
  const auto best = std::max_element(y.begin(), y.end()) - y.begin();
  ctx.report() << "rate peaks at pump " << fmt(x[best], "%.3f") << " nm; comb-weighted rate "
               << fmt(peak > 0.0 ? total / peak : 0.0, "%.4f") << " of the single-line peak\n";
}

void cmd_temperature_scan(Context& ctx) {
  const auto& cfg = ctx.cfg();
  const auto& scan = cfg.temperature_scan;
  std::vector<double> t, y;
  const auto steps = static_cast<std::size_t>(std::floor((scan.max_c - scan.min_c) / scan.step_c + 1e-9));
  CrystalSpec crystal = cfg.layout.crystal;
  for (std::size_t k = 0; k <= steps; ++k) {
    crystal.temperature_c = scan.min_c + scan.step_c * static_cast<double>(k);
    t.push_back(crystal.temperature_c);
    y.push_back(integrated_collinear_rate(crystal, cfg.narrowband_pump_nm));
  }
  const double peak = *std::max_element(y.begin(), y.end());
  for (double& v : y) v = peak > 0.0 ? v / peak : 0.0;
  auto out = ctx.csv("temperature-scan", "temperature_scan.csv");
  write_curve(out, "temperature_c", {"relative_rate"}, t, {y});
  const auto best = std::max_element(y.begin(), y.end()) - y.begin();
  ctx.report() << "relative rate peaks at " << fmt(t[best], "%.2f") << " C\n";
}

void cmd_phase_map(Context& ctx) {
  const auto pm = phase_map(ctx.cfg().layout, ctx.cfg().grid);
  auto out = ctx.csv("phase-map", "phase_map.csv");
  write_grid_csv(out, pm.grid_s, pm.grid_i, pm.phase, "");
  ctx.report() << "visibility at configured lengths: " << fmt(visibility(ctx.broadband(), pm), "%.6f") << '\n';
}

void cmd_optimize(Context& ctx) {
  const auto& cfg = ctx.cfg();
  const auto& lib = cfg.materials;
  if (!lib.contains("YVO4_o") || !lib.contains("YVO4_e"))
    throw ValidationError("materials file lacks YVO4_o/YVO4_e for default compensators");
  const auto layout = with_default_compensators(cfg.layout, lib.at("YVO4_o"), lib.at("YVO4_e"));
  if (layout.elements.size() != cfg.layout.elements.size())
    ctx.report() << "layout lacks compensators; proposing a-cut YVO4 lengths\n";
  const auto opt = optimize_compensators(layout, ctx.broadband(), cfg.compensator_bounds);
  const double v_config = visibility(ctx.broadband(), phase_map(cfg.layout, cfg.grid));
  auto out = ctx.csv("optimize", "optimize.csv");
  out << "quantity,value\n"
      << "pre_compensator_mm," << fmt(opt.pre_mm) << '\n'
      << "post_compensator_mm," << fmt(opt.post_mm) << '\n'
      << "visibility_optimum," << fmt(opt.visibility) << '\n'
      << "visibility_configured," << fmt(v_config) << '\n'
      << "evaluations," << opt.evaluations << '\n';
  for (const auto& w : opt.warnings) ctx.report() << "warning: " << w << '\n';
  ctx.report() << "optimal compensators: pre " << fmt(opt.pre_mm, "%.3f") << " mm, post "
               << fmt(opt.post_mm, "%.3f") << " mm, V = " << fmt(opt.visibility, "%.6f") << '\n'
               << "configured lengths give V = " << fmt(v_config, "%.6f") << '\n';
}

PolarizationState model_state(Context& ctx) {
  const auto& cfg = ctx.cfg();
  const double v = visibility(ctx.broadband(), phase_map(cfg.layout, cfg.grid));
  return {v, cfg.polarization.phase_rad, cfg.polarization.hv_visibility};
}

MeasurementSetup model_setup(const ToolkitConfig& cfg) {
  const auto& p = cfg.polarization;
  return {p.polarizer_transmission, p.true_pair_rate, p.accidental_rate, p.integration_time_s};
}

std::vector<double> scan_angles(const ToolkitConfig& cfg) {
  std::vector<double> a;
  const double step = cfg.polarization.scan_step_deg;
  for (std::size_t k = 0;; ++k) {
    const double th = step * static_cast<double>(k);
    if (th > 360.0 + 1e-9) break;
    a.push_back(th);
  }
  return a;
}

// Seeds differ per idler setting so the four curves are independent.
CorrelationCurve sampled_curve(Context& ctx, const PolarizationState& st, double theta_i) {
  const auto& cfg = ctx.cfg();
  return correlation_curve(st, model_setup(cfg), theta_i, scan_angles(cfg),
                           cfg.seed + static_cast<std::uint64_t>(theta_i));
}

void cmd_curves(Context& ctx) {
  const auto st = model_state(ctx);
  for (double ti : {0.0, 45.0, 90.0, 135.0}) {
    const auto curve = sampled_curve(ctx, st, ti);
    auto out = ctx.csv("curves", "curve_theta_i_" + std::to_string(static_cast<int>(ti)) + ".csv");
    write_curve_csv(out, curve, "");
  }
  ctx.report() << "wrote correlation curves for idler at 0/45/90/135 deg (model coherence "
               << fmt(st.coherence, "%.5f") << ")\n";
}

void cmd_visibility(Context& ctx) {
  const auto st = model_state(ctx);
  auto out = ctx.csv("visibility", "visibility.csv");
  out << "basis,theta_i_deg,visibility,sigma,qber\n";
  for (double ti : {0.0, 45.0}) {
    const auto est = visibility_from_curve(sampled_curve(ctx, st, ti));
    const char* basis = ti == 0.0 ? "HV" : "DA";
    out << basis << ',' << fmt(ti) << ',' << fmt(est.visibility) << ',' << fmt(est.sigma) << ','
        << fmt(qber_from_visibility(est.visibility)) << '\n';
    ctx.report() << basis << " visibility " << fmt(est.visibility, "%.4f") << " +/- " << fmt(est.sigma, "%.4f")
                 << ", QBER " << fmt(qber_from_visibility(est.visibility), "%.4f") << '\n';
  }
  ctx.report() << "model coherence at configured lengths " << fmt(st.coherence, "%.4f")
               << " (reference D/A value 0.964)\n";
}

void cmd_counting(Context& ctx) {
  const auto& cc = ctx.cfg().counting;
  CountingScenario sc = cc.scenario;
  const auto rates = detected_rates(sc);
  const auto m = multiplex_summary(sc);
  {
    auto out = ctx.csv("counting", "counting.csv");
    out << "quantity,value\n"
        << "brightness_per_mw," << fmt(sc.brightness_per_mw) << '\n'
        << "pump_power_mw," << fmt(sc.pump_power_mw) << '\n'
        << "generated_pair_rate," << fmt(sc.generated_pair_rate) << '\n'
        << "singles_signal," << fmt(rates.singles_signal) << '\n'
        << "singles_idler," << fmt(rates.singles_idler) << '\n'
        << "coincidences," << fmt(rates.coincidences) << '\n'
        << "pair_to_singles_signal," << fmt(rates.pair_to_singles_signal) << '\n'
        << "pair_to_singles_idler," << fmt(rates.pair_to_singles_idler) << '\n'
        << "accidentals," << fmt(m.total.accidentals) << '\n'
        << "car," << fmt(m.total.car) << '\n'
        << "observed_car," << fmt(m.total.observed_car) << '\n';
  }
  const std::size_t n_min = min_channels_for(sc, cc.max_detector_rate_cps, cc.min_car);
  {
    auto out = ctx.csv("counting", "multiplex.csv");
    out << "# min_channels=" << n_min << " max_detector_rate_cps=" << fmt(cc.max_detector_rate_cps)
        << " min_car=" << fmt(cc.min_car) << '\n';
    out << "channels,singles_per_detector,observed_singles_per_detector,true_total,accidentals_total,car,"
           "observed_car\n";
    std::vector<std::size_t> ns{1, 2, 4, 8, 16, 32, 64, 128, 256, 512};
    if (n_min > 0 && std::find(ns.begin(), ns.end(), n_min) == ns.end()) ns.push_back(n_min);
    std::sort(ns.begin(), ns.end());
    for (std::size_t n : ns) {
      sc.channels = n;
      const auto r = multiplex_summary(sc);
      out << n << ',' << fmt(r.per_channel.singles_signal) << ',' << fmt(r.per_channel.observed_singles_signal)
          << ',' << fmt(r.total.true_coincidences) << ',' << fmt(r.total.accidentals) << ',' << fmt(r.total.car)
          << ',' << fmt(r.total.observed_car) << '\n';
    }
  }
  ctx.report() << "generated pairs/s: " << fmt(cc.scenario.generated_pair_rate, "%.4g")
               << "; pair-to-singles " << fmt(rates.pair_to_singles_signal, "%.3f") << "/"
               << fmt(rates.pair_to_singles_idler, "%.3f") << "; brightness "
               << fmt(rates.coincidences / sc.pump_power_mw, "%.4g") << " pairs/s/mW\n"
               << "single channel CAR " << fmt(m.total.car, "%.4g") << "; minimum channels for "
               << fmt(cc.max_detector_rate_cps, "%.3g") << " cps and CAR >= " << fmt(cc.min_car, "%.3g") << ": "
               << (n_min ? std::to_string(n_min) : std::string("none")) << '\n';
}

void cmd_simulate(Context& ctx) {
  const auto& cfg = ctx.cfg();
  const auto& sc = cfg.simulation.scenario;
  const double duration = cfg.simulation.duration_s;
  const auto sim = simulate_event_streams(sc, duration, cfg.seed);
  {
    auto out = ctx.csv("simulate", "streams.csv");
    write_streams_csv(out, sim.streams, "");
  }
  const auto counted = count_coincidences(sim.streams, sc.coincidence_window_s);
  const double delay = std::max(1e-6, 1000.0 * sc.coincidence_window_s);
  const auto delayed = count_coincidences(sim.streams, sc.coincidence_window_s, delay);
  const auto m = multiplex_summary(sc);
  std::uint64_t singles_s = 0, singles_i = 0;
  for (std::size_t c = 0; c < sim.streams.channels(); ++c) {
    singles_s += sim.streams.detectors[2 * c].size();
    singles_i += sim.streams.detectors[2 * c + 1].size();
  }
  auto out = ctx.csv("simulate", "simulate.csv");
  out << "quantity,simulated,analytic\n"
      << "singles_signal," << singles_s << ',' << fmt(m.total.observed_singles_signal * duration) << '\n'
      << "singles_idler," << singles_i << ',' << fmt(m.total.observed_singles_idler * duration) << '\n'
      << "coincidences," << counted.total << ','
      << fmt((m.total.observed_true_coincidences + m.total.observed_accidentals) * duration) << '\n'
      << "true_pairs_detected," << sim.truth.pairs_detected << ','
      << fmt(m.total.observed_true_coincidences * duration) << '\n'
      << "accidentals_delayed_window," << delayed.total << ',' << fmt(m.total.observed_accidentals * duration)
      << '\n';
  ctx.report() << "simulated " << sim.truth.births << " pairs over " << fmt(duration) << " s: " << counted.total
               << " coincidences (analytic "
               << fmt((m.total.observed_true_coincidences + m.total.observed_accidentals) * duration, "%.1f")
               << "), delayed-window accidentals " << delayed.total << '\n';
}

int cmd_reproduce_all(Context& ctx);

using Handler = std::function<int(Context&)>;

const std::map<std::string, Handler>& handlers() {
  static const std::map<std::string, Handler> table{
      {"spectrum", [](Context& c) { return cmd_spectrum(c), int(kExitOk); }},
      {"pump-rate", [](Context& c) { return cmd_pump_rate(c), int(kExitOk); }},
      {"temperature-scan", [](Context& c) { return cmd_temperature_scan(c), int(kExitOk); }},
      {"phase-map", [](Context& c) { return cmd_phase_map(c), int(kExitOk); }},
      {"optimize", [](Context& c) { return cmd_optimize(c), int(kExitOk); }},
      {"curves", [](Context& c) { return cmd_curves(c), int(kExitOk); }},
      {"visibility", [](Context& c) { return cmd_visibility(c), int(kExitOk); }},
      {"counting", [](Context& c) { return cmd_counting(c), int(kExitOk); }},
      {"simulate", [](Context& c) { return cmd_simulate(c), int(kExitOk); }},
      {"reproduce-all", cmd_reproduce_all},
  };
  return table;
}

int cmd_reproduce_all(Context& ctx) {
  for (const auto& name : command_names()) {
    if (name == "reproduce-all") continue;
    ctx.report() << "[" << name << "]\n";
    handlers().at(name)(ctx);
  }
  ctx.report() << "[acceptance]\n";
  const auto verdicts = evaluate_acceptance(ctx.cfg());
  {
    auto out = ctx.csv("reproduce-all", "verdict.csv");
    write_verdict_csv(out, verdicts, "");
  }
  std::size_t failed = 0;
  {
    auto out = ctx.csv("reproduce-all", "summary.txt");
    for (const auto& v : verdicts) {
      const std::string value = v.timing ? "timed" : fmt(v.computed, "%.6g");
      std::string line = std::string(v.pass ? "PASS " : "FAIL ") + v.id + "  " + v.description + ": " + value +
                         " (expected " + v.expected + ", tolerance " + v.tolerance + ")";
      if (!v.note.empty()) line += "  " + v.note;
      out << line << '\n';
      ctx.report() << (v.timing ? line + "  [" + fmt(v.computed, "%.2f") + " s]" : line) << '\n';
      if (!v.pass) ++failed;
    }
    out << (failed ? std::to_string(failed) + " of " + std::to_string(verdicts.size()) + " criteria failed"
                   : "all " + std::to_string(verdicts.size()) + " criteria passed")
        << '\n';
  }
  ctx.report() << (failed ? std::to_string(failed) + " criteria failed\n" : "all criteria passed\n");
  return failed ? kExitAcceptance : kExitOk;
}

}  // namespace

const std::vector<std::string>& command_names() {
  static const std::vector<std::string> names{"spectrum",   "pump-rate", "temperature-scan", "phase-map",
                                              "optimize",   "curves",    "visibility",       "counting",
                                              "simulate",   "reproduce-all"};
  return names;
}

CommandResult run_command(ToolkitConfig config, const std::string& command, const CommandOptions& options,
                          std::ostream& report, std::ostream& errors) {
  CommandResult result;
  const auto it = handlers().find(command);
  if (it == handlers().end()) {
    errors << "error: unknown command '" << command << "'\n";
    result.exit_code = kExitValidation;
    return result;
  }
  if (options.seed) config.seed = *options.seed;
  if (options.grid_points) {
    if (*options.grid_points < 3) {
      errors << "error: --grid must be at least 3\n";
      result.exit_code = kExitValidation;
      return result;
    }
    config.grid.points = *options.grid_points;
  }
  try {
    fs::create_directories(options.out_dir);
    Context ctx(config, options.out_dir, report, result);
    result.exit_code = it->second(ctx);
  } catch (const ValidationError& e) {
    errors << "error in " << command << ": " << e.what() << '\n';
    result.exit_code = kExitValidation;
  } catch (const std::exception& e) {
    errors << "error in " << command << ": " << e.what() << '\n';
    result.exit_code = kExitComputation;
  }
  return result;
}

}  // namespace pairsrc
