#include "pairsrc/counting.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <limits>
#include <ostream>
#include <random>
#include <sstream>

#include "pairsrc/errors.hpp"

namespace pairsrc {

namespace {

struct RawEvent {
  double t;
  std::uint64_t birth;
};

std::vector<RawEvent> apply_dead_time(const std::vector<RawEvent>& raw, double dead_time_s) {
  std::vector<RawEvent> kept;
  kept.reserve(raw.size());
  double last = -std::numeric_limits<double>::infinity();
  for (const auto& e : raw) {
    if (!kept.empty() && e.t <= last) continue;
    if (!kept.empty() && e.t - last < dead_time_s) continue;
    kept.push_back(e);
    last = e.t;
  }
  return kept;
}

std::uint64_t count_common_births(const std::vector<RawEvent>& a, const std::vector<RawEvent>& b) {
  std::uint64_t n = 0;
  std::size_t i = 0, j = 0;
  while (i < a.size() && j < b.size()) {
    if (a[i].birth < b[j].birth) {
      ++i;
    } else if (b[j].birth < a[i].birth) {
      ++j;
    } else {
      ++n;
      ++i;
      ++j;
    }
  }
  return n;
}

void check_sorted(const std::vector<double>& s, std::size_t detector) {
  for (std::size_t k = 1; k < s.size(); ++k)
    if (s[k] < s[k - 1])
      throw ValidationError("event stream of detector " + std::to_string(detector) + " is not sorted");
}

}  // namespace

void CountingScenario::validate() const {
  if (!(generated_pair_rate >= 0.0)) throw ValidationError("generated pair rate must be non-negative");
  if (!(eta_signal > 0.0 && eta_signal <= 1.0) || !(eta_idler > 0.0 && eta_idler <= 1.0))
    throw ValidationError("efficiencies must lie in (0, 1]");
  if (!(coincidence_window_s >= 0.0)) throw ValidationError("coincidence window must be non-negative");
  if (!(dead_time_s >= 0.0)) throw ValidationError("dead time must be non-negative");
  if (channels < 1) throw ValidationError("channel count must be at least 1");
}

DetectedRates detected_rates(const CountingScenario& sc) {
  sc.validate();
  DetectedRates r;
  r.singles_signal = sc.generated_pair_rate * sc.eta_signal;
  r.singles_idler = sc.generated_pair_rate * sc.eta_idler;
  r.coincidences = sc.generated_pair_rate * sc.eta_signal * sc.eta_idler;
  r.pair_to_singles_signal = sc.eta_idler;
  r.pair_to_singles_idler = sc.eta_signal;
  return r;
}

double generated_rate_from_brightness(double brightness_per_mw, double pump_power_mw, double eta_signal,
                                      double eta_idler) {
  if (!(eta_signal > 0.0) || !(eta_idler > 0.0)) throw ValidationError("efficiencies must be positive");
  return brightness_per_mw * pump_power_mw / (eta_signal * eta_idler);
}

double accidental_rate(double singles_signal, double singles_idler, double window_s) {
  if (singles_signal < 0.0 || singles_idler < 0.0 || window_s < 0.0)
    throw ValidationError("accidental_rate inputs must be non-negative");
  return singles_signal * singles_idler * window_s;
}

double dead_time_observed(double rate_in, double dead_time_s) {
  if (rate_in < 0.0 || dead_time_s < 0.0) throw ValidationError("dead-time inputs must be non-negative");
  if (std::isinf(rate_in)) return dead_time_s > 0.0 ? 1.0 / dead_time_s : rate_in;
  return rate_in / (1.0 + rate_in * dead_time_s);
}

MultiplexSummary multiplex_summary(const CountingScenario& sc) {
  const auto rates = detected_rates(sc);
  const double n = static_cast<double>(sc.channels);
  const double tau = sc.coincidence_window_s;

  MultiplexSummary m;
  m.channels = sc.channels;
  auto& ch = m.per_channel;
  ch.singles_signal = rates.singles_signal / n;
  ch.singles_idler = rates.singles_idler / n;
  ch.true_coincidences = rates.coincidences / n;
  ch.accidentals = accidental_rate(ch.singles_signal, ch.singles_idler, tau);
  ch.car = ch.true_coincidences / ch.accidentals;
  ch.observed_singles_signal = dead_time_observed(ch.singles_signal, sc.dead_time_s);
  ch.observed_singles_idler = dead_time_observed(ch.singles_idler, sc.dead_time_s);
  const double live_s = ch.singles_signal > 0.0 ? ch.observed_singles_signal / ch.singles_signal : 1.0;
  const double live_i = ch.singles_idler > 0.0 ? ch.observed_singles_idler / ch.singles_idler : 1.0;
  ch.observed_true_coincidences = ch.true_coincidences * live_s * live_i;
  ch.observed_accidentals = accidental_rate(ch.observed_singles_signal, ch.observed_singles_idler, tau);
  ch.observed_car = ch.observed_true_coincidences / ch.observed_accidentals;

  auto& tot = m.total;
  tot.singles_signal = rates.singles_signal;
  tot.singles_idler = rates.singles_idler;
  tot.true_coincidences = rates.coincidences;
  tot.accidentals = rates.singles_signal * rates.singles_idler * tau / n;
  tot.car = tot.true_coincidences / tot.accidentals;
  tot.observed_singles_signal = ch.observed_singles_signal * n;
  tot.observed_singles_idler = ch.observed_singles_idler * n;
  tot.observed_true_coincidences = ch.observed_true_coincidences * n;
  tot.observed_accidentals = ch.observed_accidentals * n;
  tot.observed_car = tot.observed_true_coincidences / tot.observed_accidentals;
  return m;
}

std::size_t min_channels_for(const CountingScenario& sc, double max_detector_rate, double min_car,
                             std::size_t max_channels) {
  CountingScenario trial = sc;
  for (std::size_t n = 1; n <= max_channels; ++n) {
    trial.channels = n;
    const auto m = multiplex_summary(trial);
    const double busiest = std::max(m.per_channel.observed_singles_signal, m.per_channel.observed_singles_idler);
    if (busiest <= max_detector_rate && m.total.car >= min_car) return n;
  }
  return 0;
}

Simulation simulate_event_streams(const CountingScenario& sc, double duration_s, std::uint64_t seed,
                                  const SimulationOptions& options) {
  sc.validate();
  if (!(duration_s > 0.0)) throw ValidationError("simulation duration must be positive");
  const double expected_births = sc.generated_pair_rate * duration_s * (options.correlated ? 1.0 : 2.0);
  if (expected_births > options.max_expected_events)
    throw ComputationError("event budget exceeded: expected " + std::to_string(expected_births) + " births");

  const std::size_t n = sc.channels;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_int_distribution<std::size_t> pick(0, n - 1);
  std::vector<std::vector<RawEvent>> raw(2 * n);
  Simulation sim;

  // One Poisson birth process; `arms` selects which photons it may emit.
  const auto run_process = [&](bool emit_signal, bool emit_idler) {
    if (!(sc.generated_pair_rate > 0.0)) return;
    std::exponential_distribution<double> gap(sc.generated_pair_rate);
    double t = 0.0;
    while (true) {
      t += gap(rng);
      if (t >= duration_s) break;
      const std::uint64_t id = sim.truth.births++;
      const std::size_t ch = pick(rng);
      const bool keep_s = unit(rng) < sc.eta_signal;
      const bool keep_i = unit(rng) < sc.eta_idler;
      if (emit_signal && keep_s) raw[2 * ch].push_back({t, id});
      if (emit_idler && keep_i) raw[2 * ch + 1].push_back({t, id});
    }
  };
  if (options.correlated) {
    run_process(true, true);
  } else {
    run_process(true, false);
    run_process(false, true);
  }

  sim.streams.duration_s = duration_s;
  sim.streams.seed = seed;
  sim.streams.detectors.resize(2 * n);
  for (std::size_t c = 0; c < n; ++c) {
    const auto s = apply_dead_time(raw[2 * c], sc.dead_time_s);
    const auto i = apply_dead_time(raw[2 * c + 1], sc.dead_time_s);
    if (options.correlated) sim.truth.pairs_detected += count_common_births(s, i);
    auto& ds = sim.streams.detectors[2 * c];
    auto& di = sim.streams.detectors[2 * c + 1];
    ds.reserve(s.size());
    di.reserve(i.size());
    for (const auto& e : s) ds.push_back(e.t);
    for (const auto& e : i) di.push_back(e.t);
  }
  return sim;
}

CoincidenceCount count_coincidences(const EventStreams& streams, double window_s, double idler_delay_s) {
  if (streams.detectors.size() % 2 != 0) throw ValidationError("detector count must be even");
  if (!(window_s >= 0.0)) throw ValidationError("coincidence window must be non-negative");
  CoincidenceCount out;
  out.per_channel.assign(streams.channels(), 0);
  for (std::size_t c = 0; c < streams.channels(); ++c) {
    const auto& sig = streams.detectors[2 * c];
    const auto& idl = streams.detectors[2 * c + 1];
    check_sorted(sig, 2 * c);
    check_sorted(idl, 2 * c + 1);
    std::uint64_t n = 0;
    std::size_t j = 0;
    for (double ts : sig) {
      while (j < idl.size() && idl[j] + idler_delay_s < ts) ++j;
      if (j == idl.size()) break;
      if (idl[j] + idler_delay_s - ts < window_s) {
        ++n;
        ++j;
      }
    }
    out.per_channel[c] = n;
    out.total += n;
  }
  return out;
}

void write_streams_csv(std::ostream& out, const EventStreams& streams, const std::string& comment) {
  if (!comment.empty()) out << "# " << comment << '\n';
  char buf[96];
  std::snprintf(buf, sizeof buf, "# detectors=%zu duration_s=%.17g seed=%llu\n", streams.detectors.size(),
                streams.duration_s, static_cast<unsigned long long>(streams.seed));
  out << buf;
  out << "detector_id,timestamp_s\n";
  for (std::size_t d = 0; d < streams.detectors.size(); ++d) {
    for (double t : streams.detectors[d]) {
      std::snprintf(buf, sizeof buf, "%zu,%.17g\n", d, t);
      out << buf;
    }
  }
}

EventStreams read_streams_csv(std::istream& in) {
  EventStreams s;
  std::string line;
  std::size_t lineno = 0;
  std::size_t declared = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    if (line[0] == '#') {
      unsigned long long seed = 0;
      std::size_t det = 0;
      double dur = 0.0;
      if (std::sscanf(line.c_str(), "# detectors=%zu duration_s=%lf seed=%llu", &det, &dur, &seed) == 3) {
        declared = det;
        s.duration_s = dur;
        s.seed = seed;
      }
      continue;
    }
    if (line.rfind("detector_id", 0) == 0) continue;
    std::size_t id = 0;
    double t = 0.0;
    if (std::sscanf(line.c_str(), "%zu,%lf", &id, &t) != 2)
      throw ValidationError("stream CSV line " + std::to_string(lineno) + ": expected detector_id,timestamp_s");
    if (id >= s.detectors.size()) s.detectors.resize(id + 1);
    s.detectors[id].push_back(t);
  }
  std::size_t count = std::max(declared, s.detectors.size());
  if (count % 2 != 0) ++count;
  s.detectors.resize(count);
  for (std::size_t d = 0; d < s.detectors.size(); ++d) check_sorted(s.detectors[d], d);
  if (s.duration_s == 0.0)
    for (const auto& d : s.detectors)
      if (!d.empty()) s.duration_s = std::max(s.duration_s, d.back());
  return s;
}

}  // namespace pairsrc
