#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace pairsrc {

struct CountingScenario {
  double generated_pair_rate = 0.0;  // pairs/s
  double eta_signal = 1.0;
  double eta_idler = 1.0;
  double coincidence_window_s = 1e-9;
  double dead_time_s = 0.0;
  std::size_t channels = 1;
  double pump_power_mw = 0.0;
  double brightness_per_mw = 0.0;  // detected pairs/s/mW

  void validate() const;
};

struct DetectedRates {
  double singles_signal = 0.0;
  double singles_idler = 0.0;
  double coincidences = 0.0;
  double pair_to_singles_signal = 0.0;  // C / singles_signal
  double pair_to_singles_idler = 0.0;   // C / singles_idler
};

DetectedRates detected_rates(const CountingScenario& sc);

// Generated pair rate implied by a detected brightness: B·P/(η_s·η_i).
double generated_rate_from_brightness(double brightness_per_mw, double pump_power_mw, double eta_signal,
                                      double eta_idler);

// Uncorrelated coincidences within a one-sided window: S_s·S_i·τ.
double accidental_rate(double singles_signal, double singles_idler, double window_s);

// Non-paralyzable dead time: R/(1 + R·τ).
double dead_time_observed(double rate_in, double dead_time_s);

struct ChannelRates {
  double singles_signal = 0.0;
  double singles_idler = 0.0;
  double true_coincidences = 0.0;
  double accidentals = 0.0;
  double car = 0.0;
  // After per-detector dead time.
  double observed_singles_signal = 0.0;
  double observed_singles_idler = 0.0;
  double observed_true_coincidences = 0.0;
  double observed_accidentals = 0.0;
  double observed_car = 0.0;
};

struct MultiplexSummary {
  std::size_t channels = 1;
  ChannelRates per_channel;
  ChannelRates total;
};

// Even split over N matched channel pairs.
MultiplexSummary multiplex_summary(const CountingScenario& sc);

// Smallest N ≤ max_channels whose per-detector observed singles stay at or
// below max_detector_rate and whose total CAR reaches min_car; 0 if none.
std::size_t min_channels_for(const CountingScenario& sc, double max_detector_rate, double min_car,
                             std::size_t max_channels = 100000);

// Detector k = 2c is the signal detector of channel c, k = 2c + 1 its idler.
struct EventStreams {
  std::vector<std::vector<double>> detectors;
  double duration_s = 0.0;
  std::uint64_t seed = 0;

  std::size_t channels() const { return detectors.size() / 2; }
};

struct SimulationOptions {
  bool correlated = true;           // false: arms fire independently at the same singles rates
  double max_expected_events = 1e8;
};

// Ground truth recorded while simulating.
struct SimulationTruth {
  std::uint64_t births = 0;
  std::uint64_t pairs_detected = 0;  // both photons survive efficiency and dead time
};

struct Simulation {
  EventStreams streams;
  SimulationTruth truth;
};

// Poisson pair births at the generated rate; each photon kept with its arm
// efficiency; channel drawn uniformly per pair; non-paralyzable dead time per
// detector. Reproducible for a fixed seed.
Simulation simulate_event_streams(const CountingScenario& sc, double duration_s, std::uint64_t seed,
                                  const SimulationOptions& options = {});

struct CoincidenceCount {
  std::uint64_t total = 0;
  std::vector<std::uint64_t> per_channel;
};

// Two-pointer sweep per channel: a signal at t_s and an idler at t_i coincide
// when t_i − t_s ∈ [0, window); each event pairs at most once, earliest first.
// Throws ValidationError on unsorted streams.
CoincidenceCount count_coincidences(const EventStreams& streams, double window_s, double idler_delay_s = 0.0);

// CSV rows of (detector_id, timestamp_s), ordered by detector then time.
void write_streams_csv(std::ostream& out, const EventStreams& streams, const std::string& comment);
EventStreams read_streams_csv(std::istream& in);

}  // namespace pairsrc
