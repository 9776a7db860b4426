#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "pairsrc/counting.hpp"
#include "pairsrc/errors.hpp"

using namespace pairsrc;

namespace {

CountingScenario scenario(double rate, double eta_s, double eta_i, double window, double dead = 0.0,
                          std::size_t channels = 1) {
  CountingScenario sc;
  sc.generated_pair_rate = rate;
  sc.eta_signal = eta_s;
  sc.eta_idler = eta_i;
  sc.coincidence_window_s = window;
  sc.dead_time_s = dead;
  sc.channels = channels;
  return sc;
}

bool within_sigma(double observed, double expected, double n_sigma = 5.0) {
  return std::abs(observed - expected) <= n_sigma * std::sqrt(std::max(expected, 1.0));
}

std::uint64_t total_events(const EventStreams& s, int arm) {
  std::uint64_t n = 0;
  for (std::size_t c = 0; c < s.channels(); ++c) n += s.detectors[2 * c + arm].size();
  return n;
}

}  // namespace

TEST_CASE("detected rates") {
  const auto r = detected_rates(scenario(12.7e6, 0.21, 0.21, 1e-9));
  CHECK(r.coincidences == doctest::Approx(0.56e6).epsilon(0.01));
  CHECK(r.pair_to_singles_signal == doctest::Approx(0.21));
  CHECK(r.pair_to_singles_idler == doctest::Approx(0.21));
  const auto lossless = detected_rates(scenario(1e6, 1.0, 1.0, 1e-9));
  CHECK(lossless.coincidences == 1e6);
  CHECK(lossless.pair_to_singles_signal == 1.0);
  const double g = generated_rate_from_brightness(0.56e6, 1000.0, 0.21, 0.21);
  CHECK(g == doctest::Approx(1.3e10).epsilon(0.03));
  CHECK(g >= 1e10);
  CHECK(g <= 1.5e10);
}

TEST_CASE("accidental rate") {
  CHECK(accidental_rate(1e5, 1e5, 1e-9) == doctest::Approx(10.0).epsilon(1e-15));
  CHECK(accidental_rate(0.0, 1e5, 1e-9) == 0.0);
  CHECK(accidental_rate(1e5, 0.0, 1e-9) == 0.0);
}

TEST_CASE("dead time") {
  CHECK(dead_time_observed(12345.0, 0.0) == 12345.0);
  CHECK(dead_time_observed(1e6, 1e-6) == doctest::Approx(5e5).epsilon(1e-15));
  CHECK(dead_time_observed(1e18, 1e-6) == doctest::Approx(1e6).epsilon(1e-9));
  CHECK(dead_time_observed(std::numeric_limits<double>::infinity(), 1e-6) == doctest::Approx(1e6));
  double prev = 0.0;
  for (double r = 1.0; r < 1e12; r *= 1.7) {
    const double o = dead_time_observed(r, 5e-8);
    CHECK(o > prev);
    CHECK(o < 1.0 / 5e-8);
    prev = o;
  }
}

TEST_CASE("multiplexing algebra") {
  auto sc = scenario(1.27e10, 0.21, 0.21, 1e-9, 5e-8, 1);
  const auto one = multiplex_summary(sc);
  CHECK(one.total.accidentals ==
        doctest::Approx(accidental_rate(one.total.singles_signal, one.total.singles_idler, 1e-9)).epsilon(1e-15));
  sc.channels = 8;
  const auto eight = multiplex_summary(sc);
  CHECK(eight.total.accidentals * 8.0 == doctest::Approx(one.total.accidentals).epsilon(1e-15));
  CHECK(eight.total.true_coincidences == one.total.true_coincidences);
  for (std::size_t n : {1u, 2u, 3u, 7u, 64u, 1000u}) {
    sc.channels = n;
    const auto m = multiplex_summary(sc);
    const double dn = static_cast<double>(n);
    CHECK(std::abs(m.per_channel.singles_signal * dn / one.total.singles_signal - 1.0) <= 1e-12);
    CHECK(std::abs(m.total.car / (dn * one.total.car) - 1.0) <= 1e-12);
  }
}

TEST_CASE("minimum channel count for the 1 W projection") {
  auto sc = scenario(generated_rate_from_brightness(0.56e6, 1000.0, 0.21, 0.21), 0.21, 0.21, 1e-9, 5e-8);
  const std::size_t n = min_channels_for(sc, 1e7, 10.0);
  // Oracle: scan with the closed-form expressions.
  const double s = sc.generated_pair_rate * 0.21;
  const double c = sc.generated_pair_rate * 0.21 * 0.21;
  std::size_t expected = 0;
  for (std::size_t k = 1; k < 100000 && !expected; ++k) {
    const double per = s / static_cast<double>(k);
    const double observed = per / (1.0 + per * 5e-8);
    const double car = c / (s * s * 1e-9 / static_cast<double>(k));
    if (observed <= 1e7 && car >= 10.0) expected = k;
  }
  CHECK(n == expected);
  CHECK(n == 134);
  CHECK(min_channels_for(sc, 1e7, 1e9, 50) == 0);
}

TEST_CASE("simulation: lossless pairs are all counted") {
  const auto sc = scenario(2e5, 1.0, 1.0, 1e-6, 0.0, 3);
  const auto sim = simulate_event_streams(sc, 0.5, 5);
  CHECK(count_coincidences(sim.streams, 1e-6).total == sim.truth.births);
  CHECK(sim.truth.pairs_detected == sim.truth.births);
}

TEST_CASE("simulation is reproducible per seed") {
  const auto sc = scenario(1e5, 0.5, 0.4, 1e-9, 1e-7, 2);
  const auto a = simulate_event_streams(sc, 0.2, 77);
  const auto b = simulate_event_streams(sc, 0.2, 77);
  const auto c = simulate_event_streams(sc, 0.2, 78);
  CHECK(a.streams.detectors == b.streams.detectors);
  CHECK(a.streams.detectors != c.streams.detectors);
}

TEST_CASE("simulation: 1e6 pairs/s at eta = 0.2 for 10 s") {
  const auto sc = scenario(1e6, 0.2, 0.2, 1e-9);
  const auto sim = simulate_event_streams(sc, 10.0, 2024);
  const auto n = count_coincidences(sim.streams, 1e-9).total;
  CHECK(std::abs(static_cast<double>(n) - 4e5) <= 5.0 * std::sqrt(4e5));
}

TEST_CASE("uncorrelated streams reproduce the accidental formula") {
  const auto sc = scenario(1e5, 1.0, 1.0, 1e-9);
  SimulationOptions opt;
  opt.correlated = false;
  const auto sim = simulate_event_streams(sc, 100.0, 31, opt);
  CHECK(within_sigma(static_cast<double>(total_events(sim.streams, 0)), 1e7));
  const auto n = count_coincidences(sim.streams, 1e-9).total;
  CHECK(std::abs(static_cast<double>(n) - 1000.0) <= 5.0 * std::sqrt(1000.0));
}

TEST_CASE("dead time in the simulation matches the analytic model") {
  const auto sc = scenario(1e6, 1.0, 1.0, 1e-9, 1e-7);
  const auto sim = simulate_event_streams(sc, 1.0, 9);
  const double expected = dead_time_observed(1e6, 1e-7);
  CHECK(within_sigma(static_cast<double>(total_events(sim.streams, 0)), expected));
  CHECK(within_sigma(static_cast<double>(total_events(sim.streams, 1)), expected));
  for (const auto& d : sim.streams.detectors)
    for (std::size_t k = 1; k < d.size(); ++k) CHECK(d[k] - d[k - 1] >= 1e-7 * (1.0 - 1e-9));
}

TEST_CASE("analytic and Monte Carlo agree over random scenarios") {
  std::mt19937_64 rng(555);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int k = 0; k < 20; ++k) {
    const auto sc = scenario(1e4 + 9.9e5 * u(rng), 0.05 + 0.95 * u(rng), 0.05 + 0.95 * u(rng),
                             (0.5 + 4.5 * u(rng)) * 1e-9, 0.0, 1 + static_cast<std::size_t>(4 * u(rng)));
    const double t = 0.5;
    const auto sim = simulate_event_streams(sc, t, rng());
    const auto m = multiplex_summary(sc);
    CAPTURE(k);
    CHECK(within_sigma(static_cast<double>(total_events(sim.streams, 0)), m.total.singles_signal * t));
    CHECK(within_sigma(static_cast<double>(total_events(sim.streams, 1)), m.total.singles_idler * t));
    CHECK(within_sigma(static_cast<double>(sim.truth.pairs_detected), m.total.true_coincidences * t));
    // Window left in place: trues plus accidentals.
    CHECK(within_sigma(static_cast<double>(count_coincidences(sim.streams, sc.coincidence_window_s).total),
                       (m.total.true_coincidences + m.total.accidentals) * t));
    // Shifted window: accidentals only.
    CHECK(within_sigma(static_cast<double>(count_coincidences(sim.streams, sc.coincidence_window_s, 1e-6).total),
                       m.total.accidentals * t));
  }
}

TEST_CASE("coincidence counting edge cases") {
  EventStreams s;
  s.duration_s = 1.0;
  s.detectors = {{0.1, 0.2, 0.3}, {0.1, 0.2, 0.3}};
  CHECK(count_coincidences(s, 1e-12).total == 3);
  s.detectors[1] = {0.15, 0.25, 0.35};
  CHECK(count_coincidences(s, 1e-3).total == 0);
  // One-sided window: idler must not precede the signal.
  s.detectors[1] = {0.0999, 0.1999, 0.2999};
  CHECK(count_coincidences(s, 1e-3).total == 0);
  s.detectors[1] = {0.3, 0.1};
  CHECK_THROWS_AS(count_coincidences(s, 1e-3), ValidationError);
}

TEST_CASE("event budget and validation") {
  CHECK_THROWS_AS(simulate_event_streams(scenario(1e9, 1, 1, 1e-9), 1.0, 1), ComputationError);
  CHECK_THROWS_AS(scenario(1e5, 1.5, 1.0, 1e-9).validate(), ValidationError);
  CHECK_THROWS_AS(scenario(1e5, 1.0, 1.0, 1e-9, 0.0, 0).validate(), ValidationError);
}

TEST_CASE("stream CSV round trip") {
  const auto sim = simulate_event_streams(scenario(1e4, 0.5, 0.5, 1e-9, 0.0, 2), 0.05, 4);
  std::stringstream io;
  write_streams_csv(io, sim.streams, "test");
  const auto back = read_streams_csv(io);
  CHECK(back.detectors == sim.streams.detectors);
  CHECK(back.seed == sim.streams.seed);
}
