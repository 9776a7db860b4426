#include <doctest.h>

#include <cmath>

#include "pairsrc/dispersion.hpp"
#include "pairsrc/errors.hpp"
#include "pairsrc/spdc.hpp"
#include "test_support.hpp"

using namespace pairsrc;
using testing_support::library;

namespace {

const MaterialModel& m(const char* name) { return library().at(name); }

UniaxialElement yvo4_plate(double length_mm, int sign) {
  UniaxialElement e;
  e.label = "plate";
  e.ordinary = m("YVO4_o");
  e.extraordinary = m("YVO4_e");
  e.length_mm = length_mm;
  e.cut_angle_deg = 90.0;
  e.arm_sign = sign;
  return e;
}

}  // namespace

TEST_CASE("shipped models evaluate to physical indices") {
  for (const auto& [name, model] : library().models()) {
    CAPTURE(name);
    for (double l = model.valid_min_nm; l <= model.valid_max_nm; l += 5.0) {
      const double n = refractive_index(model, l, 25.0);
      CHECK(std::isfinite(n));
      CHECK(n > 1.0);
      CHECK(n < 3.0);
    }
  }
}

TEST_CASE("normal dispersion over 380-900 nm") {
  for (const auto& [name, model] : library().models()) {
    CAPTURE(name);
    const double lo = std::max(380.0, model.valid_min_nm);
    const double hi = std::min(900.0, model.valid_max_nm);
    double prev = refractive_index(model, lo, 25.0);
    for (double l = lo + 1.0; l <= hi; l += 1.0) {
      const double n = refractive_index(model, l, 25.0);
      CHECK(n < prev);
      prev = n;
    }
  }
}

TEST_CASE("BBO is negative and YVO4 positive uniaxial") {
  for (double l = 360.0; l <= 1060.0; l += 10.0) {
    CHECK(refractive_index(m("BBO_o_eimerl"), l, 25.0) > refractive_index(m("BBO_e_eimerl"), l, 25.0));
    CHECK(refractive_index(m("YVO4_e"), l, 25.0) > refractive_index(m("YVO4_o"), l, 25.0));
  }
}

TEST_CASE("KTP z index at 810 nm matches an independent evaluation") {
  // Oracle: 30-digit evaluation of the same coefficient set.
  CHECK(refractive_index(m("KTP_z_fradkin"), 810.0, 25.0) == doctest::Approx(1.844367226).epsilon(1e-9));
  CHECK(std::abs(refractive_index(m("KTP_z_fradkin"), 810.0, 25.0) - 1.8444) < 0.001);
  CHECK(refractive_index(m("KTP_z_fradkin"), 810.0, 40.0) == doctest::Approx(1.844617313).epsilon(1e-9));
}

TEST_CASE("thermo-optic term vanishes at the reference temperature") {
  const auto& ktp = m("KTP_z_fradkin");
  MaterialModel cold = ktp;
  cold.thermo_optic = {};
  for (double l : {405.0, 810.0, 1064.0})
    CHECK(refractive_index(ktp, l, ktp.reference_temperature_c) == refractive_index(cold, l, 25.0));
}

TEST_CASE("KTP index contrast implies the 3.425 um period") {
  for (double t = 20.0; t <= 40.0; t += 5.0) {
    const auto& ktp = m("KTP_z_fradkin");
    const double dn = refractive_index(ktp, 405.0, t) - refractive_index(ktp, 810.0, t);
    CHECK(std::abs(dn / (405.0 / 3425.0) - 1.0) < 0.02);
  }
}

TEST_CASE("out-of-range wavelength is rejected with the model name") {
  CHECK_THROWS_AS(refractive_index(m("BBO_o_eimerl"), 1500.0, 25.0), RangeError);
  try {
    refractive_index(m("YVO4_o"), 200.0, 25.0);
  } catch (const RangeError& e) {
    CHECK(std::string(e.what()).find("YVO4_o") != std::string::npos);
  }
}

TEST_CASE("index_at_angle limits and bounds") {
  CHECK(index_at_angle(1.66, 1.55, 0.0) == doctest::Approx(1.66).epsilon(1e-15));
  CHECK(index_at_angle(1.66, 1.55, 90.0) == doctest::Approx(1.55).epsilon(1e-15));
  for (double th = 1.0; th < 90.0; th += 1.0) {
    const double n = index_at_angle(1.66, 1.55, th);
    CHECK(n > 1.55);
    CHECK(n < 1.66);
    const double p = index_at_angle(2.0, 2.2, th);
    CHECK(p > 2.0);
    CHECK(p < 2.2);
  }
  const double no = refractive_index(m("BBO_o_eimerl"), 405.0, 25.0);
  const double ne = refractive_index(m("BBO_e_eimerl"), 405.0, 25.0);
  const double n45 = index_at_angle(no, ne, 45.0);
  CHECK(std::abs(n45 - 1.626) < 0.003);
  CHECK(n45 == doctest::Approx(1.626579481).epsilon(1e-9));
}

TEST_CASE("walk-off vanishes on axis and peaks near 45 degrees") {
  CHECK(walkoff_angle(1.66, 1.55, 0.0) == 0.0);
  for (const auto& pair : {std::pair{"BBO_o_eimerl", "BBO_e_eimerl"}, std::pair{"BBO_o_kato", "BBO_e_kato"},
                           std::pair{"YVO4_o", "YVO4_e"}, std::pair{"YVO4_o_alt", "YVO4_e_alt"}}) {
    for (double l : {405.0, 810.0}) {
      const double no = refractive_index(m(pair.first), l, 25.0);
      const double ne = refractive_index(m(pair.second), l, 25.0);
      double best = 0.0, best_th = 0.0;
      for (double th = 0.0; th <= 90.0; th += 0.01) {
        const double r = walkoff_angle(no, ne, th);
        if (r > best) best = r, best_th = th;
      }
      CAPTURE(pair.first);
      CHECK(std::abs(best_th - 45.0) <= 5.0);
    }
  }
}

TEST_CASE("BBO displacer and combiner separate the beams by 1 mm") {
  const double no4 = refractive_index(m("BBO_o_eimerl"), 405.0, 25.0);
  const double ne4 = refractive_index(m("BBO_e_eimerl"), 405.0, 25.0);
  CHECK(std::abs(lateral_displacement_mm(no4, ne4, 45.0, 13.0) - 1.0) <= 0.05);
  const double no8 = refractive_index(m("BBO_o_eimerl"), 810.0, 25.0);
  const double ne8 = refractive_index(m("BBO_e_eimerl"), 810.0, 25.0);
  CHECK(std::abs(lateral_displacement_mm(no8, ne8, 45.0, 13.76) - 1.0) <= 0.05);
}

TEST_CASE("birefringent phase: zero length, linearity, arm sign") {
  CHECK(birefringent_phase(yvo4_plate(0.0, 1), 405.0, 25.0) == 0.0);
  const double one = birefringent_phase(yvo4_plate(0.5, 1), 700.0, 25.0);
  const double two = birefringent_phase(yvo4_plate(1.0, 1), 700.0, 25.0);
  CHECK(two == 2.0 * one);
  for (double l : {405.0, 600.0, 810.0})
    CHECK(birefringent_phase(yvo4_plate(0.78, -1), l, 25.0) == -birefringent_phase(yvo4_plate(0.78, 1), l, 25.0));
}

TEST_CASE("pre-compensator phase golden value") {
  // Oracle: 30-digit evaluation of 2π·L·(n_e − n_o)/λ.
  CHECK(birefringent_phase(yvo4_plate(0.78, 1), 405.0, 25.0) == doctest::Approx(3152.51642033).epsilon(1e-10));
}

TEST_CASE("element validation") {
  auto e = yvo4_plate(-0.1, 1);
  CHECK_THROWS_AS(e.validate(), ValidationError);
  e = yvo4_plate(0.1, 0);
  CHECK_THROWS_AS(e.validate(), ValidationError);
  e = yvo4_plate(0.1, 1);
  e.cut_angle_deg = 95.0;
  CHECK_THROWS_AS(e.validate(), ValidationError);
}

TEST_CASE("materials file round trip and errors") {
  const auto lib = MaterialLibrary::from_json_text(R"({"version": 3, "models": [
    {"name": "flat", "axis": "ordinary", "form": "pole",
     "coefficients": {"A": 2.25, "terms": [], "D": 0.0}, "valid_range_nm": [300, 1000]}]})");
  CHECK(lib.version() == 3);
  CHECK(refractive_index(lib.at("flat"), 500.0, 80.0) == doctest::Approx(1.5).epsilon(1e-15));
  CHECK_THROWS(lib.at("missing"));
  CHECK_THROWS_AS(MaterialLibrary::from_json_text("{\"version\": 1, \"models\": [{}]}"), ValidationError);
}
