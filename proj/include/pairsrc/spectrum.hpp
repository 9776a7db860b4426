#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace pairsrc {

struct PumpMode {
  double wavelength_nm = 0.0;
  double weight = 0.0;
};

// Sampled pump intensity. Samples are kept sorted by wavelength and weights
// are normalized to unit sum unless every weight is zero.
class PumpSpectrum {
 public:
  PumpSpectrum() = default;
  PumpSpectrum(std::vector<PumpMode> samples, double total_power_mw);

  const std::vector<PumpMode>& samples() const { return samples_; }
  double total_power_mw() const { return total_power_mw_; }
  std::size_t size() const { return samples_.size(); }
  double weight_sum() const;

  static PumpSpectrum monochromatic(double wavelength_nm, double power_mw);

 private:
  std::vector<PumpMode> samples_;
  double total_power_mw_ = 0.0;
};

// Comb of modes spaced mode_spacing_nm apart under a Gaussian envelope,
// truncated at ±2 envelope FWHM around the center.
PumpSpectrum make_pump_comb(double center_nm, double envelope_fwhm_nm,
                            double mode_spacing_nm, double power_mw);

// Two-column CSV (wavelength_nm, relative_power). Lines starting with '#' and
// a non-numeric header line are skipped.
PumpSpectrum read_pump_csv(std::istream& in, double power_mw);
PumpSpectrum read_pump_csv(const std::filesystem::path& path, double power_mw);

// Uniform wavelength axis with `points` samples including both ends.
struct AxisSpec {
  double min_nm = 730.0;
  double max_nm = 890.0;
  std::size_t points = 512;

  std::vector<double> values() const;
  double step() const;
};

// Signal–idler intensity on a rectangular grid, stored row-major with rows
// along grid_s and columns along grid_i. The scale is relative.
struct JointSpectrum {
  std::vector<double> grid_s;
  std::vector<double> grid_i;
  std::vector<double> intensity;
  double temperature_c = 0.0;
  std::vector<std::string> warnings;

  double at(std::size_t row, std::size_t col) const { return intensity[row * grid_i.size() + col]; }
  double total() const;
};

struct CurvePoint {
  double x = 0.0;
  double y = 0.0;
};
using Curve = std::vector<CurvePoint>;

// Header row holds the λi axis, first column the λs axis.
void write_grid_csv(std::ostream& out, const std::vector<double>& grid_s,
                    const std::vector<double>& grid_i, const std::vector<double>& values,
                    const std::string& comment);

// Grid CSV as written by write_grid_csv; lines starting with '#' are skipped.
struct GridTable {
  std::vector<double> grid_s;
  std::vector<double> grid_i;
  std::vector<double> values;
};
GridTable read_grid_csv(std::istream& in);

}  // namespace pairsrc
