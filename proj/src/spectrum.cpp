#include "pairsrc/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "pairsrc/errors.hpp"

namespace pairsrc {

namespace {

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  return out;
}

bool parse_double(const std::string& s, double& v) {
  const char* b = s.c_str();
  char* e = nullptr;
  v = std::strtod(b, &e);
  if (e == b) return false;
  while (*e == ' ' || *e == '\t' || *e == '\r') ++e;
  return *e == '\0';
}

}  // namespace

PumpSpectrum::PumpSpectrum(std::vector<PumpMode> samples, double total_power_mw)
    : samples_(std::move(samples)), total_power_mw_(total_power_mw) {
  if (!(total_power_mw >= 0.0)) throw ValidationError("pump power must be non-negative");
  double sum = 0.0;
  for (const auto& s : samples_) {
    if (!(s.weight >= 0.0)) throw ValidationError("pump weights must be non-negative");
    if (!(s.wavelength_nm > 0.0)) throw ValidationError("pump wavelengths must be positive");
    sum += s.weight;
  }
  std::stable_sort(samples_.begin(), samples_.end(),
                   [](const PumpMode& a, const PumpMode& b) { return a.wavelength_nm < b.wavelength_nm; });
  if (sum > 0.0)
    for (auto& s : samples_) s.weight /= sum;
}

double PumpSpectrum::weight_sum() const {
  double sum = 0.0;
  for (const auto& s : samples_) sum += s.weight;
  return sum;
}

PumpSpectrum PumpSpectrum::monochromatic(double wavelength_nm, double power_mw) {
  return PumpSpectrum({{wavelength_nm, 1.0}}, power_mw);
}

PumpSpectrum make_pump_comb(double center_nm, double envelope_fwhm_nm,
                            double mode_spacing_nm, double power_mw) {
  if (!(center_nm > 0.0) || !(envelope_fwhm_nm > 0.0) || !(mode_spacing_nm > 0.0))
    throw ValidationError("pump comb arguments must be positive");
  const auto half_count = static_cast<long>(std::floor(2.0 * envelope_fwhm_nm / mode_spacing_nm + 1e-9));
  const double four_ln2 = 4.0 * std::log(2.0);
  std::vector<PumpMode> modes;
  modes.reserve(static_cast<std::size_t>(2 * half_count + 1));
  for (long k = -half_count; k <= half_count; ++k) {
    const double offset = static_cast<double>(k) * mode_spacing_nm;
    const double x = offset / envelope_fwhm_nm;
    modes.push_back({center_nm + offset, std::exp(-four_ln2 * x * x)});
  }
  return PumpSpectrum(std::move(modes), power_mw);
}

PumpSpectrum read_pump_csv(std::istream& in, double power_mw) {
  std::vector<PumpMode> modes;
  std::string line;
  std::size_t lineno = 0;
  bool seen_data = false;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    const auto cells = split_csv(line);
    double l = 0.0, p = 0.0;
    if (cells.size() < 2 || !parse_double(cells[0], l) || !parse_double(cells[1], p)) {
      if (!seen_data && modes.empty()) {
        seen_data = true;  // header line
        continue;
      }
      throw ValidationError("pump CSV line " + std::to_string(lineno) + ": expected two numbers");
    }
    seen_data = true;
    modes.push_back({l, p});
  }
  if (modes.empty()) throw ValidationError("pump CSV contains no samples");
  return PumpSpectrum(std::move(modes), power_mw);
}

PumpSpectrum read_pump_csv(const std::filesystem::path& path, double power_mw) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open pump CSV " + path.string());
  return read_pump_csv(in, power_mw);
}

std::vector<double> AxisSpec::values() const {
  if (points < 2 || !(max_nm > min_nm)) throw ValidationError("axis needs >= 2 points and max > min");
  std::vector<double> v(points);
  const double h = step();
  for (std::size_t k = 0; k < points; ++k) v[k] = min_nm + h * static_cast<double>(k);
  v.back() = max_nm;
  return v;
}

double AxisSpec::step() const {
  return (max_nm - min_nm) / static_cast<double>(points - 1);
}

double JointSpectrum::total() const {
  double sum = 0.0;
  for (double v : intensity) sum += v;
  return sum;
}

void write_grid_csv(std::ostream& out, const std::vector<double>& grid_s,
                    const std::vector<double>& grid_i, const std::vector<double>& values,
                    const std::string& comment) {
  if (values.size() != grid_s.size() * grid_i.size())
    throw GridMismatchError("grid values do not match axis sizes");
  if (!comment.empty()) out << "# " << comment << '\n';
  out << "lambda_s_nm\\lambda_i_nm";
  for (double li : grid_i) out << ',' << fmt(li);
  out << '\n';
  for (std::size_t r = 0; r < grid_s.size(); ++r) {
    out << fmt(grid_s[r]);
    for (std::size_t c = 0; c < grid_i.size(); ++c) out << ',' << fmt(values[r * grid_i.size() + c]);
    out << '\n';
  }
}

GridTable read_grid_csv(std::istream& in) {
  GridTable t;
  std::string line;
  bool header = false;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    const auto cells = split_csv(line);
    if (!header) {
      for (std::size_t k = 1; k < cells.size(); ++k) {
        double v = 0.0;
        if (!parse_double(cells[k], v)) throw ValidationError("grid CSV: bad header cell");
        t.grid_i.push_back(v);
      }
      header = true;
      continue;
    }
    if (cells.size() != t.grid_i.size() + 1) throw ValidationError("grid CSV: ragged row");
    double v = 0.0;
    if (!parse_double(cells[0], v)) throw ValidationError("grid CSV: bad row label");
    t.grid_s.push_back(v);
    for (std::size_t k = 1; k < cells.size(); ++k) {
      if (!parse_double(cells[k], v)) throw ValidationError("grid CSV: bad value");
      t.values.push_back(v);
    }
  }
  return t;
}

}  // namespace pairsrc
