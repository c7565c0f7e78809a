#include "ves/csv_io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <stdexcept>

namespace ves {

namespace {

std::string strip(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

// Seconds since epoch for "YYYY-MM-DDTHH:MM:SS" (optional trailing Z).
long long parse_iso8601(const std::string& raw, const std::string& path) {
  std::string s = strip(raw);
  if (!s.empty() && (s.back() == 'Z' || s.back() == 'z')) s.pop_back();
  std::tm tm{};
  std::istringstream is(s);
  is >> std::get_time(&tm, "%Y-%m-%dT%H:%M:%S");
  if (is.fail()) {
    // also accept a space separator
    std::istringstream is2(s);
    is2 >> std::get_time(&tm, "%Y-%m-%d %H:%M:%S");
    if (is2.fail())
      throw std::runtime_error(path + ": bad timestamp '" + raw + "'");
  }
  return static_cast<long long>(timegm(&tm));
}

}  // namespace

TimeSeries read_demand_csv(const std::string& path, bool fill_linear) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open CSV file: " + path);

  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error(path + ": empty file");
  {
    std::string header = strip(line);
    std::string normalized;
    for (char c : header)
      if (c != ' ' && c != '\t') normalized += c;
    if (normalized != "timestamp_iso8601,net_demand_kw")
      throw std::runtime_error(path + ": expected header 'timestamp_iso8601,net_demand_kw'");
  }

  std::vector<long long> times;
  std::vector<double> values;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string row = strip(line);
    if (row.empty()) continue;
    const auto comma = row.find(',');
    if (comma == std::string::npos)
      throw std::runtime_error(path + ":" + std::to_string(line_no) + ": missing column");
    times.push_back(parse_iso8601(row.substr(0, comma), path));
    try {
      values.push_back(std::stod(strip(row.substr(comma + 1))));
    } catch (const std::exception&) {
      throw std::runtime_error(path + ":" + std::to_string(line_no) + ": bad value");
    }
  }
  if (times.size() < 2) throw std::runtime_error(path + ": need at least 2 rows");

  const long long step = times[1] - times[0];
  if (step <= 0) throw std::runtime_error(path + ": timestamps must be strictly increasing");

  TimeSeries ts;
  ts.dt = static_cast<double>(step) / 3600.0;
  ts.label = path;
  ts.samples.push_back(values[0]);
  for (std::size_t i = 1; i < times.size(); ++i) {
    const long long gap = times[i] - times[i - 1];
    if (gap == step) {
      ts.samples.push_back(values[i]);
      continue;
    }
    if (gap <= 0 || gap % step != 0)
      throw std::runtime_error(path + ": non-uniform sampling at row " + std::to_string(i + 2));
    if (!fill_linear)
      throw std::runtime_error(path + ": gap at row " + std::to_string(i + 2) +
                               " (pass --fill linear to interpolate)");
    const long long missing = gap / step;
    for (long long j = 1; j <= missing; ++j) {
      const double f = static_cast<double>(j) / static_cast<double>(missing);
      ts.samples.push_back((1.0 - f) * values[i - 1] + f * values[i]);
    }
  }
  ts.validate();
  return ts;
}

void write_curve_csv(const std::string& path, const FrequencyGrid& grid,
                     const std::vector<double>& values) {
  if (values.size() != grid.size())
    throw std::invalid_argument("write_curve_csv: length mismatch");
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write CSV file: " + path);
  out << "omega_rad_per_h,value\n";
  out << std::setprecision(17);
  for (std::size_t k = 0; k < grid.size(); ++k)
    out << grid.omegas[k] << ',' << values[k] << '\n';
}

}  // namespace ves
