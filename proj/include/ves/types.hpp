#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace ves {

inline constexpr double kPi = 3.14159265358979323846;

// Uniformly sampled real-valued record. Units: kW for demand data, dt in hours.
struct TimeSeries {
  std::vector<double> samples;
  double dt = 0.0;  // hours
  std::string label;

  void validate() const {
    if (!(dt > 0.0)) throw std::invalid_argument("TimeSeries: dt must be > 0");
    if (samples.size() < 2) throw std::invalid_argument("TimeSeries: need at least 2 samples");
    for (double v : samples)
      if (!std::isfinite(v)) throw std::invalid_argument("TimeSeries: non-finite sample");
  }

  double duration_h() const { return dt * static_cast<double>(samples.size()); }
};

// Strictly increasing frequency grid starting at 0 (rad/hour) with the
// matching trapezoid quadrature weights. All spectral integrals in this
// library are quadratures against these weights.
struct FrequencyGrid {
  std::vector<double> omegas;   // rad/hour, omegas[0] == 0
  std::vector<double> weights;  // trapezoid weights, sum == omegas.back()

  static FrequencyGrid from_omegas(std::vector<double> om) {
    if (om.size() < 2) throw std::invalid_argument("FrequencyGrid: need at least 2 points");
    if (om.front() != 0.0) throw std::invalid_argument("FrequencyGrid: first omega must be 0");
    for (std::size_t i = 1; i < om.size(); ++i)
      if (!(om[i] > om[i - 1]) || !std::isfinite(om[i]))
        throw std::invalid_argument("FrequencyGrid: omegas must be strictly increasing and finite");
    FrequencyGrid g;
    g.omegas = std::move(om);
    const std::size_t n = g.omegas.size();
    g.weights.assign(n, 0.0);
    g.weights[0] = 0.5 * (g.omegas[1] - g.omegas[0]);
    g.weights[n - 1] = 0.5 * (g.omegas[n - 1] - g.omegas[n - 2]);
    for (std::size_t i = 1; i + 1 < n; ++i)
      g.weights[i] = 0.5 * (g.omegas[i + 1] - g.omegas[i - 1]);
    return g;
  }

  // Hybrid grid: linear spacing on [0, split] to resolve the energy-window
  // lobes, logarithmic on (split, omega_max] to reach the ramp time scale.
  static FrequencyGrid hybrid(std::size_t n_points, double omega_max, double split = 1.0) {
    if (n_points < 8) throw std::invalid_argument("FrequencyGrid: too few points");
    if (!(omega_max > 0.0)) throw std::invalid_argument("FrequencyGrid: omega_max must be > 0");
    std::vector<double> om;
    om.reserve(n_points);
    if (!(split > 0.0) || omega_max <= split) {
      for (std::size_t i = 0; i < n_points; ++i)
        om.push_back(omega_max * static_cast<double>(i) / static_cast<double>(n_points - 1));
    } else {
      const std::size_t n_lin = n_points / 2;
      const std::size_t n_log = n_points - n_lin;
      for (std::size_t i = 0; i < n_lin; ++i)
        om.push_back(split * static_cast<double>(i) / static_cast<double>(n_lin - 1));
      const double ratio = omega_max / split;
      for (std::size_t i = 1; i <= n_log; ++i)
        om.push_back(split * std::pow(ratio, static_cast<double>(i) / static_cast<double>(n_log)));
    }
    return from_omegas(std::move(om));
  }

  std::size_t size() const { return omegas.size(); }

  double quadrature(std::span<const double> values) const {
    if (values.size() != weights.size())
      throw std::invalid_argument("FrequencyGrid: quadrature length mismatch");
    double acc = 0.0;
    for (std::size_t i = 0; i < values.size(); ++i) acc += weights[i] * values[i];
    return acc;
  }

  bool same_as(const FrequencyGrid& other, double rel_tol = 1e-12) const {
    if (omegas.size() != other.omegas.size()) return false;
    for (std::size_t i = 0; i < omegas.size(); ++i) {
      const double scale = std::max({std::abs(omegas[i]), std::abs(other.omegas[i]), 1e-300});
      if (std::abs(omegas[i] - other.omegas[i]) > rel_tol * scale && omegas[i] != other.omegas[i])
        return false;
    }
    return true;
  }
};

// One-sided spectral density on [0, omega_max]. Values are two-sided density
// levels (kW^2 per rad/hour); the variance convention is
//   var = (1/pi) * integral_0^omega_max S(w) dw.
struct SpectralDensity {
  FrequencyGrid grid;
  std::vector<double> values;  // >= 0 elementwise

  void validate() const {
    if (values.size() != grid.size())
      throw std::invalid_argument("SpectralDensity: value/grid length mismatch");
    for (double v : values)
      if (!std::isfinite(v) || v < 0.0)
        throw std::invalid_argument("SpectralDensity: values must be finite and >= 0");
  }

  double integral() const { return grid.quadrature(values); }
  double variance() const { return integral() / kPi; }
};

}  // namespace ves
