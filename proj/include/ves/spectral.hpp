#pragma once

#include <cstdint>
#include <vector>

#include "ves/types.hpp"

namespace ves {

// Welch averaged-periodogram estimate of the one-sided spectral density.
// The series mean is removed first; segments use a periodic Hann window.
// Output grid: omega_k = 2 pi k / (segment_length * dt), k = 0..L/2, so the
// discrete Parseval identity (1/pi) * integral S dw ~ sample variance holds.
SpectralDensity estimate_psd(const TimeSeries& series, std::size_t segment_length,
                             double overlap_fraction = 0.5);

// Rational (ARMA) spectral model. Convention:
//   S(w) = sigma2 * dt * |1 + sum ma_j z^-j|^2 / |1 + sum ar_j z^-j|^2,
//   z = exp(j w dt),
// evaluated for w <= pi/dt and clamped at the Nyquist value beyond.
struct ArmaSpectrum {
  std::vector<double> ar;  // length p, leading 1 implicit
  std::vector<double> ma;  // length q, leading 1 implicit
  double sigma2 = 1.0;     // innovation variance, kW^2
  double dt = 1.0;         // underlying sampling interval, hours

  // True iff all AR roots lie strictly outside the closed unit disk.
  bool stable() const;
  void validate() const;

  // Spectrum value at a single frequency (clamped beyond pi/dt).
  double value_at(double omega) const;
};

SpectralDensity evaluate_arma_psd(const ArmaSpectrum& model, const FrequencyGrid& grid);

struct ArmaFit {
  ArmaSpectrum model;
  double log_rmse = 0.0;  // achieved RMSE of log model vs log psd over the mask
  int starts = 0;
};

// Nonlinear least squares of the log spectrum against log psd over grid
// points with psd > 0 (zeros are masked out). Stability is enforced by
// optimizing reflection coefficients through a tanh map; multi-start
// Nelder-Mead guards against local minima.
ArmaFit fit_arma_spectrum(const SpectralDensity& psd, int p, int q, int starts = 8,
                          std::uint64_t seed = 0);

// Simulate an ARMA sample path (Gaussian innovations, Philox stream),
// discarding a burn-in prefix. Used by the synthetic-data mode and tests.
TimeSeries simulate_arma(const ArmaSpectrum& model, std::size_t n_samples, std::uint64_t seed,
                         std::uint64_t stream = 0, std::size_t burn_in = 1024);

// Magnitude-only Butterworth-style band-pass |F|^2; lo == 0 degenerates to a
// pure low-pass. |F|^2 <= 1 everywhere.
struct Passband {
  double lo = 0.0;  // rad/hour
  double hi = 0.0;  // rad/hour
  int order = 4;

  void validate() const {
    if (!(lo >= 0.0 && hi > lo)) throw std::invalid_argument("Passband: need 0 <= lo < hi");
    if (order < 1) throw std::invalid_argument("Passband: order must be >= 1");
  }
};

double bandpass_gain_sq(const Passband& band, double omega);

// S_out(w) = |F(jw)|^2 * S_in(w).
SpectralDensity bandpass_target(const SpectralDensity& snd, const Passband& band);

}  // namespace ves
