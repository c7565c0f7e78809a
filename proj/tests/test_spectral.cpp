#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "ves/rng.hpp"
#include "ves/spectral.hpp"

using namespace ves;

namespace {

double sample_variance(const std::vector<double>& x) {
  double mean = 0.0;
  for (double v : x) mean += v;
  mean /= static_cast<double>(x.size());
  double var = 0.0;
  for (double v : x) var += (v - mean) * (v - mean);
  return var / static_cast<double>(x.size());
}

ArmaSpectrum known_arma21() {
  // poles 0.9 e^{+-j0.3}, zero 0.5, sigma2 = 1
  ArmaSpectrum m;
  m.ar = {-2.0 * 0.9 * std::cos(0.3), 0.81};
  m.ma = {-0.5};
  m.sigma2 = 1.0;
  m.dt = 1.0 / 12.0;
  return m;
}

}  // namespace

TEST_CASE("estimate_psd white noise satisfies Parseval") {
  TimeSeries ts;
  ts.dt = 1.0 / 6.0;
  Philox rng(42, 7);
  ts.samples.resize(1 << 15);
  for (double& v : ts.samples) v = rng.gaussian();
  const SpectralDensity psd = estimate_psd(ts, 1024);
  CHECK(psd.variance() == doctest::Approx(sample_variance(ts.samples)).epsilon(0.10));
  CHECK(psd.variance() == doctest::Approx(1.0).epsilon(0.10));
  CHECK(psd.grid.omegas.back() == doctest::Approx(kPi / ts.dt));
}

TEST_CASE("estimate_psd of the zero series is zero") {
  TimeSeries ts;
  ts.dt = 0.5;
  ts.samples.assign(4096, 0.0);
  const SpectralDensity psd = estimate_psd(ts, 256);
  for (double v : psd.values) CHECK(v == 0.0);
}

TEST_CASE("estimate_psd concentrates a sinusoid near omega0") {
  TimeSeries ts;
  ts.dt = 0.1;
  const std::size_t n = 1 << 14;
  const double w0 = 8.0;  // rad/h
  ts.samples.resize(n);
  for (std::size_t k = 0; k < n; ++k)
    ts.samples[k] = std::sin(w0 * ts.dt * static_cast<double>(k));
  const SpectralDensity psd = estimate_psd(ts, 2048);
  CHECK(psd.variance() == doctest::Approx(0.5).epsilon(0.05));
  // at least 95% of the mass within +-10% of omega0
  double total = 0.0, near = 0.0;
  for (std::size_t k = 0; k < psd.values.size(); ++k) {
    const double m = psd.grid.weights[k] * psd.values[k];
    total += m;
    if (std::abs(psd.grid.omegas[k] - w0) < 0.1 * w0) near += m;
  }
  CHECK(near / total > 0.95);
}

TEST_CASE("estimate_psd input validation") {
  TimeSeries ts;
  ts.dt = 1.0;
  ts.samples.assign(16, 0.0);
  CHECK_THROWS_AS(estimate_psd(ts, 64), std::invalid_argument);  // too short
  ts.samples[3] = std::nan("");
  CHECK_THROWS_AS(estimate_psd(ts, 8), std::invalid_argument);
}

TEST_CASE("evaluate_arma_psd white-noise model is flat") {
  ArmaSpectrum m;
  m.ar = {0.0};
  m.sigma2 = 1.0;
  m.dt = 1.0;
  FrequencyGrid grid = FrequencyGrid::hybrid(64, kPi, 0.0);
  const SpectralDensity s = evaluate_arma_psd(m, grid);
  for (double v : s.values) CHECK(v == doctest::Approx(1.0));
}

TEST_CASE("evaluate_arma_psd at omega 0 and the clamp rule") {
  const ArmaSpectrum m = known_arma21();
  const double ar_sum = 1.0 + m.ar[0] + m.ar[1];
  const double ma_sum = 1.0 + m.ma[0];
  const double expect0 = m.sigma2 * m.dt * ma_sum * ma_sum / (ar_sum * ar_sum);
  CHECK(m.value_at(0.0) == doctest::Approx(expect0));

  const double nyq = kPi / m.dt;
  FrequencyGrid grid = FrequencyGrid::hybrid(256, 4.0 * nyq, 0.0);
  const SpectralDensity s = evaluate_arma_psd(m, grid);
  const double clamp = m.value_at(nyq);
  for (std::size_t k = 0; k < s.values.size(); ++k)
    if (s.grid.omegas[k] > nyq) CHECK(s.values[k] == doctest::Approx(clamp));
}

TEST_CASE("ArmaSpectrum stability check") {
  ArmaSpectrum m = known_arma21();
  CHECK(m.stable());
  m.ar = {-1.9, 0.95};  // poles still inside? 0.95 < 1, refl ok
  CHECK(m.stable());
  m.ar = {0.0, 1.0};  // on the unit circle
  CHECK(!m.stable());
  m.ar = {-2.1, 1.2};
  CHECK(!m.stable());
}

TEST_CASE("fit_arma_spectrum flat psd gives white noise") {
  FrequencyGrid grid = FrequencyGrid::hybrid(128, kPi / 0.25, 0.0);
  SpectralDensity psd;
  psd.grid = grid;
  psd.values.assign(grid.size(), 3.0);
  const ArmaFit fit = fit_arma_spectrum(psd, 1, 0, 4, 11);
  CHECK(std::abs(fit.model.ar[0]) < 1e-3);
  // model convention: flat level = sigma2 * dt
  CHECK(fit.model.sigma2 == doctest::Approx(3.0 / fit.model.dt).epsilon(1e-3));
  CHECK(fit.model.dt == doctest::Approx(0.25));
  CHECK(fit.log_rmse < 1e-4);
}

TEST_CASE("fit masks zero psd values") {
  FrequencyGrid grid = FrequencyGrid::hybrid(64, kPi, 0.0);
  SpectralDensity psd;
  psd.grid = grid;
  psd.values.assign(grid.size(), 2.0);
  psd.values[20] = 0.0;
  const ArmaFit fit = fit_arma_spectrum(psd, 1, 0, 2, 1);
  CHECK(fit.log_rmse < 1e-4);
}

TEST_CASE("round trip: evaluate then fit recovers the log spectrum") {
  const ArmaSpectrum truth = known_arma21();
  FrequencyGrid grid = FrequencyGrid::hybrid(512, kPi / truth.dt, 0.0);
  const SpectralDensity psd = evaluate_arma_psd(truth, grid);
  const ArmaFit fit = fit_arma_spectrum(psd, 2, 1, 8, 5);
  CHECK(fit.log_rmse <= 0.05);
}

TEST_CASE("simulate -> estimate -> fit recovers a known ARMA(2,1)") {
  const ArmaSpectrum truth = known_arma21();
  const TimeSeries ts = simulate_arma(truth, 1 << 17, 9);
  const SpectralDensity psd = estimate_psd(ts, 1 << 13);
  const ArmaFit fit = fit_arma_spectrum(psd, 2, 1, 8, 9);
  // RMSE of log fitted model against the true log spectrum over the band
  double mse = 0.0;
  for (std::size_t k = 0; k < psd.grid.size(); ++k) {
    const double r = std::log(fit.model.value_at(psd.grid.omegas[k])) -
                     std::log(truth.value_at(psd.grid.omegas[k]));
    mse += r * r;
  }
  CHECK(std::sqrt(mse / static_cast<double>(psd.grid.size())) <= 0.1);

  // determinism under a fixed seed
  const ArmaFit again = fit_arma_spectrum(psd, 2, 1, 8, 9);
  CHECK(again.model.ar == fit.model.ar);
  CHECK(again.model.ma == fit.model.ma);
  CHECK(again.model.sigma2 == fit.model.sigma2);
}

TEST_CASE("fit precondition violations") {
  FrequencyGrid grid = FrequencyGrid::hybrid(16, kPi, 0.0);
  SpectralDensity psd;
  psd.grid = grid;
  psd.values.assign(grid.size(), 0.0);
  psd.values[0] = 1.0;
  psd.values[1] = 1.0;
  CHECK_THROWS_AS(fit_arma_spectrum(psd, 2, 1, 1, 0), std::invalid_argument);
}

TEST_CASE("simulate_arma is deterministic and matches the model variance") {
  const ArmaSpectrum truth = known_arma21();
  const TimeSeries a = simulate_arma(truth, 1 << 15, 5);
  const TimeSeries b = simulate_arma(truth, 1 << 15, 5);
  CHECK(a.samples == b.samples);
  const TimeSeries c = simulate_arma(truth, 1 << 15, 6);
  CHECK(a.samples != c.samples);

  FrequencyGrid grid = FrequencyGrid::hybrid(4096, kPi / truth.dt, 0.0);
  const SpectralDensity s = evaluate_arma_psd(truth, grid);
  CHECK(sample_variance(a.samples) == doctest::Approx(s.variance()).epsilon(0.10));
}

TEST_CASE("bandpass_gain_sq closed form") {
  Passband band{0.125, 0.5, 4};
  const double mid = std::sqrt(band.lo * band.hi);
  CHECK(bandpass_gain_sq(band, mid) >= 0.9);
  CHECK(bandpass_gain_sq(band, band.lo / 4.0) <= 0.07);
  CHECK(bandpass_gain_sq(band, 0.0) == 0.0);
  for (double w = 1e-3; w < 1e3; w *= 2.0) CHECK(bandpass_gain_sq(band, w) <= 1.0);

  // high order approaches the ideal band-pass inside the band
  Passband sharp{0.125, 0.5, 64};
  CHECK(bandpass_gain_sq(sharp, mid) == doctest::Approx(1.0).epsilon(1e-6));

  // lo == 0 degenerates to a low-pass with unit DC gain
  Passband lp{0.0, 1.0, 4};
  CHECK(bandpass_gain_sq(lp, 0.0) == doctest::Approx(1.0));
}

TEST_CASE("bandpass_target is monotone and maps zero to zero") {
  FrequencyGrid grid = FrequencyGrid::hybrid(128, 10.0, 1.0);
  Passband band{0.125, 0.5, 4};
  SpectralDensity zero;
  zero.grid = grid;
  zero.values.assign(grid.size(), 0.0);
  for (double v : bandpass_target(zero, band).values) CHECK(v == 0.0);

  SpectralDensity a, b;
  a.grid = b.grid = grid;
  a.values.assign(grid.size(), 1.0);
  b.values.assign(grid.size(), 2.0);
  const SpectralDensity fa = bandpass_target(a, band);
  const SpectralDensity fb = bandpass_target(b, band);
  for (std::size_t k = 0; k < grid.size(); ++k) {
    CHECK(fa.values[k] >= 0.0);
    CHECK(fb.values[k] >= fa.values[k]);
  }
}
