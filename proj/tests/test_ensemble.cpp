#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <vector>

#include "ves/ensemble.hpp"
#include "ves/rng.hpp"
#include "ves/spectral.hpp"

using namespace ves;

namespace {

SpectralDensity flat_spectrum(double level, std::size_t n = 64) {
  SpectralDensity s;
  s.grid = FrequencyGrid::hybrid(n, 8.0 * kPi, 0.0);
  s.values.assign(s.grid.size(), level);
  return s;
}

TimeSeries white_series(std::uint64_t seed, std::uint64_t stream, std::size_t n, double dt) {
  Philox rng(seed, stream);
  TimeSeries ts;
  ts.dt = dt;
  ts.samples.resize(n);
  for (double& v : ts.samples) v = rng.gaussian();
  return ts;
}

}  // namespace

TEST_CASE("homogeneous aggregate: n = 1 is the identity, n = 3 scales by 9") {
  const SpectralDensity s = flat_spectrum(0.7);
  const SpectralDensity one = homogeneous_aggregate(s, 1);
  for (std::size_t k = 0; k < s.values.size(); ++k) CHECK(one.values[k] == s.values[k]);

  const SpectralDensity three = homogeneous_aggregate(s, 3);
  for (double v : three.values) CHECK(v == doctest::Approx(9.0 * 0.7));

  CHECK_THROWS_AS(homogeneous_aggregate(s, 0), std::invalid_argument);
}

TEST_CASE("coherent addition: doubling a sample path quadruples its periodogram") {
  // two identical loads sum to 2x the path; the Welch estimate is exactly
  // quadratic in the path, matching homogeneous_aggregate with n = 2
  const TimeSeries x = white_series(7, 0, 4096, 0.1);
  TimeSeries x2 = x;
  for (double& v : x2.samples) v *= 2.0;

  const SpectralDensity sx = estimate_psd(x, 256);
  const SpectralDensity sx2 = estimate_psd(x2, 256);
  const SpectralDensity pred = homogeneous_aggregate(sx, 2);
  for (std::size_t k = 0; k < sx.values.size(); ++k)
    CHECK(sx2.values[k] == doctest::Approx(pred.values[k]).epsilon(1e-12));
}

TEST_CASE("aggregate bounds: sums, factor n_bin and validation") {
  const SpectralDensity a = flat_spectrum(1.0);
  SpectralDensity b = a;
  for (double& v : b.values) v = 2.5;

  const AggregateBounds ab = aggregate_bounds({a, b}, 2);
  for (double v : ab.lower.values) CHECK(v == doctest::Approx(3.5));
  for (double v : ab.upper.values) CHECK(v == doctest::Approx(7.0));
  CHECK(ab.n_bin == 2);

  // single bin: upper == lower
  const AggregateBounds single = aggregate_bounds({a}, 1);
  for (std::size_t k = 0; k < a.values.size(); ++k)
    CHECK(single.upper.values[k] == single.lower.values[k]);

  SpectralDensity other;
  other.grid = FrequencyGrid::hybrid(32, 8.0 * kPi, 0.0);
  other.values.assign(other.grid.size(), 1.0);
  CHECK_THROWS_AS(aggregate_bounds({a, other}, 2), std::invalid_argument);
  CHECK_THROWS_AS(aggregate_bounds({}, 1), std::invalid_argument);
  CHECK_THROWS_AS(aggregate_bounds({a}, 0), std::invalid_argument);
}

TEST_CASE("sandwich: correlated ensemble spectrum sits between the bounds") {
  // n loads sharing a common innovation with weight rho: the ensemble
  // spectrum is n(1 + (n-1) rho) S, strictly between n S and n^2 S.
  const std::size_t N = 1 << 15;
  const double dt = 0.1;
  const int n = 4;
  const double rho = 0.5;
  const std::size_t seg = 512;

  const TimeSeries common = white_series(11, 100, N, dt);
  TimeSeries sum;
  sum.dt = dt;
  sum.samples.assign(N, 0.0);
  std::vector<TimeSeries> loads;
  for (int l = 0; l < n; ++l) {
    TimeSeries x = white_series(11, static_cast<std::uint64_t>(l), N, dt);
    for (std::size_t i = 0; i < N; ++i)
      x.samples[i] = std::sqrt(rho) * common.samples[i] + std::sqrt(1.0 - rho) * x.samples[i];
    for (std::size_t i = 0; i < N; ++i) sum.samples[i] += x.samples[i];
    loads.push_back(std::move(x));
  }

  // per-load reference spectrum: average of the individual estimates
  SpectralDensity per = estimate_psd(loads[0], seg);
  for (int l = 1; l < n; ++l) {
    const SpectralDensity s = estimate_psd(loads[l], seg);
    for (std::size_t k = 0; k < per.values.size(); ++k) per.values[k] += s.values[k];
  }
  for (double& v : per.values) v /= n;

  const SpectralDensity agg = estimate_psd(sum, seg);
  const double expect_factor = n * (1.0 + (n - 1) * rho);  // 10 for n=4, rho=0.5

  std::size_t inside = 0, total = 0;
  double ratio_sum = 0.0;
  for (std::size_t k = 1; k + 1 < agg.values.size(); ++k) {  // skip DC/Nyquist edges
    ++total;
    const double lo = n * per.values[k];
    const double hi = n * lo;
    if (agg.values[k] >= 0.8 * lo && agg.values[k] <= 1.25 * hi) ++inside;
    ratio_sum += agg.values[k] / per.values[k];
  }
  CHECK(inside >= static_cast<std::size_t>(0.95 * total));
  CHECK(ratio_sum / total == doctest::Approx(expect_factor).epsilon(0.10));
}

TEST_CASE("uncorrelated ensemble tracks the lower bound, identical the upper") {
  const std::size_t N = 1 << 15;
  const double dt = 0.1;
  const int n = 6;
  const std::size_t seg = 256;

  // independent loads: aggregate spectrum ~ n * per-load level (flat = dt)
  TimeSeries sum;
  sum.dt = dt;
  sum.samples.assign(N, 0.0);
  for (int l = 0; l < n; ++l) {
    const TimeSeries x = white_series(23, static_cast<std::uint64_t>(l), N, dt);
    for (std::size_t i = 0; i < N; ++i) sum.samples[i] += x.samples[i];
  }
  const SpectralDensity indep = estimate_psd(sum, seg);
  double mean_indep = 0.0;
  for (double v : indep.values) mean_indep += v;
  mean_indep /= indep.values.size();
  CHECK(mean_indep == doctest::Approx(n * dt).epsilon(0.10));

  // identical loads: aggregate spectrum ~ n^2 * per-load level
  const TimeSeries x = white_series(23, 999, N, dt);
  TimeSeries rep = x;
  for (double& v : rep.samples) v *= n;
  const SpectralDensity ident = estimate_psd(rep, seg);
  double mean_ident = 0.0;
  for (double v : ident.values) mean_ident += v;
  mean_ident /= ident.values.size();
  CHECK(mean_ident == doctest::Approx(n * n * dt).epsilon(0.10));
}
