#include "ves/montecarlo.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <stdexcept>

#include "fft.hpp"
#include "ves/rng.hpp"

namespace ves {

namespace {

bool is_power_of_two(std::size_t n) { return n >= 2 && (n & (n - 1)) == 0; }

// Linear interpolation of the psd onto an arbitrary frequency; zero beyond
// the grid support.
double interp_psd(const SpectralDensity& psd, double omega) {
  const auto& om = psd.grid.omegas;
  if (omega <= om.front()) return psd.values.front();
  if (omega >= om.back())
    return omega <= om.back() * (1.0 + 1e-12) ? psd.values.back() : 0.0;
  const auto it = std::upper_bound(om.begin(), om.end(), omega);
  const std::size_t hi = static_cast<std::size_t>(it - om.begin());
  const std::size_t lo = hi - 1;
  const double f = (omega - om[lo]) / (om[hi] - om[lo]);
  return (1.0 - f) * psd.values[lo] + f * psd.values[hi];
}

std::size_t lag_samples(double interval, double dt, const char* what) {
  const double ratio = interval / dt;
  const double rounded = std::round(ratio);
  if (rounded < 1.0 || std::abs(ratio - rounded) > 1e-3 * rounded)
    throw std::invalid_argument(std::string("qos_functionals: dt incompatible with ") + what);
  return static_cast<std::size_t>(rounded);
}

}  // namespace

PathBatch synthesize_paths(const SpectralDensity& psd, std::size_t n_samples, double dt,
                           std::size_t count, std::uint64_t seed) {
  psd.validate();
  if (!(dt > 0.0)) throw std::invalid_argument("synthesize_paths: dt must be > 0");
  if (!is_power_of_two(n_samples))
    throw std::invalid_argument("synthesize_paths: n_samples must be a power of two");
  if (count < 1) throw std::invalid_argument("synthesize_paths: count must be >= 1");

  const double nyquist = kPi / dt;
  for (std::size_t k = 0; k < psd.values.size(); ++k)
    if (psd.grid.omegas[k] > nyquist * (1.0 + 1e-9) && psd.values[k] > 0.0)
      throw std::invalid_argument("synthesize_paths: psd has mass above pi/dt (aliasing)");

  const std::size_t nbins = n_samples / 2 + 1;
  std::vector<double> amp(nbins);
  const double dw = 2.0 * kPi / (static_cast<double>(n_samples) * dt);
  for (std::size_t j = 0; j < nbins; ++j)
    amp[j] = std::sqrt(interp_psd(psd, dw * static_cast<double>(j)) *
                       static_cast<double>(n_samples) / dt);

  PathBatch batch;
  batch.source_psd = psd;
  batch.seed = seed;
  batch.paths.reserve(count);
  std::vector<std::complex<double>> half(nbins);
  for (std::size_t i = 0; i < count; ++i) {
    Philox rng(seed, i);
    half[0] = 0.0;  // zero-mean paths by construction
    for (std::size_t j = 1; j + 1 < nbins; ++j) {
      const double re = rng.gaussian() * 0.70710678118654752;
      const double im = rng.gaussian() * 0.70710678118654752;
      half[j] = amp[j] * std::complex<double>(re, im);
    }
    half[nbins - 1] = amp[nbins - 1] * rng.gaussian();  // Nyquist bin is real

    TimeSeries ts;
    ts.samples = detail::irfft(half, n_samples);
    ts.dt = dt;
    ts.label = "path" + std::to_string(i);
    batch.paths.push_back(std::move(ts));
  }
  return batch;
}

QosPaths qos_functionals(const TimeSeries& path, const QosEnvelope& qos, const LoadDynamics& dyn) {
  path.validate();
  qos.validate();
  dyn.validate();
  const std::size_t n = path.samples.size();
  const std::size_t lag = lag_samples(qos.delta, path.dt, "delta");
  const std::size_t win = lag_samples(qos.horizon_T, path.dt, "horizon_T");
  if (lag >= n || win > n)
    throw std::invalid_argument("qos_functionals: path too short for delta/horizon_T");

  QosPaths out;
  out.power = path;

  out.increment.dt = path.dt;
  out.increment.label = path.label + ":delta";
  out.increment.samples.resize(n - lag);
  for (std::size_t k = lag; k < n; ++k)
    out.increment.samples[k - lag] = path.samples[k] - path.samples[k - lag];

  out.energy.dt = path.dt;
  out.energy.label = path.label + ":energy";
  out.energy.samples.resize(n - win + 1);
  double acc = 0.0;
  for (std::size_t k = 0; k < win; ++k) acc += path.samples[k];
  out.energy.samples[0] = path.dt * acc;
  for (std::size_t k = win; k < n; ++k) {
    acc += path.samples[k] - path.samples[k - win];
    out.energy.samples[k - win + 1] = path.dt * acc;
  }

  // exact zero-order-hold discretization of theta' = -pole theta + gain P
  const double phi = std::exp(-dyn.pole * path.dt);
  const double gain_step = dyn.gain / dyn.pole * (1.0 - phi);
  std::vector<double> theta(n, 0.0);
  double th = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    th = phi * th + gain_step * path.samples[k];
    theta[k] = th;
  }
  std::size_t discard = static_cast<std::size_t>(std::ceil(5.0 / (dyn.pole * path.dt)));
  if (discard >= n) discard = n - 1;
  out.storage.dt = path.dt;
  out.storage.label = path.label + ":storage";
  out.storage.samples.assign(theta.begin() + static_cast<std::ptrdiff_t>(discard), theta.end());
  return out;
}

ViolationReport verify_chebyshev(const SpectralDensity& psd, const QosEnvelope& qos,
                                 const LoadDynamics& dyn, std::size_t trials,
                                 std::size_t n_samples, double dt, std::uint64_t seed) {
  // Reject spectra outside the single-load constraint set up front.
  EnsembleSpec single;
  single.bins.push_back(BinSpec{qos, dyn, 1, "single"});
  const ConstraintSystem cs = build_constraints(single, psd.grid, 1);
  const FeasibilityReport rep = feasibility_report({psd}, cs);
  if (!rep.feasible)
    throw std::invalid_argument("verify_chebyshev: psd infeasible for the single-load set");

  const PathBatch batch = synthesize_paths(psd, n_samples, dt, trials, seed);

  const std::array<double, 4> thresholds{qos.c1, qos.c2, qos.c3, qos.c4};
  std::array<std::size_t, 4> violations{};
  std::array<std::size_t, 4> totals{};
  for (const auto& path : batch.paths) {
    const QosPaths qp = qos_functionals(path, qos, dyn);
    const std::array<const TimeSeries*, 4> sigs{&qp.power, &qp.increment, &qp.energy,
                                                &qp.storage};
    for (int i = 0; i < 4; ++i) {
      for (double v : sigs[i]->samples)
        if (std::abs(v) >= thresholds[static_cast<std::size_t>(i)])
          ++violations[static_cast<std::size_t>(i)];
      totals[static_cast<std::size_t>(i)] += sigs[i]->samples.size();
    }
  }

  ViolationReport out;
  out.pass = true;
  for (int i = 0; i < 4; ++i) {
    const std::size_t idx = static_cast<std::size_t>(i);
    QosViolation& v = out.per_qos[idx];
    v.threshold = thresholds[idx];
    v.eps = qos.eps[idx];
    v.trials = trials;
    v.n_samples = totals[idx];
    v.p_hat = static_cast<double>(violations[idx]) / static_cast<double>(totals[idx]);
    const double se = std::sqrt(v.eps * (1.0 - v.eps) / static_cast<double>(totals[idx]));
    if (v.p_hat > v.eps + 3.0 * se) out.pass = false;
  }
  return out;
}

}  // namespace ves
