#include "ves/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <limits>
#include <numeric>

#include "fft.hpp"
#include "ves/rng.hpp"

namespace ves {

namespace {

std::vector<double> hann_window(std::size_t n) {
  // Periodic Hann, the usual choice for averaged periodograms.
  std::vector<double> w(n);
  for (std::size_t i = 0; i < n; ++i)
    w[i] = 0.5 * (1.0 - std::cos(2.0 * kPi * static_cast<double>(i) / static_cast<double>(n)));
  return w;
}

}  // namespace

SpectralDensity estimate_psd(const TimeSeries& series, std::size_t segment_length,
                             double overlap_fraction) {
  series.validate();
  const std::size_t n = series.samples.size();
  if (segment_length < 2) throw std::invalid_argument("estimate_psd: segment_length must be >= 2");
  if (segment_length > n)
    throw std::invalid_argument("estimate_psd: series too short for one segment");
  if (!(overlap_fraction >= 0.0 && overlap_fraction < 1.0))
    throw std::invalid_argument("estimate_psd: overlap_fraction must be in [0,1)");

  const double mean =
      std::accumulate(series.samples.begin(), series.samples.end(), 0.0) / static_cast<double>(n);

  const std::size_t L = segment_length;
  const std::size_t hop =
      std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(
                                   static_cast<double>(L) * (1.0 - overlap_fraction))));
  const std::vector<double> window = hann_window(L);
  double sum_w2 = 0.0;
  for (double w : window) sum_w2 += w * w;

  std::vector<double> acc(L / 2 + 1, 0.0);
  std::vector<double> seg(L);
  std::size_t n_seg = 0;
  for (std::size_t start = 0; start + L <= n; start += hop) {
    for (std::size_t i = 0; i < L; ++i) seg[i] = (series.samples[start + i] - mean) * window[i];
    const auto spec = detail::rfft(seg);
    for (std::size_t k = 0; k < acc.size(); ++k) acc[k] += std::norm(spec[k]);
    ++n_seg;
  }

  SpectralDensity out;
  std::vector<double> omegas(L / 2 + 1);
  const double dw = 2.0 * kPi / (static_cast<double>(L) * series.dt);
  for (std::size_t k = 0; k < omegas.size(); ++k) omegas[k] = dw * static_cast<double>(k);
  out.grid = FrequencyGrid::from_omegas(std::move(omegas));
  out.values.resize(acc.size());
  const double scale = series.dt / (static_cast<double>(n_seg) * sum_w2);
  for (std::size_t k = 0; k < acc.size(); ++k) out.values[k] = scale * acc[k];
  out.validate();
  return out;
}

bool ArmaSpectrum::stable() const {
  // Schur-Cohn via the inverse Levinson recursion: stable iff every
  // reflection coefficient has magnitude < 1.
  std::vector<double> a(ar);
  for (std::size_t m = a.size(); m >= 1; --m) {
    const double k = a[m - 1];
    if (!(std::abs(k) < 1.0)) return false;
    std::vector<double> prev(m - 1);
    const double denom = 1.0 - k * k;
    for (std::size_t j = 0; j + 1 < m; ++j) prev[j] = (a[j] - k * a[m - 2 - j]) / denom;
    a = std::move(prev);
  }
  return true;
}

void ArmaSpectrum::validate() const {
  if (!(sigma2 > 0.0)) throw std::invalid_argument("ArmaSpectrum: sigma2 must be > 0");
  if (!(dt > 0.0)) throw std::invalid_argument("ArmaSpectrum: dt must be > 0");
  if (!stable()) throw std::invalid_argument("ArmaSpectrum: AR polynomial is not stable");
}

double ArmaSpectrum::value_at(double omega) const {
  const double nyquist = kPi / dt;
  const double wc = std::min(std::abs(omega), nyquist);  // clamp rule for extrapolation
  const std::complex<double> z = std::exp(std::complex<double>(0.0, -wc * dt));
  std::complex<double> num(1.0, 0.0), den(1.0, 0.0), zp(1.0, 0.0);
  const std::size_t deg = std::max(ar.size(), ma.size());
  for (std::size_t j = 0; j < deg; ++j) {
    zp *= z;
    if (j < ma.size()) num += ma[j] * zp;
    if (j < ar.size()) den += ar[j] * zp;
  }
  return sigma2 * dt * std::norm(num) / std::norm(den);
}

SpectralDensity evaluate_arma_psd(const ArmaSpectrum& model, const FrequencyGrid& grid) {
  model.validate();
  SpectralDensity out;
  out.grid = grid;
  out.values.resize(grid.size());
  for (std::size_t k = 0; k < grid.size(); ++k) out.values[k] = model.value_at(grid.omegas[k]);
  out.validate();
  return out;
}

namespace {

// Reflection coefficients -> AR coefficients (Levinson recursion).
std::vector<double> reflection_to_ar(const std::vector<double>& refl) {
  std::vector<double> a;
  for (double k : refl) {
    std::vector<double> next(a.size() + 1);
    for (std::size_t j = 0; j < a.size(); ++j) next[j] = a[j] + k * a[a.size() - 1 - j];
    next[a.size()] = k;
    a = std::move(next);
  }
  return a;
}

// Plain Nelder-Mead; good enough for the low-dimensional log-spectrum fits
// this module performs.
double nelder_mead(const std::function<double(const std::vector<double>&)>& f,
                   std::vector<double>& x, int max_iter) {
  const std::size_t dim = x.size();
  if (dim == 0) return f(x);
  std::vector<std::vector<double>> simplex(dim + 1, x);
  std::vector<double> fx(dim + 1);
  for (std::size_t i = 0; i < dim; ++i) simplex[i + 1][i] += 0.25;
  for (std::size_t i = 0; i <= dim; ++i) fx[i] = f(simplex[i]);

  for (int it = 0; it < max_iter; ++it) {
    std::vector<std::size_t> order(dim + 1);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return fx[a] < fx[b]; });
    if (fx[order[dim]] - fx[order[0]] < 1e-13 * (1.0 + std::abs(fx[order[0]]))) break;

    const std::size_t worst = order[dim];
    std::vector<double> centroid(dim, 0.0);
    for (std::size_t i = 0; i <= dim; ++i) {
      if (i == worst) continue;
      for (std::size_t j = 0; j < dim; ++j) centroid[j] += simplex[i][j];
    }
    for (double& c : centroid) c /= static_cast<double>(dim);

    auto blend = [&](double t) {
      std::vector<double> p(dim);
      for (std::size_t j = 0; j < dim; ++j) p[j] = centroid[j] + t * (simplex[worst][j] - centroid[j]);
      return p;
    };

    auto refl = blend(-1.0);
    const double f_refl = f(refl);
    if (f_refl < fx[order[0]]) {
      auto expa = blend(-2.0);
      const double f_expa = f(expa);
      if (f_expa < f_refl) {
        simplex[worst] = expa;
        fx[worst] = f_expa;
      } else {
        simplex[worst] = refl;
        fx[worst] = f_refl;
      }
    } else if (f_refl < fx[order[dim - 1]]) {
      simplex[worst] = refl;
      fx[worst] = f_refl;
    } else {
      auto contr = blend(f_refl < fx[worst] ? -0.5 : 0.5);
      const double f_contr = f(contr);
      if (f_contr < std::min(f_refl, fx[worst])) {
        simplex[worst] = contr;
        fx[worst] = f_contr;
      } else {
        // shrink toward the best vertex
        for (std::size_t i = 0; i <= dim; ++i) {
          if (i == order[0]) continue;
          for (std::size_t j = 0; j < dim; ++j)
            simplex[i][j] = 0.5 * (simplex[i][j] + simplex[order[0]][j]);
          fx[i] = f(simplex[i]);
        }
      }
    }
    x = simplex[order[0]];
  }
  std::size_t best = 0;
  for (std::size_t i = 1; i <= dim; ++i)
    if (fx[i] < fx[best]) best = i;
  x = simplex[best];
  return fx[best];
}

}  // namespace

ArmaFit fit_arma_spectrum(const SpectralDensity& psd, int p, int q, int starts,
                          std::uint64_t seed) {
  psd.validate();
  if (p < 1) throw std::invalid_argument("fit_arma_spectrum: p must be >= 1");
  if (q < 0) throw std::invalid_argument("fit_arma_spectrum: q must be >= 0");
  if (starts < 1) throw std::invalid_argument("fit_arma_spectrum: starts must be >= 1");

  std::vector<std::size_t> mask;
  for (std::size_t k = 0; k < psd.values.size(); ++k)
    if (psd.values[k] > 0.0) mask.push_back(k);
  if (mask.size() < static_cast<std::size_t>(p + q + 1))
    throw std::invalid_argument("fit_arma_spectrum: need at least p+q+1 strictly positive values");

  const double dt = kPi / psd.grid.omegas.back();
  std::vector<double> log_psd(mask.size());
  for (std::size_t i = 0; i < mask.size(); ++i) log_psd[i] = std::log(psd.values[mask[i]]);

  // params: p reflection coefficients through tanh, then q raw MA coefficients.
  auto unpack = [&](const std::vector<double>& theta, std::vector<double>& ar,
                    std::vector<double>& ma) {
    std::vector<double> refl(p);
    for (int i = 0; i < p; ++i) refl[i] = std::tanh(theta[i]);
    ar = reflection_to_ar(refl);
    ma.assign(theta.begin() + p, theta.end());
  };

  double best_offset = 0.0;
  auto objective = [&](const std::vector<double>& theta) -> double {
    ArmaSpectrum m;
    unpack(theta, m.ar, m.ma);
    m.sigma2 = 1.0;
    m.dt = dt;
    double sum = 0.0;
    std::vector<double> shape(mask.size());
    for (std::size_t i = 0; i < mask.size(); ++i) {
      const double v = m.value_at(psd.grid.omegas[mask[i]]);
      if (!(v > 0.0) || !std::isfinite(v)) return std::numeric_limits<double>::infinity();
      shape[i] = std::log(v);
      sum += log_psd[i] - shape[i];
    }
    const double offset = sum / static_cast<double>(mask.size());
    double mse = 0.0;
    for (std::size_t i = 0; i < mask.size(); ++i) {
      const double r = log_psd[i] - shape[i] - offset;
      mse += r * r;
    }
    best_offset = offset;
    return mse / static_cast<double>(mask.size());
  };

  Philox rng(seed, 0xA1);
  const int dim = p + q;
  double best_mse = std::numeric_limits<double>::infinity();
  std::vector<double> best_theta;
  double best_theta_offset = 0.0;
  for (int s = 0; s < starts; ++s) {
    std::vector<double> theta(dim, 0.0);
    if (s > 0)
      for (double& t : theta) t = 3.0 * (rng.uniform() - 0.5);
    const double mse = nelder_mead(objective, theta, 400 * std::max(dim, 1));
    if (mse < best_mse) {
      best_mse = mse;
      best_theta = theta;
      objective(theta);  // refresh best_offset for this theta
      best_theta_offset = best_offset;
    }
  }
  if (!std::isfinite(best_mse))
    throw std::runtime_error("fit_arma_spectrum: fit infeasible at this order");

  ArmaFit fit;
  unpack(best_theta, fit.model.ar, fit.model.ma);
  fit.model.sigma2 = std::exp(best_theta_offset);
  fit.model.dt = dt;
  fit.model.validate();
  fit.log_rmse = std::sqrt(best_mse);
  fit.starts = starts;
  return fit;
}

TimeSeries simulate_arma(const ArmaSpectrum& model, std::size_t n_samples, std::uint64_t seed,
                         std::uint64_t stream, std::size_t burn_in) {
  model.validate();
  if (n_samples < 2) throw std::invalid_argument("simulate_arma: need at least 2 samples");
  Philox rng(seed, stream);
  const std::size_t p = model.ar.size();
  const std::size_t q = model.ma.size();
  const double sd = std::sqrt(model.sigma2);
  std::vector<double> x(n_samples + burn_in, 0.0);
  std::vector<double> e(n_samples + burn_in, 0.0);
  for (std::size_t t = 0; t < x.size(); ++t) {
    e[t] = sd * rng.gaussian();
    double v = e[t];
    for (std::size_t j = 1; j <= q && j <= t; ++j) v += model.ma[j - 1] * e[t - j];
    for (std::size_t j = 1; j <= p && j <= t; ++j) v -= model.ar[j - 1] * x[t - j];
    x[t] = v;
  }
  TimeSeries out;
  out.samples.assign(x.begin() + static_cast<std::ptrdiff_t>(burn_in), x.end());
  out.dt = model.dt;
  out.label = "arma";
  out.validate();
  return out;
}

double bandpass_gain_sq(const Passband& band, double omega) {
  band.validate();
  if (omega < 0.0) throw std::invalid_argument("bandpass_gain_sq: omega must be >= 0");
  const double n = 2.0 * band.order;
  double hp;
  if (band.lo == 0.0) {
    hp = 1.0;
  } else if (omega == 0.0) {
    hp = 0.0;
  } else {
    hp = 1.0 / (1.0 + std::exp(-n * std::log(omega / band.lo)));  // (w/lo)^n / (1+(w/lo)^n)
  }
  const double lp =
      omega == 0.0 ? 1.0 : 1.0 / (1.0 + std::exp(n * std::log(omega / band.hi)));
  return hp * lp;
}

SpectralDensity bandpass_target(const SpectralDensity& snd, const Passband& band) {
  snd.validate();
  band.validate();
  SpectralDensity out;
  out.grid = snd.grid;
  out.values.resize(snd.values.size());
  for (std::size_t k = 0; k < snd.values.size(); ++k)
    out.values[k] = bandpass_gain_sq(band, snd.grid.omegas[k]) * snd.values[k];
  out.validate();
  return out;
}

}  // namespace ves
