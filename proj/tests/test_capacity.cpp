#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "ves/capacity.hpp"
#include "ves/rng.hpp"

using namespace ves;

namespace {

FrequencyGrid grid() { return FrequencyGrid::hybrid(1024, 360.0 * kPi, 1.0); }

SpectralDensity flat(const FrequencyGrid& g, double level) {
  SpectralDensity s;
  s.grid = g;
  s.values.assign(g.size(), level);
  return s;
}

QosEnvelope small_qos() {
  QosEnvelope qos;
  qos.c1 = 4.0;
  qos.c2 = 0.8;
  qos.c3 = 0.5;
  qos.c4 = 1.11;
  qos.delta = 10.0 / 3600.0;
  qos.horizon_T = 24.0;
  qos.eps = {0.05, 0.05, 0.05, 0.05};
  return qos;
}

}  // namespace

TEST_CASE("flat spectrum closed forms") {
  const FrequencyGrid g = grid();
  const double wmax = g.omegas.back();
  const double level = 0.37;
  const SpectralDensity s = flat(g, level);

  // Pow = sqrt(level * wmax / (pi eps)); the quadrature is exact on constants.
  CHECK(power_capacity(s, 0.05) ==
        doctest::Approx(std::sqrt(level * wmax / (kPi * 0.05))).epsilon(1e-12));

  // zero spectrum has zero capacity
  const SpectralDensity z = flat(g, 0.0);
  CHECK(power_capacity(z, 0.05) == 0.0);
  CHECK(energy_capacity(z, 0.05, 24.0) == 0.0);
}

TEST_CASE("power saturation: Pow equals c1 = 4 on the saturating flat spectrum") {
  const QosEnvelope qos = small_qos();
  const FrequencyGrid g = grid();
  const double level = kPi * qos.eps[0] * qos.c1 * qos.c1 / g.omegas.back();
  const SpectralDensity s = flat(g, level);
  CHECK(power_capacity(s, qos.eps[0]) == doctest::Approx(qos.c1).epsilon(1e-9));
}

TEST_CASE("energy saturation: Eng equals c3 = 0.5 on a scaled spectrum") {
  const QosEnvelope qos = small_qos();
  const FrequencyGrid g = grid();
  // independent quadrature of |G|^2 for a flat spectrum of unit level
  double acc = 0.0;
  for (std::size_t k = 0; k < g.size(); ++k)
    acc += g.weights[k] * energy_window_gain_sq(qos.horizon_T, g.omegas[k]);
  const double level = kPi * qos.eps[2] * qos.c3 * qos.c3 / acc;
  const SpectralDensity s = flat(g, level);
  CHECK(energy_capacity(s, qos.eps[2], qos.horizon_T) == doctest::Approx(qos.c3).epsilon(1e-9));
}

TEST_CASE("capacity indices: trivial ratios and eps invariance") {
  const FrequencyGrid g = grid();
  Philox rng(42, 0);
  SpectralDensity target;
  target.grid = g;
  target.values.resize(g.size());
  for (double& v : target.values) v = rng.uniform() + 0.01;

  // aggregate == target -> 100 / 100
  auto [zp1, ze1] = capacity_indices(target, target, 0.05, 0.05, 24.0);
  CHECK(std::abs(zp1 - 100.0) <= 1e-10);
  CHECK(std::abs(ze1 - 100.0) <= 1e-10);

  // aggregate = 4 x target -> sqrt(4) = 2x the index
  SpectralDensity agg = target;
  for (double& v : agg.values) v *= 4.0;
  auto [zp2, ze2] = capacity_indices(agg, target, 0.05, 0.05, 24.0);
  CHECK(std::abs(zp2 - 200.0) <= 1e-9);
  CHECK(std::abs(ze2 - 200.0) <= 1e-9);

  // eps cancels in the ratio
  SpectralDensity half = target;
  for (double& v : half.values) v *= 0.31;
  auto [zpa, zea] = capacity_indices(half, target, 0.05, 0.05, 24.0);
  auto [zpb, zeb] = capacity_indices(half, target, 0.4, 0.9, 24.0);
  CHECK(std::abs(zpa - zpb) <= 1e-12 * zpa);
  CHECK(std::abs(zea - zeb) <= 1e-12 * zea);
}

TEST_CASE("capacity indices reject a zero target") {
  const FrequencyGrid g = grid();
  const SpectralDensity z = flat(g, 0.0);
  const SpectralDensity s = flat(g, 1.0);
  CHECK_THROWS_AS(capacity_indices(s, z, 0.05, 0.05, 24.0), std::domain_error);
}

TEST_CASE("capacity indices reject mismatched grids") {
  const SpectralDensity a = flat(grid(), 1.0);
  const SpectralDensity b = flat(FrequencyGrid::hybrid(512, 360.0 * kPi, 1.0), 1.0);
  CHECK_THROWS_AS(capacity_indices(a, b, 0.05, 0.05, 24.0), std::invalid_argument);
}

TEST_CASE("unused capacity: zero spectrum leaves the full budget") {
  const QosEnvelope qos = small_qos();
  const SpectralDensity z = flat(grid(), 0.0);
  auto [up, ue] = unused_capacity(z, qos);
  CHECK(up == doctest::Approx(qos.c1));
  CHECK(ue == doctest::Approx(qos.c3));
}

namespace {

// Flat above 4 pi rad/h, zero below: saturates the power budget while the
// energy-window weight |G|^2 <= 4/w^2 stays far from the energy budget.
SpectralDensity band_limited_power_saturating(const FrequencyGrid& g, const QosEnvelope& qos,
                                              double fraction) {
  double mass = 0.0;
  for (std::size_t k = 0; k < g.size(); ++k)
    if (g.omegas[k] >= 4.0 * kPi) mass += g.weights[k];
  const double level = fraction * kPi * qos.eps[0] * qos.c1 * qos.c1 / mass;
  SpectralDensity s;
  s.grid = g;
  s.values.resize(g.size());
  for (std::size_t k = 0; k < g.size(); ++k)
    s.values[k] = g.omegas[k] >= 4.0 * kPi ? level : 0.0;
  return s;
}

}  // namespace

TEST_CASE("unused capacity: saturating power spectrum leaves ~0 power headroom") {
  const QosEnvelope qos = small_qos();
  const FrequencyGrid g = grid();
  const SpectralDensity s = band_limited_power_saturating(g, qos, 1.0);
  auto [up, ue] = unused_capacity(s, qos);
  CHECK(std::abs(up) <= 1e-9 * qos.c1);
  CHECK(ue > 0.0);  // a flat spectrum saturating power does not saturate energy

  // anything materially beyond the budget is rejected
  SpectralDensity over = s;
  for (double& v : over.values) v *= 1.001;
  CHECK_THROWS_AS(unused_capacity(over, qos), std::domain_error);
}

TEST_CASE("monotonicity: adding mass raises capacity and shrinks headroom") {
  const QosEnvelope qos = small_qos();
  const FrequencyGrid g = grid();
  const SpectralDensity a = band_limited_power_saturating(g, qos, 0.25);
  SpectralDensity b = a;
  const std::size_t hi = g.size() - 50;  // high-frequency bump
  b.values[hi] += a.values[hi];

  CHECK(power_capacity(b, qos.eps[0]) > power_capacity(a, qos.eps[0]));
  CHECK(energy_capacity(b, qos.eps[2], qos.horizon_T) >=
        energy_capacity(a, qos.eps[2], qos.horizon_T));
  auto [upa, uea] = unused_capacity(a, qos);
  auto [upb, ueb] = unused_capacity(b, qos);
  CHECK(upb < upa);
  CHECK(ueb <= uea);
}

TEST_CASE("input validation") {
  const SpectralDensity s = flat(grid(), 1.0);
  CHECK_THROWS_AS(power_capacity(s, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(power_capacity(s, 1.5), std::invalid_argument);
  CHECK_THROWS_AS(energy_capacity(s, 0.05, 0.0), std::invalid_argument);
}
