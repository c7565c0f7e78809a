#include "ves/capacity.hpp"

#include <cmath>
#include <stdexcept>

namespace ves {

double power_capacity(const SpectralDensity& s, double eps) {
  if (!(eps > 0.0 && eps <= 1.0)) throw std::invalid_argument("power_capacity: eps in (0,1]");
  return std::sqrt(s.integral() / (kPi * eps));
}

double energy_capacity(const SpectralDensity& s, double eps, double horizon_T) {
  if (!(eps > 0.0 && eps <= 1.0)) throw std::invalid_argument("energy_capacity: eps in (0,1]");
  if (!(horizon_T > 0.0)) throw std::invalid_argument("energy_capacity: horizon_T must be > 0");
  double acc = 0.0;
  for (std::size_t k = 0; k < s.values.size(); ++k)
    acc += s.grid.weights[k] * energy_window_gain_sq(horizon_T, s.grid.omegas[k]) * s.values[k];
  return std::sqrt(acc / (kPi * eps));
}

std::pair<double, double> capacity_indices(const SpectralDensity& aggregate,
                                           const SpectralDensity& target, double eps_pow,
                                           double eps_eng, double horizon_T) {
  if (!aggregate.grid.same_as(target.grid))
    throw std::invalid_argument("capacity_indices: grid mismatch");
  const double pow_t = power_capacity(target, eps_pow);
  const double eng_t = energy_capacity(target, eps_eng, horizon_T);
  if (pow_t <= 0.0 || eng_t <= 0.0)
    throw std::domain_error("capacity_indices: target has zero capacity, index undefined");
  const double zp = power_capacity(aggregate, eps_pow) / pow_t * 100.0;
  const double ze = energy_capacity(aggregate, eps_eng, horizon_T) / eng_t * 100.0;
  return {zp, ze};
}

std::pair<double, double> unused_capacity(const SpectralDensity& s, const QosEnvelope& qos) {
  qos.validate();
  const double up = qos.c1 - power_capacity(s, qos.eps[0]);
  const double ue = qos.c3 - energy_capacity(s, qos.eps[2], qos.horizon_T);
  const double tol = 1e-9;
  if (up < -tol * qos.c1 || ue < -tol * qos.c3)
    throw std::domain_error("unused_capacity: spectrum exceeds the single-load budget");
  return {up, ue};
}

}  // namespace ves
