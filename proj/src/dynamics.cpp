#include "ves/dynamics.hpp"

#include <cmath>

namespace ves {

LoadDynamics derive_dynamics(const ThermalParams& tp) {
  tp.validate();
  LoadDynamics dyn;
  dyn.kind = LoadKind::thermal;
  dyn.pole = 1.0 / (tp.R * tp.C);
  dyn.gain = tp.eta_cop / tp.C;
  dyn.validate();
  return dyn;
}

double baseline_power(const ThermalParams& tp, double theta0, double q_int) {
  tp.validate();
  return -(theta0 - tp.theta_bar) / (tp.eta_cop * tp.R) - q_int / tp.eta_cop;
}

double storage_gain_sq(const LoadDynamics& dyn, double omega) {
  if (omega < 0.0) throw std::invalid_argument("storage_gain_sq: omega must be >= 0");
  return dyn.gain * dyn.gain / (omega * omega + dyn.pole * dyn.pole);
}

double energy_window_gain_sq(double horizon_T, double omega) {
  if (omega < 0.0) throw std::invalid_argument("energy_window_gain_sq: omega must be >= 0");
  const double tol = 1e-6 / horizon_T;
  if (omega <= tol) {
    // 2(1-cos(T w))/w^2 = T^2 (1 - (T w)^2/12 + ...)
    const double x = horizon_T * omega;
    return horizon_T * horizon_T * (1.0 - x * x / 12.0);
  }
  // 2(1 - cos(T w)) written as 4 sin^2(T w / 2) to avoid cancellation
  const double s = std::sin(0.5 * horizon_T * omega);
  return 4.0 * s * s / (omega * omega);
}

double ramp_weight(double delta, double omega) {
  if (omega < 0.0) throw std::invalid_argument("ramp_weight: omega must be >= 0");
  return 2.0 - 2.0 * std::cos(omega * delta);
}

}  // namespace ves
