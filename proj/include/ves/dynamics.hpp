#pragma once

#include <array>
#include <stdexcept>

namespace ves {

// QoS parameter tuple of one load class:
//   c1 [kW]   bound on the power deviation,
//   c2 [kW]   bound on the increment over the ramp interval delta,
//   c3 [kWh]  bound on the moving-window energy over horizon T,
//   c4        bound on the storage variable (degC thermal, kWh battery),
// with per-constraint violation tolerances eps1..eps4.
struct QosEnvelope {
  double c1 = 0.0;         // kW
  double c2 = 0.0;         // kW
  double c3 = 0.0;         // kWh
  double c4 = 0.0;         // degC or kWh
  double delta = 0.0;      // hours
  double horizon_T = 0.0;  // hours
  std::array<double, 4> eps{};

  void validate() const {
    if (!(c1 > 0.0 && c2 > 0.0 && c3 > 0.0 && c4 > 0.0))
      throw std::invalid_argument("QosEnvelope: c1..c4 must be > 0");
    if (!(delta > 0.0)) throw std::invalid_argument("QosEnvelope: delta must be > 0");
    if (!(horizon_T > 0.0)) throw std::invalid_argument("QosEnvelope: horizon_T must be > 0");
    for (double e : eps)
      if (!(e > 0.0 && e <= 1.0))
        throw std::invalid_argument("QosEnvelope: eps_i must be in (0, 1]");
  }
};

enum class LoadKind { thermal, battery };

// First-order storage transfer H(s) = gain / (s + pole).
struct LoadDynamics {
  LoadKind kind = LoadKind::thermal;
  double pole = 0.0;  // 1/hour
  double gain = 0.0;  // output units per kWh

  void validate() const {
    if (!(pole > 0.0)) throw std::invalid_argument("LoadDynamics: pole must be > 0");
    if (!(gain > 0.0)) throw std::invalid_argument("LoadDynamics: gain must be > 0");
  }
};

// Lumped RC parameters of a thermal load.
struct ThermalParams {
  double R = 0.0;          // degC per kW
  double C = 0.0;          // kWh per degC
  double eta_cop = 0.0;    // dimensionless
  double theta_bar = 0.0;  // degC setpoint

  void validate() const {
    if (!(R > 0.0 && C > 0.0 && eta_cop > 0.0))
      throw std::invalid_argument("ThermalParams: R, C, eta_cop must be > 0");
  }
};

// pole = 1/(R*C), gain = eta_cop/C from linearizing the RC model about the setpoint.
LoadDynamics derive_dynamics(const ThermalParams& tp);

// Power that holds the indoor temperature at the setpoint given ambient
// temperature theta0 and internal heat gain q_int.
double baseline_power(const ThermalParams& tp, double theta0, double q_int);

// |H(j omega)|^2 = gain^2 / (omega^2 + pole^2).
double storage_gain_sq(const LoadDynamics& dyn, double omega);

// |G(j omega)|^2 = 2(1 - cos(T omega)) / omega^2 for the moving energy
// window, with the T^2 series limit near omega = 0.
double energy_window_gain_sq(double horizon_T, double omega);

// 2 - 2 cos(omega delta), the spectral weight of the delta-increment variance.
double ramp_weight(double delta, double omega);

}  // namespace ves
