#pragma once

#include <utility>

#include "ves/dynamics.hpp"
#include "ves/types.hpp"

namespace ves {

struct CapacityReport {
  double pow_kw = 0.0;
  double eng_kwh = 0.0;
  double zeta_p = 0.0;  // percent
  double zeta_e = 0.0;  // percent
  double unused_pow_kw = 0.0;
  double unused_eng_kwh = 0.0;
  double eps_pow = 0.0;
  double eps_eng = 0.0;
};

// Pow(S) = sqrt((1/(pi*eps)) * integral S dw).
double power_capacity(const SpectralDensity& s, double eps);

// Eng(S) = sqrt((1/(pi*eps)) * integral |G(jw)|^2 S dw) with the moving
// energy window of length horizon_T.
double energy_capacity(const SpectralDensity& s, double eps, double horizon_T);

// (zeta_p, zeta_e) in percent. The shared eps cancels in each ratio.
// Throws std::domain_error if the target has zero capacity (index undefined).
std::pair<double, double> capacity_indices(const SpectralDensity& aggregate,
                                           const SpectralDensity& target, double eps_pow,
                                           double eps_eng, double horizon_T);

// (c1 - Pow(S), c3 - Eng(S)) with eps = (eps1, eps3). Throws
// std::domain_error if S exceeds a budget beyond tolerance (infeasible S).
std::pair<double, double> unused_capacity(const SpectralDensity& s, const QosEnvelope& qos);

}  // namespace ves
