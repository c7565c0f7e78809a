#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "ves/constraints.hpp"
#include "ves/dynamics.hpp"
#include "ves/types.hpp"

namespace ves {

struct PathBatch {
  std::vector<TimeSeries> paths;
  SpectralDensity source_psd;
  std::uint64_t seed = 0;
};

// Gaussian sample paths with the prescribed spectrum: white noise colored in
// the frequency domain (FFT bins scaled by sqrt(S), Hermitian symmetry).
// Bit-reproducible from (seed, path index); n_samples must be a power of two.
// Throws if the psd carries mass above pi/dt (aliasing).
PathBatch synthesize_paths(const SpectralDensity& psd, std::size_t n_samples, double dt,
                           std::size_t count, std::uint64_t seed);

// The four QoS signals of one path. Increments and window sums shorten the
// series; theta_tilde drops a transient of 5 time constants before statistics.
struct QosPaths {
  TimeSeries power;        // P~
  TimeSeries increment;    // P~_delta, length N - delta/dt
  TimeSeries energy;       // E~ (kWh), length N - T/dt + 1
  TimeSeries storage;      // theta~, transient removed
};

QosPaths qos_functionals(const TimeSeries& path, const QosEnvelope& qos, const LoadDynamics& dyn);

struct QosViolation {
  double threshold = 0.0;
  double eps = 0.0;
  double p_hat = 0.0;
  std::size_t trials = 0;     // number of paths
  std::size_t n_samples = 0;  // samples counted toward p_hat
};

struct ViolationReport {
  std::array<QosViolation, 4> per_qos;
  bool pass = false;
};

// Empirical check of the Chebyshev-based guarantees: synthesizes `trials`
// paths, pushes each through the QoS functionals and compares the violation
// frequency of |.| >= c_i against eps_i plus 3 binomial standard errors.
// Rejects spectra that are infeasible for the single-load constraint set.
ViolationReport verify_chebyshev(const SpectralDensity& psd, const QosEnvelope& qos,
                                 const LoadDynamics& dyn, std::size_t trials,
                                 std::size_t n_samples, double dt, std::uint64_t seed);

}  // namespace ves
