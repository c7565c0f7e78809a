#pragma once

#include <complex>
#include <vector>

namespace ves::detail {

// Thin wrappers over FFTW double-precision transforms. Plans are created per
// call with FFTW_ESTIMATE; input sizes here are small enough that planning
// cost is negligible.

// Forward real-to-complex DFT, returns n/2+1 bins (unnormalized).
std::vector<std::complex<double>> rfft(const std::vector<double>& x);

// Inverse complex-to-real DFT of a half spectrum (n/2+1 bins) to n real
// samples, normalized by 1/n.
std::vector<double> irfft(const std::vector<std::complex<double>>& half, std::size_t n);

}  // namespace ves::detail
