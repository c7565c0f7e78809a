#pragma once

#include <vector>

#include "ves/types.hpp"

namespace ves {

// Identical signals add coherently: n loads with the same sample path have
// an ensemble spectrum n^2 times the per-load spectrum.
SpectralDensity homogeneous_aggregate(const SpectralDensity& per_load, int n);

struct AggregateBounds {
  SpectralDensity lower;  // sum_l n_l * Sigma_l
  SpectralDensity upper;  // n_bin * lower
  int n_bin = 1;
};

// bin_sums must already carry the n_l scaling of each bin.
AggregateBounds aggregate_bounds(const std::vector<SpectralDensity>& bin_sums, int n_bin);

}  // namespace ves
