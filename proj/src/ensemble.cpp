#include "ves/ensemble.hpp"

#include <stdexcept>

namespace ves {

SpectralDensity homogeneous_aggregate(const SpectralDensity& per_load, int n) {
  per_load.validate();
  if (n < 1) throw std::invalid_argument("homogeneous_aggregate: n must be >= 1");
  SpectralDensity out = per_load;
  const double f = static_cast<double>(n) * static_cast<double>(n);
  for (double& v : out.values) v *= f;
  return out;
}

AggregateBounds aggregate_bounds(const std::vector<SpectralDensity>& bin_sums, int n_bin) {
  if (bin_sums.empty()) throw std::invalid_argument("aggregate_bounds: need at least one bin");
  if (n_bin < 1) throw std::invalid_argument("aggregate_bounds: n_bin must be >= 1");
  for (const auto& s : bin_sums) {
    s.validate();
    if (!s.grid.same_as(bin_sums.front().grid))
      throw std::invalid_argument("aggregate_bounds: grid mismatch");
  }
  AggregateBounds out;
  out.n_bin = n_bin;
  out.lower = bin_sums.front();
  for (std::size_t i = 1; i < bin_sums.size(); ++i)
    for (std::size_t k = 0; k < out.lower.values.size(); ++k)
      out.lower.values[k] += bin_sums[i].values[k];
  out.upper = out.lower;
  for (double& v : out.upper.values) v *= static_cast<double>(n_bin);
  return out;
}

}  // namespace ves
