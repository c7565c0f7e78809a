#pragma once

#include <string>

#include "ves/types.hpp"

namespace ves {

// Reads the two-column demand CSV: `timestamp_iso8601,net_demand_kw` with a
// mandatory header. Sampling must be uniform; gaps that are an integer
// multiple of the base step are linearly interpolated when fill_linear is
// set, otherwise they raise an error.
TimeSeries read_demand_csv(const std::string& path, bool fill_linear = false);

// Writes one curve as `omega_rad_per_h,value` rows.
void write_curve_csv(const std::string& path, const FrequencyGrid& grid,
                     const std::vector<double>& values);

}  // namespace ves
