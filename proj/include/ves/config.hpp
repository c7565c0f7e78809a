#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ves/constraints.hpp"
#include "ves/solver.hpp"
#include "ves/spectral.hpp"

namespace ves {

// Full pipeline configuration. Parsed strictly: unknown keys are rejected so
// typos fail fast instead of silently falling back to defaults.
struct RunConfig {
  std::uint64_t seed = 1;
  std::string out_dir = "out";

  // data source: CSV path, or the synthetic net-demand generator
  std::optional<std::string> csv_path;
  bool fill_linear = false;
  struct Synthetic {
    std::size_t n_samples = 131072;
    double dt_h = 1.0 / 12.0;  // 5 minutes
    std::vector<double> ar{-1.71957132102840, 0.81};  // poles 0.9 e^{+-j0.3}
    std::vector<double> ma{-0.5};
    double sigma2 = 1.0;
    double scale_kw = 1000.0;  // multiplies the generated path
  } synthetic;

  struct Welch {
    std::size_t segment_length = 0;  // 0 = auto (about 8 segments at 50% overlap)
    double overlap = 0.5;
  } welch;

  struct Arma {
    int p = 2;
    int q = 1;
    int starts = 8;
  } arma;

  Passband passband{4.0 * kPi, 120.0 * kPi, 4};  // high band: [1/30, 1] cycles/min

  struct Grid {
    std::size_t points = 2048;
    double omega_max = 360.0 * kPi;  // pi / (10 s)
    double split = 1.0;              // linear below, logarithmic above
  } grid;

  EnsembleSpec ensemble;

  SolveOptions solver;

  struct MonteCarlo {
    std::size_t paths = 100;
    std::size_t n_samples = 32768;
    double dt_h = 1.0 / 360.0;  // 10 s
  } montecarlo;

  std::vector<int> sweep_counts;

  FrequencyGrid make_grid() const {
    return FrequencyGrid::hybrid(grid.points, grid.omega_max, grid.split);
  }
};

// Defaults plus one large-building bin (used when no config file is given).
RunConfig default_config();

// Strict JSON load; values present in the file override the defaults.
RunConfig load_config(const std::string& path);

// Parse from an in-memory JSON string (exposed for tests).
RunConfig parse_config(const std::string& json_text);

}  // namespace ves
