#pragma once

#include <string>

#include <json.hpp>

#include "ves/capacity.hpp"
#include "ves/config.hpp"
#include "ves/montecarlo.hpp"
#include "ves/solver.hpp"

namespace ves {

inline constexpr const char* kVersion = "0.1.0";

// Intermediate products of the estimate stage, reused by later stages.
struct EstimateStage {
  TimeSeries series;
  SpectralDensity phi_nd;  // Welch estimate
  ArmaFit fit;
  SpectralDensity snd;     // fitted model evaluated on the analysis grid
};

EstimateStage run_estimate(const RunConfig& cfg);

struct ProjectStage {
  EstimateStage est;
  SpectralDensity sba;            // band-pass filtered target
  ProjectionResult main;          // n_bin-scaled solve
  std::optional<BoundPair> bounds;  // present when the ensemble has > 1 bin
  CapacityReport capacity;
};

ProjectStage run_project(const RunConfig& cfg);

// Subcommand entry points. Each writes its artifacts under cfg.out_dir and
// returns the machine-readable document. Exit code 2 flags a non-converged
// solve (results are still written).
nlohmann::json cmd_estimate(const RunConfig& cfg);
nlohmann::json cmd_project(const RunConfig& cfg, int* exit_code);
nlohmann::json cmd_verify(const RunConfig& cfg, int* exit_code);
nlohmann::json cmd_sweep(const RunConfig& cfg, int* exit_code);
nlohmann::json cmd_all(const RunConfig& cfg, int* exit_code);

// Config echo in the same schema load_config accepts (documents round-trip).
nlohmann::json config_to_json(const RunConfig& cfg);

nlohmann::json spectrum_to_json(const SpectralDensity& s);

}  // namespace ves
