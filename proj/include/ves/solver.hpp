#pragma once

#include <vector>

#include "ves/constraints.hpp"
#include "ves/types.hpp"

namespace ves {

struct SolveOptions {
  double tol = 1e-6;       // relative KKT residual target
  int max_iter = 50000;
  double reg = 1e-8;       // strictly convex tie-break regularizer
  int log_every = 0;       // emit a diagnostic record every N iterations (0 = off)
};

struct KktResiduals {
  double stationarity = 0.0;
  double primal = 0.0;
  double dual = 0.0;

  double max() const { return std::max(stationarity, std::max(primal, dual)); }
};

struct ProjectionResult {
  std::vector<SpectralDensity> per_bin;  // Sigma_l, one per bin
  SpectralDensity aggregate;             // pointwise sum of per_bin
  double objective = 0.0;                // quadrature of (aggregate - target)^2
  KktResiduals kkt;
  int iterations = 0;
  bool converged = false;
  std::vector<double> duals;  // budget-row multipliers, same order as the constraint rows
  FeasibilityReport feasibility;
};

// Projects the target spectrum onto the Cartesian product of the per-bin
// constraint sets: minimizes the trapezoid quadrature of
// (sum_l Sigma_l - target)^2 plus reg * sum_l ||Sigma_l||^2 subject to
// build_constraints rows and nonnegativity. Deterministic; pass `warm` to
// reuse a previous solution as the starting iterate.
ProjectionResult project(const SpectralDensity& target, const EnsembleSpec& ens,
                         const SolveOptions& opts = {}, int n_bin_override = -1,
                         const ProjectionResult* warm = nullptr);

struct BoundPair {
  ProjectionResult lower;  // budgets with n_bin = 1
  ProjectionResult upper;  // budgets with n_bin = number of bins
};

// Two-solve heterogeneous bound procedure: the attainable ensemble spectrum
// lies between the two solutions in the budget sense.
BoundPair solve_bounds(const SpectralDensity& target, const EnsembleSpec& ens,
                       const SolveOptions& opts = {});

}  // namespace ves
