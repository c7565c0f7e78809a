#pragma once

#include <string>
#include <vector>

#include "ves/dynamics.hpp"
#include "ves/types.hpp"

namespace ves {

// One homogeneous bin of a heterogeneous fleet.
struct BinSpec {
  QosEnvelope qos;
  LoadDynamics dyn;
  int count = 1;  // n_l
  std::string label;

  void validate() const {
    qos.validate();
    dyn.validate();
    if (count < 1) throw std::invalid_argument("BinSpec: count must be >= 1");
  }
};

struct EnsembleSpec {
  std::vector<BinSpec> bins;

  int n_bin() const { return static_cast<int>(bins.size()); }
  void validate() const {
    if (bins.empty()) throw std::invalid_argument("EnsembleSpec: need at least 1 bin");
    for (const auto& b : bins) b.validate();
  }
};

enum class QosTag { power, ramp, energy, storage };

const char* qos_tag_name(QosTag tag);

// One budget inequality: sum_k quad_k * weights_k * S_k <= budget,
// where quad_k are the grid's trapezoid weights.
struct ConstraintRow {
  std::vector<double> weights;  // frequency weights, >= 0
  double budget = 0.0;
  QosTag tag = QosTag::power;
  int bin_index = 0;
};

struct ConstraintSystem {
  FrequencyGrid grid;
  std::vector<ConstraintRow> rows;  // 4 rows per bin, bin-major order

  // sum_k quad_k * weights_k * values_k for one row.
  double row_value(const ConstraintRow& row, std::span<const double> values) const;
};

// Discretized ensemble constraint set. Budgets scale with n_bin * n_l; pass
// n_bin_override to build the lower-bound (n_bin = 1) variant of the same
// ensemble. Throws if the grid is too coarse to resolve cos(omega * delta).
ConstraintSystem build_constraints(const EnsembleSpec& ens, const FrequencyGrid& grid,
                                   int n_bin_override = -1);

struct RowMargin {
  QosTag tag = QosTag::power;
  int bin_index = 0;
  double value = 0.0;   // achieved quadrature
  double budget = 0.0;
  double margin = 0.0;  // budget - value
};

struct FeasibilityReport {
  std::vector<RowMargin> rows;
  bool nonnegative = true;
  bool feasible = true;
  double tol_rel = 1e-6;
};

FeasibilityReport feasibility_report(const std::vector<SpectralDensity>& psd_per_bin,
                                     const ConstraintSystem& cs);

}  // namespace ves
