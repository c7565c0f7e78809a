#include "ves/constraints.hpp"

#include <cmath>

namespace ves {

const char* qos_tag_name(QosTag tag) {
  switch (tag) {
    case QosTag::power: return "power";
    case QosTag::ramp: return "ramp";
    case QosTag::energy: return "energy";
    case QosTag::storage: return "storage";
  }
  return "?";
}

double ConstraintSystem::row_value(const ConstraintRow& row, std::span<const double> values) const {
  if (values.size() != grid.size() || row.weights.size() != grid.size())
    throw std::invalid_argument("ConstraintSystem: length mismatch");
  double acc = 0.0;
  for (std::size_t k = 0; k < values.size(); ++k)
    acc += grid.weights[k] * row.weights[k] * values[k];
  return acc;
}

ConstraintSystem build_constraints(const EnsembleSpec& ens, const FrequencyGrid& grid,
                                   int n_bin_override) {
  ens.validate();
  const double n_bin =
      n_bin_override > 0 ? static_cast<double>(n_bin_override) : static_cast<double>(ens.n_bin());

  // The ramp weight must be sampled with at least 8 points per period of
  // cos(omega * delta), otherwise the quadrature aliases.
  double max_gap = 0.0;
  for (std::size_t k = 1; k < grid.size(); ++k)
    max_gap = std::max(max_gap, grid.omegas[k] - grid.omegas[k - 1]);
  for (const auto& bin : ens.bins) {
    const double period = 2.0 * kPi / bin.qos.delta;
    if (max_gap > period / 8.0)
      throw std::invalid_argument(
          "build_constraints: grid too coarse for delta (aliasing risk)");
  }

  ConstraintSystem cs;
  cs.grid = grid;
  const std::size_t m = grid.size();
  for (std::size_t b = 0; b < ens.bins.size(); ++b) {
    const BinSpec& bin = ens.bins[b];
    const double scale = n_bin * static_cast<double>(bin.count);
    const auto& q = bin.qos;

    ConstraintRow power{std::vector<double>(m, 1.0), scale * kPi * q.eps[0] * q.c1 * q.c1,
                        QosTag::power, static_cast<int>(b)};

    ConstraintRow ramp{std::vector<double>(m), scale * kPi * q.eps[1] * q.c2 * q.c2 / 2.0,
                       QosTag::ramp, static_cast<int>(b)};
    for (std::size_t k = 0; k < m; ++k)
      ramp.weights[k] = 0.5 * ramp_weight(q.delta, grid.omegas[k]);  // 1 - cos(w delta)

    ConstraintRow energy{std::vector<double>(m), scale * kPi * q.eps[2] * q.c3 * q.c3,
                         QosTag::energy, static_cast<int>(b)};
    for (std::size_t k = 0; k < m; ++k)
      energy.weights[k] = energy_window_gain_sq(q.horizon_T, grid.omegas[k]);

    ConstraintRow storage{std::vector<double>(m), scale * kPi * q.eps[3] * q.c4 * q.c4,
                          QosTag::storage, static_cast<int>(b)};
    for (std::size_t k = 0; k < m; ++k)
      storage.weights[k] = storage_gain_sq(bin.dyn, grid.omegas[k]);

    cs.rows.push_back(std::move(power));
    cs.rows.push_back(std::move(ramp));
    cs.rows.push_back(std::move(energy));
    cs.rows.push_back(std::move(storage));
  }
  return cs;
}

FeasibilityReport feasibility_report(const std::vector<SpectralDensity>& psd_per_bin,
                                     const ConstraintSystem& cs) {
  const std::size_t n_bins = cs.rows.size() / 4;
  if (psd_per_bin.size() != n_bins)
    throw std::invalid_argument("feasibility_report: bin count mismatch");
  for (const auto& s : psd_per_bin)
    if (!s.grid.same_as(cs.grid)) throw std::invalid_argument("feasibility_report: grid mismatch");

  FeasibilityReport rep;
  for (const auto& s : psd_per_bin)
    for (double v : s.values)
      if (v < 0.0) rep.nonnegative = false;

  rep.feasible = rep.nonnegative;
  for (const auto& row : cs.rows) {
    const auto& s = psd_per_bin[static_cast<std::size_t>(row.bin_index)];
    RowMargin m;
    m.tag = row.tag;
    m.bin_index = row.bin_index;
    m.value = cs.row_value(row, s.values);
    m.budget = row.budget;
    m.margin = m.budget - m.value;
    if (m.margin < -rep.tol_rel * m.budget) rep.feasible = false;
    rep.rows.push_back(m);
  }
  return rep;
}

}  // namespace ves
