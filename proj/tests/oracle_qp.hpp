#pragma once

// Brute-force oracle for the single-bin projection QP on tiny grids:
//   min sum_k q_k (x_k - t_k)^2 + reg * sum_k q_k x_k^2
//   s.t. sum_k q_k w_jk x_k <= b_j,  x >= 0.
// Enumerates every (active-row, zero-coordinate) pair, solves the equality
// KKT system densely and keeps the best feasible candidate. Completely
// independent of the ADMM/polish path in src/solver.cpp.

#include <cmath>
#include <cstddef>
#include <limits>
#include <vector>

#include "ves/constraints.hpp"

namespace oracle {

inline bool gauss_solve(std::vector<double> a, std::vector<double> b, std::size_t n,
                        std::vector<double>& out) {
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t best = col;
    for (std::size_t row = col + 1; row < n; ++row)
      if (std::fabs(a[row * n + col]) > std::fabs(a[best * n + col])) best = row;
    if (std::fabs(a[best * n + col]) < 1e-12) return false;
    for (std::size_t j = 0; j < n; ++j) std::swap(a[col * n + j], a[best * n + j]);
    std::swap(b[col], b[best]);
    for (std::size_t row = 0; row < n; ++row) {
      if (row == col) continue;
      const double f = a[row * n + col] / a[col * n + col];
      for (std::size_t j = 0; j < n; ++j) a[row * n + j] -= f * a[col * n + j];
      b[row] -= f * b[col];
    }
  }
  out.resize(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = b[i] / a[i * n + i];
  return true;
}

// Returns the optimal x for the problem above; q and t per grid point,
// rows/budgets from a single-bin ConstraintSystem.
inline std::vector<double> solve(const ves::ConstraintSystem& cs, const std::vector<double>& t,
                                 double reg) {
  const std::size_t m = cs.grid.size();
  const std::size_t J = cs.rows.size();
  const std::vector<double>& q = cs.grid.weights;

  const double tol = 1e-9;
  double best_obj = std::numeric_limits<double>::infinity();
  std::vector<double> best;

  for (std::size_t act = 0; act < (1u << J); ++act) {
    for (std::size_t zset = 0; zset < (1u << m); ++zset) {
      std::vector<std::size_t> free_idx, act_idx;
      for (std::size_t k = 0; k < m; ++k)
        if (!(zset & (1u << k))) free_idx.push_back(k);
      for (std::size_t j = 0; j < J; ++j)
        if (act & (1u << j)) act_idx.push_back(j);

      const std::size_t nf = free_idx.size();
      const std::size_t na = act_idx.size();
      if (na > nf) continue;  // linearly dependent for sure

      const std::size_t n = nf + na;
      std::vector<double> A(n * n, 0.0), rhs(n, 0.0);
      for (std::size_t i = 0; i < nf; ++i) {
        const std::size_t k = free_idx[i];
        A[i * n + i] = 2.0 * q[k] * (1.0 + reg);
        rhs[i] = 2.0 * q[k] * t[k];
        for (std::size_t a = 0; a < na; ++a)
          A[i * n + (nf + a)] = q[k] * cs.rows[act_idx[a]].weights[k];
      }
      for (std::size_t a = 0; a < na; ++a) {
        const auto& row = cs.rows[act_idx[a]];
        for (std::size_t i = 0; i < nf; ++i) {
          const std::size_t k = free_idx[i];
          A[(nf + a) * n + i] = q[k] * row.weights[k];
        }
        rhs[nf + a] = row.budget;
      }

      std::vector<double> sol;
      if (n > 0 && !gauss_solve(A, rhs, n, sol)) continue;

      std::vector<double> x(m, 0.0);
      bool ok = true;
      for (std::size_t i = 0; i < nf; ++i) {
        x[free_idx[i]] = sol[i];
        if (sol[i] < -tol) ok = false;
      }
      for (std::size_t a = 0; a < na && ok; ++a)
        if (sol[nf + a] < -tol) ok = false;  // dual sign
      for (std::size_t j = 0; j < J && ok; ++j) {
        double v = 0.0;
        for (std::size_t k = 0; k < m; ++k) v += q[k] * cs.rows[j].weights[k] * x[k];
        if (v > cs.rows[j].budget + tol * (1.0 + std::fabs(cs.rows[j].budget))) ok = false;
      }
      if (!ok) continue;

      double obj = 0.0;
      for (std::size_t k = 0; k < m; ++k) {
        const double xv = x[k] < 0.0 ? 0.0 : x[k];
        obj += q[k] * ((xv - t[k]) * (xv - t[k]) + reg * xv * xv);
      }
      if (obj < best_obj) {
        best_obj = obj;
        best = x;
        for (double& v : best)
          if (v < 0.0) v = 0.0;
      }
    }
  }
  return best;
}

}  // namespace oracle
