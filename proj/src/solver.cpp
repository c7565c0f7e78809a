#include "ves/solver.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>

namespace ves {

namespace {

// Dense Gaussian elimination with partial pivoting; returns false on a
// (near-)singular system. Sizes here are at most 4 * n_bin.
bool solve_dense(std::vector<double> a, std::vector<double> rhs, std::size_t n,
                 std::vector<double>& out) {
  std::vector<std::size_t> piv(n);
  std::iota(piv.begin(), piv.end(), 0);
  double max_diag = 0.0;
  for (std::size_t i = 0; i < n; ++i) max_diag = std::max(max_diag, std::abs(a[i * n + i]));
  if (max_diag == 0.0) max_diag = 1.0;
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t best = col;
    for (std::size_t row = col + 1; row < n; ++row)
      if (std::abs(a[row * n + col]) > std::abs(a[best * n + col])) best = row;
    if (std::abs(a[best * n + col]) < 1e-13 * max_diag) return false;
    if (best != col) {
      for (std::size_t j = 0; j < n; ++j) std::swap(a[col * n + j], a[best * n + j]);
      std::swap(rhs[col], rhs[best]);
    }
    for (std::size_t row = col + 1; row < n; ++row) {
      const double f = a[row * n + col] / a[col * n + col];
      for (std::size_t j = col; j < n; ++j) a[row * n + j] -= f * a[col * n + j];
      rhs[row] -= f * rhs[col];
    }
  }
  out.assign(n, 0.0);
  for (std::size_t i = n; i-- > 0;) {
    double v = rhs[i];
    for (std::size_t j = i + 1; j < n; ++j) v -= a[i * n + j] * out[j];
    out[i] = v / a[i * n + i];
  }
  return true;
}

double inf_norm(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

// Scaled problem data. Variables are point-major: idx = k * B + l.
struct Problem {
  std::size_t m = 0;     // grid points
  std::size_t B = 0;     // bins
  std::size_t nvar = 0;  // m * B
  std::size_t J = 0;     // budget rows (4 * B)
  double reg = 0.0;
  double s = 1.0;  // value scale, x_original = s * x_scaled

  std::vector<double> q;         // quadrature weights (m)
  std::vector<double> t;         // scaled target (m)
  std::vector<double> qlin;      // linear objective term (nvar)
  std::vector<std::vector<double>> row_coef;  // J x m, normalized, includes q_k
  std::vector<int> row_bin;                   // J
  std::vector<double> bhat;                   // scaled budgets (J)
  std::vector<double> row_norm;               // original row euclidean norms (J)

  // gradient of the scaled objective
  void grad(const std::vector<double>& x, std::vector<double>& g) const {
    g.assign(nvar, 0.0);
    for (std::size_t k = 0; k < m; ++k) {
      double sum = 0.0;
      for (std::size_t l = 0; l < B; ++l) sum += x[k * B + l];
      const double common = 2.0 * q[k] * (sum - t[k]);
      for (std::size_t l = 0; l < B; ++l)
        g[k * B + l] = common + 2.0 * q[k] * reg * x[k * B + l];
    }
  }

  // y += P x (scaled Hessian product)
  void hess_mul(const std::vector<double>& x, std::vector<double>& y) const {
    y.assign(nvar, 0.0);
    for (std::size_t k = 0; k < m; ++k) {
      double sum = 0.0;
      for (std::size_t l = 0; l < B; ++l) sum += x[k * B + l];
      for (std::size_t l = 0; l < B; ++l)
        y[k * B + l] = 2.0 * q[k] * sum + 2.0 * q[k] * reg * x[k * B + l];
    }
  }

  void b_mul(const std::vector<double>& x, std::vector<double>& out) const {
    out.assign(J, 0.0);
    for (std::size_t j = 0; j < J; ++j) {
      const auto& coef = row_coef[j];
      const std::size_t l = static_cast<std::size_t>(row_bin[j]);
      double acc = 0.0;
      for (std::size_t k = 0; k < m; ++k) acc += coef[k] * x[k * B + l];
      out[j] = acc;
    }
  }

  void bt_mul_add(const std::vector<double>& w, std::vector<double>& out) const {
    for (std::size_t j = 0; j < J; ++j) {
      if (w[j] == 0.0) continue;
      const auto& coef = row_coef[j];
      const std::size_t l = static_cast<std::size_t>(row_bin[j]);
      for (std::size_t k = 0; k < m; ++k) out[k * B + l] += w[j] * coef[k];
    }
  }
};

// Woodbury-factored solver for (P + (sigma+rho) I + rho B^T B) x = rhs.
struct KktFactor {
  const Problem* pb = nullptr;
  double sigma = 0.0, rho = 0.0;
  std::vector<double> da;                 // per-k diagonal of D block
  std::vector<double> dc;                 // per-k coupling of D block
  std::vector<std::vector<double>> W;     // J columns of D^-1 B^T (nvar each)
  std::vector<double> M;                  // J x J, factor input for solve_dense
  std::vector<double> scratch;

  void dinv_apply(std::vector<double>& v) const {
    const std::size_t B = pb->B;
    for (std::size_t k = 0; k < pb->m; ++k) {
      double sum = 0.0;
      for (std::size_t l = 0; l < B; ++l) sum += v[k * B + l];
      const double corr = dc[k] / (da[k] + dc[k] * static_cast<double>(B)) * sum;
      for (std::size_t l = 0; l < B; ++l) v[k * B + l] = (v[k * B + l] - corr) / da[k];
    }
  }

  void factor(const Problem& p, double sig, double r) {
    pb = &p;
    sigma = sig;
    rho = r;
    da.resize(p.m);
    dc.resize(p.m);
    for (std::size_t k = 0; k < p.m; ++k) {
      da[k] = 2.0 * p.q[k] * p.reg + sigma + rho;
      dc[k] = 2.0 * p.q[k];
    }
    W.assign(p.J, std::vector<double>(p.nvar, 0.0));
    for (std::size_t j = 0; j < p.J; ++j) {
      auto& col = W[j];
      std::fill(col.begin(), col.end(), 0.0);
      const std::size_t l = static_cast<std::size_t>(p.row_bin[j]);
      for (std::size_t k = 0; k < p.m; ++k) col[k * p.B + l] = p.row_coef[j][k];
      dinv_apply(col);
    }
    M.assign(p.J * p.J, 0.0);
    for (std::size_t i = 0; i < p.J; ++i) {
      const std::size_t li = static_cast<std::size_t>(p.row_bin[i]);
      for (std::size_t j = 0; j < p.J; ++j) {
        double acc = 0.0;
        for (std::size_t k = 0; k < p.m; ++k)
          acc += p.row_coef[i][k] * W[j][k * p.B + li];
        M[i * p.J + j] = acc;
      }
      M[i * p.J + i] += 1.0 / rho;
    }
  }

  // x := (D + rho B^T B)^{-1} rhs
  bool solve(std::vector<double>& rhs) const {
    const Problem& p = *pb;
    dinv_apply(rhs);
    std::vector<double> g(p.J, 0.0);
    for (std::size_t j = 0; j < p.J; ++j) {
      const std::size_t l = static_cast<std::size_t>(p.row_bin[j]);
      double acc = 0.0;
      for (std::size_t k = 0; k < p.m; ++k) acc += p.row_coef[j][k] * rhs[k * p.B + l];
      g[j] = acc;
    }
    std::vector<double> h;
    if (!solve_dense(M, g, p.J, h)) return false;
    for (std::size_t j = 0; j < p.J; ++j) {
      if (h[j] == 0.0) continue;
      const auto& col = W[j];
      for (std::size_t i = 0; i < p.nvar; ++i) rhs[i] -= h[j] * col[i];
    }
    return true;
  }
};

struct PolishResult {
  bool ok = false;
  std::vector<double> x;
  std::vector<double> lambda;  // budget duals, scaled space
};

// Active-set re-solve seeded from the ADMM iterate. The working sets are
// refined (drop negative multipliers, pin negative coordinates, add violated
// rows, release dual-infeasible zeros) until the KKT conditions hold exactly,
// up to an iteration cap.
PolishResult polish(const Problem& p, const std::vector<double>& x_admm,
                    const std::vector<double>& y_b, const std::vector<double>& y_i) {
  PolishResult res;
  const std::size_t B = p.B, m = p.m;

  const double ymax = std::max(inf_norm(y_b), 1.0);
  const double xmax = std::max(inf_norm(x_admm), 1.0);
  std::vector<double> bx;
  p.b_mul(x_admm, bx);

  std::vector<char> act(p.J, 0);
  for (std::size_t j = 0; j < p.J; ++j) {
    const bool tight = (p.bhat[j] - bx[j]) < 1e-7 * (1.0 + std::abs(p.bhat[j]));
    const bool dual_on = y_b[j] > 1e-10 * ymax;
    if (tight || dual_on) act[j] = 1;
  }
  std::vector<char> zero(p.nvar, 0);
  for (std::size_t i = 0; i < p.nvar; ++i)
    if (x_admm[i] < 1e-7 * xmax || y_i[i] < -1e-10 * std::max(inf_norm(y_i), 1.0)) zero[i] = 1;

  std::vector<int> nfree(m, 0);
  auto pinv_free = [&](std::vector<double>& v) {
    // (a I + c J)^-1 restricted to the free coordinates of each point
    for (std::size_t k = 0; k < m; ++k) {
      const double a = 2.0 * p.q[k] * p.reg;
      const double c = 2.0 * p.q[k];
      double sum = 0.0;
      for (std::size_t l = 0; l < B; ++l)
        if (!zero[k * B + l]) sum += v[k * B + l];
      const double corr = c / (a + c * static_cast<double>(nfree[k])) * sum;
      for (std::size_t l = 0; l < B; ++l) {
        const std::size_t i = k * B + l;
        v[i] = zero[i] ? 0.0 : (v[i] - corr) / a;
      }
    }
  };

  const int max_refine = 60;
  for (int pass = 0; pass < max_refine; ++pass) {
    for (std::size_t k = 0; k < m; ++k) {
      nfree[k] = 0;
      for (std::size_t l = 0; l < B; ++l)
        if (!zero[k * B + l]) ++nfree[k];
    }

    std::vector<std::size_t> active;
    for (std::size_t j = 0; j < p.J; ++j)
      if (act[j]) active.push_back(j);
    const std::size_t na = active.size();

    // x_F = -Pinv (qlin_F + B_act^T lambda); B_act x_F = bhat_act.
    std::vector<double> pq(p.qlin);
    for (std::size_t i = 0; i < p.nvar; ++i)
      if (zero[i]) pq[i] = 0.0;
    pinv_free(pq);  // pq = Pinv qlin_F

    std::vector<std::vector<double>> pb_cols(na, std::vector<double>(p.nvar, 0.0));
    for (std::size_t a = 0; a < na; ++a) {
      const std::size_t j = active[a];
      const std::size_t l = static_cast<std::size_t>(p.row_bin[j]);
      auto& col = pb_cols[a];
      for (std::size_t k = 0; k < m; ++k) {
        const std::size_t i = k * B + l;
        if (!zero[i]) col[i] = p.row_coef[j][k];
      }
      pinv_free(col);
    }

    std::vector<double> lambda;
    if (na > 0) {
      std::vector<double> S(na * na, 0.0), rhs(na, 0.0);
      for (std::size_t a = 0; a < na; ++a) {
        const std::size_t ja = active[a];
        const std::size_t la = static_cast<std::size_t>(p.row_bin[ja]);
        double dot_q = 0.0;
        for (std::size_t k = 0; k < m; ++k) {
          const std::size_t i = k * B + la;
          if (!zero[i]) dot_q += p.row_coef[ja][k] * pq[i];
        }
        rhs[a] = -(p.bhat[ja] + dot_q);
        for (std::size_t b = 0; b < na; ++b) {
          double acc = 0.0;
          for (std::size_t k = 0; k < m; ++k) {
            const std::size_t i = k * B + la;
            if (!zero[i]) acc += p.row_coef[ja][k] * pb_cols[b][i];
          }
          S[a * na + b] = acc;
        }
      }
      if (!solve_dense(S, rhs, na, lambda)) {
        // a row whose free support vanished makes the Schur complement
        // singular; deactivate the weakest row and retry
        std::size_t drop = active[0];
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t a = 0; a < na; ++a) {
          double diag = std::abs(S[a * na + a]);
          if (diag < best) {
            best = diag;
            drop = active[a];
          }
        }
        act[drop] = 0;
        continue;
      }
    }

    std::vector<double> x(p.nvar, 0.0);
    for (std::size_t i = 0; i < p.nvar; ++i) {
      if (zero[i]) continue;
      double v = -pq[i];
      for (std::size_t a = 0; a < na; ++a) v -= lambda[a] * pb_cols[a][i];
      x[i] = v;
    }

    // Refinement moves, most negative first.
    double lmax = 1.0;
    for (double l : lambda) lmax = std::max(lmax, std::abs(l));
    {
      double worst = -1e-7 * lmax;
      std::size_t drop = p.J;
      for (std::size_t a = 0; a < na; ++a)
        if (lambda[a] < worst) {
          worst = lambda[a];
          drop = active[a];
        }
      if (drop < p.J) {
        act[drop] = 0;
        continue;
      }
    }
    double xm = 1.0;
    for (double v : x) xm = std::max(xm, std::abs(v));
    {
      double worst = -1e-8 * xm;
      std::size_t pin = p.nvar;
      for (std::size_t i = 0; i < p.nvar; ++i)
        if (x[i] < worst) {
          worst = x[i];
          pin = i;
        }
      if (pin < p.nvar) {
        // pin every materially negative coordinate in one pass
        for (std::size_t i = 0; i < p.nvar; ++i)
          if (x[i] < -1e-8 * xm) zero[i] = 1;
        continue;
      }
    }
    for (double& v : x)
      if (v < 0.0) v = 0.0;

    p.b_mul(x, bx);
    {
      double worst = 1e-8;
      std::size_t add = p.J;
      for (std::size_t j = 0; j < p.J; ++j) {
        const double viol = (bx[j] - p.bhat[j]) / (1.0 + std::abs(p.bhat[j]));
        if (!act[j] && viol > worst) {
          worst = viol;
          add = j;
        }
      }
      if (add < p.J) {
        act[add] = 1;
        continue;
      }
    }

    // Dual feasibility on the zero set.
    std::vector<double> g;
    p.grad(x, g);
    std::vector<double> lam_full(p.J, 0.0);
    for (std::size_t a = 0; a < na; ++a) lam_full[active[a]] = std::max(lambda[a], 0.0);
    p.bt_mul_add(lam_full, g);
    double gscale = 1.0;
    for (double v : g) gscale = std::max(gscale, std::abs(v));
    {
      // releases continue down to the regularizer's gradient scale so ties
      // between equivalent coordinates resolve to the symmetric split; an
      // iterate that is clean at the coarse tolerance is kept as fallback
      double worst = -1e-11 * gscale;
      std::size_t release = p.nvar;
      for (std::size_t i = 0; i < p.nvar; ++i)
        if (zero[i] && g[i] < worst) {
          worst = g[i];
          release = i;
        }
      if (release < p.nvar) {
        if (worst > -1e-7 * gscale && !res.ok) {
          res.ok = true;
          res.x = x;
          res.lambda = lam_full;
        }
        zero[release] = 0;
        continue;
      }
    }

    res.ok = true;
    res.x = std::move(x);
    res.lambda = std::move(lam_full);
    return res;
  }
  return res;
}

KktResiduals kkt_residuals(const Problem& p, const std::vector<double>& x,
                           const std::vector<double>& lambda) {
  KktResiduals kkt;
  std::vector<double> g;
  p.grad(x, g);
  std::vector<double> bt(p.nvar, 0.0);
  p.bt_mul_add(lambda, bt);
  double gnorm = std::max({inf_norm(g), inf_norm(bt), 1.0});
  double stat = 0.0;
  for (std::size_t i = 0; i < p.nvar; ++i) {
    const double r = g[i] + bt[i];
    if (x[i] > 0.0)
      stat = std::max(stat, std::abs(r));
    else
      stat = std::max(stat, std::max(0.0, -r));
  }
  kkt.stationarity = stat / gnorm;

  std::vector<double> bx;
  p.b_mul(x, bx);
  double prim = 0.0;
  for (std::size_t j = 0; j < p.J; ++j)
    prim = std::max(prim, (bx[j] - p.bhat[j]) / (1.0 + std::abs(p.bhat[j])));
  for (double v : x) prim = std::max(prim, -v);
  kkt.primal = std::max(prim, 0.0);

  double dual = 0.0;
  for (double l : lambda) dual = std::max(dual, -l);
  kkt.dual = std::max(dual, 0.0);
  return kkt;
}

}  // namespace

ProjectionResult project(const SpectralDensity& target, const EnsembleSpec& ens,
                         const SolveOptions& opts, int n_bin_override,
                         const ProjectionResult* warm) {
  target.validate();
  const ConstraintSystem cs = build_constraints(ens, target.grid, n_bin_override);

  Problem p;
  p.m = target.grid.size();
  p.B = ens.bins.size();
  p.nvar = p.m * p.B;
  p.J = cs.rows.size();
  p.reg = opts.reg;
  p.q = target.grid.weights;

  double tmax = 0.0;
  for (double v : target.values) tmax = std::max(tmax, v);
  p.s = tmax > 0.0 ? tmax : 1.0;
  p.t.resize(p.m);
  for (std::size_t k = 0; k < p.m; ++k) p.t[k] = target.values[k] / p.s;

  p.qlin.assign(p.nvar, 0.0);
  for (std::size_t k = 0; k < p.m; ++k)
    for (std::size_t l = 0; l < p.B; ++l) p.qlin[k * p.B + l] = -2.0 * p.q[k] * p.t[k];

  p.row_coef.resize(p.J);
  p.row_bin.resize(p.J);
  p.bhat.resize(p.J);
  p.row_norm.resize(p.J);
  for (std::size_t j = 0; j < p.J; ++j) {
    const auto& row = cs.rows[j];
    p.row_bin[j] = row.bin_index;
    std::vector<double> coef(p.m);
    double norm2 = 0.0;
    for (std::size_t k = 0; k < p.m; ++k) {
      coef[k] = p.q[k] * row.weights[k];
      norm2 += coef[k] * coef[k];
    }
    const double norm = std::sqrt(norm2);
    if (!(norm > 0.0)) throw std::runtime_error("project: degenerate constraint row");
    for (double& c : coef) c /= norm;
    p.row_coef[j] = std::move(coef);
    p.row_norm[j] = norm;
    p.bhat[j] = row.budget / (p.s * norm);
  }

  // ADMM state
  std::vector<double> x(p.nvar, 0.0);
  std::vector<double> zb(p.J, 0.0), yb(p.J, 0.0);
  std::vector<double> zi(p.nvar, 0.0), yi(p.nvar, 0.0);
  if (warm && warm->per_bin.size() == p.B && warm->per_bin[0].values.size() == p.m) {
    for (std::size_t l = 0; l < p.B; ++l)
      for (std::size_t k = 0; k < p.m; ++k) x[k * p.B + l] = warm->per_bin[l].values[k] / p.s;
    if (warm->duals.size() == p.J)
      for (std::size_t j = 0; j < p.J; ++j) yb[j] = warm->duals[j] * p.row_norm[j] / p.s;
    p.b_mul(x, zb);
    zi = x;
  }

  const double sigma = 1e-6;
  double rho = 0.1;
  const double alpha = 1.6;
  KktFactor kf;
  kf.factor(p, sigma, rho);

  std::vector<double> rhs(p.nvar), ztil_b(p.J), g(p.nvar);
  std::vector<double> best_x = x, best_lambda(p.J, 0.0);
  KktResiduals best_kkt;
  best_kkt.stationarity = best_kkt.primal = best_kkt.dual =
      std::numeric_limits<double>::infinity();
  bool polished = false;
  int iter = 0;
  double prev_obj = std::numeric_limits<double>::infinity();

  auto scaled_lambda = [&](const std::vector<double>& y) {
    std::vector<double> lam(p.J);
    for (std::size_t j = 0; j < p.J; ++j) lam[j] = std::max(y[j], 0.0);
    return lam;
  };

  auto try_finish = [&]() -> bool {
    PolishResult pr = polish(p, x, yb, yi);
    if (pr.ok) {
      const KktResiduals kkt = kkt_residuals(p, pr.x, pr.lambda);
      if (kkt.max() < best_kkt.max()) {
        best_x = pr.x;
        best_lambda = pr.lambda;
        best_kkt = kkt;
        polished = true;
      }
      return kkt.max() <= opts.tol;
    }
    return false;
  };

  for (iter = 0; iter < opts.max_iter; ++iter) {
    // x update
    for (std::size_t i = 0; i < p.nvar; ++i) rhs[i] = sigma * x[i] - p.qlin[i] + rho * zi[i] - yi[i];
    std::vector<double> w(p.J);
    for (std::size_t j = 0; j < p.J; ++j) w[j] = rho * zb[j] - yb[j];
    p.bt_mul_add(w, rhs);
    if (!kf.solve(rhs)) break;
    const std::vector<double>& xt = rhs;

    p.b_mul(xt, ztil_b);
    for (std::size_t i = 0; i < p.nvar; ++i) x[i] = alpha * xt[i] + (1.0 - alpha) * x[i];
    for (std::size_t j = 0; j < p.J; ++j) {
      const double zr = alpha * ztil_b[j] + (1.0 - alpha) * zb[j];
      const double cand = zr + yb[j] / rho;
      const double znew = std::min(cand, p.bhat[j]);
      yb[j] += rho * (zr - znew);
      zb[j] = znew;
    }
    for (std::size_t i = 0; i < p.nvar; ++i) {
      const double zr = alpha * xt[i] + (1.0 - alpha) * zi[i];
      const double cand = zr + yi[i] / rho;
      const double znew = std::max(cand, 0.0);
      yi[i] += rho * (zr - znew);
      zi[i] = znew;
    }

    if ((iter + 1) % 25 == 0 || iter + 1 == opts.max_iter) {
      // scaled residuals
      std::vector<double> bx;
      p.b_mul(x, bx);
      double r_prim = 0.0, prim_scale = 1.0;
      for (std::size_t j = 0; j < p.J; ++j) {
        r_prim = std::max(r_prim, std::abs(bx[j] - zb[j]));
        prim_scale = std::max({prim_scale, std::abs(bx[j]), std::abs(zb[j])});
      }
      for (std::size_t i = 0; i < p.nvar; ++i) {
        r_prim = std::max(r_prim, std::abs(x[i] - zi[i]));
        prim_scale = std::max({prim_scale, std::abs(x[i])});
      }
      p.grad(x, g);
      std::vector<double> dres(g);
      p.bt_mul_add(yb, dres);
      for (std::size_t i = 0; i < p.nvar; ++i) dres[i] += yi[i];
      const double r_dual = inf_norm(dres);
      const double dual_scale = std::max(inf_norm(g), 1.0);

      double obj = 0.0;
      for (std::size_t k = 0; k < p.m; ++k) {
        double sum = 0.0;
        for (std::size_t l = 0; l < p.B; ++l) sum += std::max(x[k * p.B + l], 0.0);
        obj += p.q[k] * (sum - p.t[k]) * (sum - p.t[k]);
      }

      if (opts.log_every > 0 && (iter + 1) % opts.log_every < 25) {
        std::fprintf(stderr,
                     "{\"solver_iter\":%d,\"r_prim\":%.3e,\"r_dual\":%.3e,\"rho\":%.3e,"
                     "\"objective\":%.6e}\n",
                     iter + 1, r_prim / prim_scale, r_dual / dual_scale, rho, obj * p.s * p.s);
      }

      const bool residuals_small =
          r_prim / prim_scale < 1e-3 && r_dual / dual_scale < 1e-3;
      const bool tight = r_prim / prim_scale < 1e-9 && r_dual / dual_scale < 1e-9 &&
                         std::abs(obj - prev_obj) < 1e-9 * (1.0 + std::abs(obj));
      prev_obj = obj;

      if ((residuals_small && (iter + 1) % 100 < 25) || tight || iter + 1 == opts.max_iter) {
        if (try_finish()) {
          ++iter;
          break;
        }
        if (tight) {
          ++iter;
          break;
        }
      }

      // adaptive step size
      if ((iter + 1) % 200 == 0) {
        const double ratio = (r_prim / prim_scale + 1e-30) / (r_dual / dual_scale + 1e-30);
        double f = std::sqrt(ratio);
        f = std::clamp(f, 0.2, 5.0);
        if (f > 1.5 || f < 0.67) {
          rho = std::clamp(rho * f, 1e-4, 1e4);
          kf.factor(p, sigma, rho);
        }
      }
    }
  }

  if (!polished) {
    // fall back to the clamped ADMM iterate
    std::vector<double> xc(x);
    for (double& v : xc) v = std::max(v, 0.0);
    const auto lam = scaled_lambda(yb);
    const KktResiduals kkt = kkt_residuals(p, xc, lam);
    if (kkt.max() < best_kkt.max()) {
      best_x = std::move(xc);
      best_lambda = lam;
      best_kkt = kkt;
    }
  }

  // Tie-break cleanup: bins with identical constraint rows admit any split of
  // their common aggregate; average them so the reported split is the
  // symmetric one the regularizer selects in exact arithmetic.
  {
    std::vector<std::size_t> group(p.B);
    bool any = false;
    for (std::size_t b = 0; b < p.B; ++b) {
      group[b] = b;
      for (std::size_t b0 = 0; b0 < b; ++b0) {
        bool same = true;
        for (std::size_t r = 0; r < 4 && same; ++r) {
          const auto& ra = cs.rows[b0 * 4 + r];
          const auto& rb = cs.rows[b * 4 + r];
          same = ra.budget == rb.budget && ra.weights == rb.weights;
        }
        if (same) {
          group[b] = b0;
          any = true;
          break;
        }
      }
    }
    if (any) {
      std::vector<double> xa(p.nvar, 0.0), la(p.J, 0.0), members(p.B, 0.0);
      for (std::size_t b = 0; b < p.B; ++b) members[group[b]] += 1.0;
      for (std::size_t k = 0; k < p.m; ++k)
        for (std::size_t b = 0; b < p.B; ++b)
          xa[k * p.B + group[b]] += best_x[k * p.B + b] / members[group[b]];
      for (std::size_t b = 0; b < p.B; ++b)
        for (std::size_t r = 0; r < 4; ++r)
          la[group[b] * 4 + r] += best_lambda[b * 4 + r] / members[group[b]];
      for (std::size_t k = 0; k < p.m; ++k)
        for (std::size_t b = 0; b < p.B; ++b)
          if (group[b] != b) xa[k * p.B + b] = xa[k * p.B + group[b]];
      for (std::size_t b = 0; b < p.B; ++b)
        for (std::size_t r = 0; r < 4; ++r)
          if (group[b] != b) la[b * 4 + r] = la[group[b] * 4 + r];
      const KktResiduals kkt2 = kkt_residuals(p, xa, la);
      if (kkt2.max() <= std::max(best_kkt.max(), opts.tol)) {
        best_x = std::move(xa);
        best_lambda = std::move(la);
        best_kkt = kkt2;
      }
    }
  }

  // Assemble the result in original units.
  ProjectionResult res;
  res.iterations = iter;
  res.kkt = best_kkt;
  res.converged = best_kkt.max() <= opts.tol;
  res.per_bin.resize(p.B);
  for (std::size_t l = 0; l < p.B; ++l) {
    res.per_bin[l].grid = target.grid;
    res.per_bin[l].values.resize(p.m);
    for (std::size_t k = 0; k < p.m; ++k)
      res.per_bin[l].values[k] = p.s * std::max(best_x[k * p.B + l], 0.0);
  }
  res.aggregate.grid = target.grid;
  res.aggregate.values.assign(p.m, 0.0);
  for (std::size_t l = 0; l < p.B; ++l)
    for (std::size_t k = 0; k < p.m; ++k) res.aggregate.values[k] += res.per_bin[l].values[k];

  double obj = 0.0;
  for (std::size_t k = 0; k < p.m; ++k) {
    const double r = res.aggregate.values[k] - target.values[k];
    obj += p.q[k] * r * r;
  }
  res.objective = obj;

  res.duals.resize(p.J);
  for (std::size_t j = 0; j < p.J; ++j)
    res.duals[j] = p.s * best_lambda[j] / p.row_norm[j];
  res.feasibility = feasibility_report(res.per_bin, cs);
  return res;
}

BoundPair solve_bounds(const SpectralDensity& target, const EnsembleSpec& ens,
                       const SolveOptions& opts) {
  BoundPair bp;
  bp.lower = project(target, ens, opts, 1);
  bp.upper = project(target, ens, opts, ens.n_bin());
  return bp;
}

}  // namespace ves
