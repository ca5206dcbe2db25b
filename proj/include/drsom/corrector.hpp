#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "drsom/objective.hpp"
#include "drsom/trs.hpp"
#include "drsom/types.hpp"

namespace drsom {

/// Orthonormal basis of a growing subspace of R^n, maintained by modified
/// Gram-Schmidt with one reorthogonalization pass.
class Subspace {
 public:
  explicit Subspace(int ambient_dim) : V_(ambient_dim, 0) {}

  int ambient() const { return static_cast<int>(V_.rows()); }
  int dim() const { return static_cast<int>(V_.cols()); }
  const Matrix& basis() const { return V_; }

  /// Appends w after projecting out the current span. Returns false (and
  /// leaves the basis unchanged) when the residual norm is at most
  /// drop_tol * |w|, i.e. w is numerically dependent.
  bool expand(const Vector& w, double drop_tol = 1e-10) {
    const double wnorm = w.norm();
    if (wnorm == 0.0) return false;
    Vector r = w;
    if (dim() > 0) {
      r -= V_ * (V_.transpose() * r);
      r -= V_ * (V_.transpose() * r);  // reorthogonalize
    }
    const double rnorm = r.norm();
    if (rnorm <= drop_tol * wnorm) return false;
    V_.conservativeResize(Eigen::NoChange, dim() + 1);
    V_.col(dim() - 1) = r / rnorm;
    return true;
  }

 private:
  Matrix V_;
};

/// Exact projection residual |(I - VV')Hd| -- the error of the subspace
/// Hessian approximation along d. Costs one HVP.
inline double residual(const Objective& obj, const Vector& x,
                       const Vector& g_x, const Subspace& V, const Vector& d) {
  const double dnorm = d.norm();
  if (dnorm == 0.0) throw std::invalid_argument("residual: zero direction");
  const Vector in_span = V.basis() * (V.basis().transpose() * d);
  if ((d - in_span).norm() > 1e-8 * dnorm) {
    throw std::invalid_argument("residual: d not in span(V)");
  }
  const Vector hd = hvp(obj, x, d, g_x);
  return (hd - V.basis() * (V.basis().transpose() * hd)).norm();
}

struct CorrectorResult {
  Vector step;
  double lambda = 0.0;
  double model_decrease = 0.0;
  double residual = 0.0;
  bool satisfied = false;
  int expansions = 0;
  int hvp_calls = 0;
  int subspace_dim = 0;
  std::vector<double> residual_history;  // one entry per re-solve
};

/// Expands the step subspace with Krylov-like directions H d^{j-1} and
/// re-solves the trust-region subproblem over the enlarged (orthonormal)
/// basis until either the multiplier exceeds sqrt(eps) or the projection
/// residual satisfies |(I-VV')Hd| <= c_bound |d|^2. The columns H v_i are
/// cached so a whole invocation costs one HVP per basis vector.
inline CorrectorResult corrector_step(const Objective& obj, const Vector& x,
                                      double f_x, const Vector& g_x,
                                      const Vector& d_init, double delta,
                                      double eps, double c_bound, int j_max) {
  (void)f_x;
  const int n = obj.dim();
  if (g_x.norm() == 0.0) {
    throw std::invalid_argument("corrector_step: zero gradient");
  }
  const double sqrt_eps = std::sqrt(eps);
  const int dim_cap = std::min(j_max, n);

  Subspace V(n);
  V.expand(g_x);
  V.expand(d_init);
  Matrix hcols(n, V.dim());
  for (int i = 0; i < V.dim(); ++i) {
    hcols.col(i) = hvp(obj, x, V.basis().col(i), g_x);
  }

  CorrectorResult out;
  out.hvp_calls = V.dim();

  // Incumbent direction, expressed in the current basis.
  Vector d_prev = d_init.norm() > 0.0 ? d_init : Vector(-g_x);

  for (int iter = 1; iter < n; ++iter) {
    // Krylov-like direction for this round: H d^{j-1} from cached columns.
    const Vector hd_prev = hcols * (V.basis().transpose() * d_prev);
    bool expanded = false;
    if (V.dim() < dim_cap) {
      expanded = V.expand(hd_prev);
      if (expanded) {
        hcols.conservativeResize(Eigen::NoChange, V.dim());
        hcols.col(V.dim() - 1) = hvp(obj, x, V.basis().col(V.dim() - 1), g_x);
        ++out.hvp_calls;
        ++out.expansions;
      }
    }

    const int jdim = V.dim();
    Matrix Q = V.basis().transpose() * hcols;
    Q = 0.5 * (Q + Q.transpose()).eval();
    const Vector c = V.basis().transpose() * g_x;
    const TrsSolution sol =
        solve_trs(Q, c, Matrix::Identity(jdim, jdim), delta,
                  std::max(jdim, j_max));

    const Vector d_cur = V.basis() * sol.alpha;
    const Vector hd_cur = hcols * sol.alpha;
    const double resid =
        (hd_cur - V.basis() * (V.basis().transpose() * hd_cur)).norm();

    out.step = d_cur;
    out.lambda = sol.lambda;
    out.model_decrease = sol.model_decrease;
    out.residual = resid;
    out.subspace_dim = jdim;
    out.residual_history.push_back(resid);

    if (sol.lambda > sqrt_eps ||
        resid <= c_bound * d_cur.squaredNorm()) {
      out.satisfied = true;
      return out;
    }
    if (!expanded) break;  // dependent direction or dimension cap reached
    d_prev = d_cur;
  }
  return out;
}

}  // namespace drsom
