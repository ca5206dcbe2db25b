#pragma once

// Test-only oracles, kept independent of the library's solution paths:
// finite-difference derivative checks, a reference linear conjugate
// gradient iteration, and a direct 2-D trust-region global minimizer
// (interior candidate + dense boundary search with local refinement).

#include <Eigen/Dense>

#include <cmath>
#include <functional>
#include <limits>
#include <random>
#include <vector>

#include "drsom/objective.hpp"
#include "drsom/types.hpp"

namespace oracles {

using drsom::Matrix;
using drsom::Objective;
using drsom::Vector;

/// Central-difference gradient.
inline Vector fd_gradient(const Objective& obj, const Vector& x) {
  const int n = static_cast<int>(x.size());
  const double eps = std::numeric_limits<double>::epsilon();
  Vector g(n);
  Vector xp = x;
  for (int i = 0; i < n; ++i) {
    const double h = std::cbrt(eps) * (1.0 + std::abs(x(i)));
    xp(i) = x(i) + h;
    const double fp = obj.value(xp);
    xp(i) = x(i) - h;
    const double fm = obj.value(xp);
    xp(i) = x(i);
    g(i) = (fp - fm) / (2.0 * h);
  }
  return g;
}

/// Central-difference Hessian-vector product (independent of the library's
/// forward-difference path).
inline Vector fd_hvp_central(const Objective& obj, const Vector& x,
                             const Vector& v) {
  const double vnorm = v.norm();
  const double h = 1e-5 * (1.0 + x.norm()) / vnorm;
  return (obj.gradient(x + h * v) - obj.gradient(x - h * v)) / (2.0 * h);
}

/// Dense Hessian assembled column-by-column from exact HVPs.
inline Matrix dense_hessian(const Objective& obj, const Vector& x) {
  const int n = obj.dim();
  Matrix H(n, n);
  for (int i = 0; i < n; ++i) {
    Vector e = Vector::Zero(n);
    e(i) = 1.0;
    H.col(i) = obj.hvp_exact(x, e);
  }
  return 0.5 * (H + H.transpose()).eval();
}

/// Reference linear conjugate gradient for 1/2 x'Ax + a'x, recording every
/// iterate. Stops when |Ax + a| <= tol or after max_iter steps.
inline std::vector<Vector> linear_cg_iterates(const Matrix& A,
                                              const Vector& a,
                                              const Vector& x0, double tol,
                                              int max_iter) {
  std::vector<Vector> iterates;
  Vector x = x0;
  Vector r = A * x + a;  // gradient
  Vector p = -r;
  iterates.push_back(x);
  for (int k = 0; k < max_iter && r.norm() > tol; ++k) {
    const double rr = r.squaredNorm();
    const Vector Ap = A * p;
    const double alpha = rr / p.dot(Ap);
    x += alpha * p;
    r += alpha * Ap;
    const double beta = r.squaredNorm() / rr;
    p = -r + beta * p;
    iterates.push_back(x);
  }
  return iterates;
}

/// Global minimum value of c'y + 1/2 y'Qy over the Euclidean ball |y| <=
/// delta in dimension <= 2, by interior candidate plus a dense boundary
/// angle grid with golden-section refinement. No multiplier machinery.
inline double trs2_oracle_value(const Matrix& Q, const Vector& c,
                                double delta) {
  const int m = static_cast<int>(Q.rows());
  auto eval = [&](const Vector& y) {
    return c.dot(y) + 0.5 * y.dot(Q * y);
  };
  double best = 0.0;  // y = 0 is always feasible

  if (m == 1) {
    const double q = Q(0, 0);
    if (q > 0.0) {
      const double y = std::max(-delta, std::min(delta, -c(0) / q));
      best = std::min(best, eval(Vector::Constant(1, y)));
    }
    best = std::min(best, eval(Vector::Constant(1, delta)));
    best = std::min(best, eval(Vector::Constant(1, -delta)));
    return best;
  }

  // Interior candidate when Q is positive definite.
  Eigen::SelfAdjointEigenSolver<Matrix> es(Q);
  if (es.eigenvalues()(0) > 0.0) {
    const Vector y = -Q.ldlt().solve(c);
    if (y.norm() <= delta) best = std::min(best, eval(y));
  }

  // Boundary sweep.
  auto on_circle = [&](double phi) {
    Vector y(2);
    y << delta * std::cos(phi), delta * std::sin(phi);
    return eval(y);
  };
  const int grid = 20000;
  double best_phi = 0.0;
  double best_boundary = on_circle(0.0);
  for (int i = 1; i < grid; ++i) {
    const double phi = 2.0 * M_PI * i / grid;
    const double val = on_circle(phi);
    if (val < best_boundary) {
      best_boundary = val;
      best_phi = phi;
    }
  }
  // Golden-section refinement around the best grid angle.
  double lo = best_phi - 2.0 * M_PI / grid;
  double hi = best_phi + 2.0 * M_PI / grid;
  const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
  double x1 = hi - gr * (hi - lo);
  double x2 = lo + gr * (hi - lo);
  double f1 = on_circle(x1);
  double f2 = on_circle(x2);
  for (int it = 0; it < 200; ++it) {
    if (f1 < f2) {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - gr * (hi - lo);
      f1 = on_circle(x1);
    } else {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + gr * (hi - lo);
      f2 = on_circle(x2);
    }
  }
  best_boundary = std::min(best_boundary, std::min(f1, f2));
  return std::min(best, best_boundary);
}

/// KKT certificate check for a G-norm TRS solution; returns the worst
/// violation scaled by the corresponding tolerance denominators.
struct KktReport {
  double stationarity = 0.0;    // |(Q+lambda G)a + c| / (1 + |c|)
  double psd_violation = 0.0;   // max(0, -eig_min(Q+lambda G)) / |Q+lambda G|
  double complementarity = 0.0; // lambda (delta - |a|_G) / (1 + delta)
  double feasibility = 0.0;     // max(0, |a|_G - delta) / (1 + delta)
};

inline KktReport kkt_report(const Matrix& Q, const Vector& c, const Matrix& G,
                            double delta, const Vector& alpha, double lambda) {
  KktReport rep;
  const Matrix M = Q + lambda * G;
  rep.stationarity = (M * alpha + c).norm() / (1.0 + c.norm());
  Eigen::SelfAdjointEigenSolver<Matrix> es(M);
  const double mnorm = std::max(std::abs(es.eigenvalues()(0)),
                                std::abs(es.eigenvalues()(M.rows() - 1)));
  rep.psd_violation =
      std::max(0.0, -es.eigenvalues()(0)) / std::max(mnorm, 1e-300);
  const double gnorm_alpha = std::sqrt(std::max(0.0, alpha.dot(G * alpha)));
  rep.complementarity =
      std::abs(lambda * (delta - gnorm_alpha)) / (1.0 + delta);
  rep.feasibility = std::max(0.0, gnorm_alpha - delta) / (1.0 + delta);
  return rep;
}

/// Least-squares slope of y against x.
inline double fit_slope(const std::vector<double>& x,
                        const std::vector<double>& y) {
  const int n = static_cast<int>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (int i = 0; i < n; ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace oracles
