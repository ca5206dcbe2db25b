#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <limits>
#include <stdexcept>

#include "drsom/types.hpp"

namespace drsom {

/// Exact solution of a small dense trust-region subproblem
///   min  c'a + 1/2 a'Qa   s.t.  |a|_G <= delta,
/// together with its KKT certificate: (Q + lambda G) a + c = 0,
/// Q + lambda G psd, lambda (delta - |a|_G) = 0.
struct TrsSolution {
  Vector alpha;
  double lambda = 0.0;
  double model_decrease = 0.0;  // m(0) - m(alpha), nonnegative
  bool on_boundary = false;
};

namespace detail {

struct EuclideanTrs {
  Vector y;
  double lambda = 0.0;
  bool on_boundary = false;
};

/// Euclidean-norm TRS core: min c'y + 1/2 y'Qy s.t. |y| <= delta.
/// Eigendecomposes Q and solves the secular equation for lambda by a
/// safeguarded Newton/bisection iteration; the hard case is resolved by
/// adding a minimal-eigenvector component that reaches the boundary.
inline EuclideanTrs solve_trs_euclidean(const Matrix& Q, const Vector& c,
                                        double delta) {
  const int m = static_cast<int>(Q.rows());
  Eigen::SelfAdjointEigenSolver<Matrix> es(Q);
  if (es.info() != Eigen::Success) {
    throw std::runtime_error("solve_trs: eigendecomposition failed");
  }
  const Vector theta = es.eigenvalues();  // ascending
  const Matrix& U = es.eigenvectors();
  const Vector chat = U.transpose() * c;

  const double theta_min = theta(0);
  const double theta_absmax =
      std::max(std::abs(theta(0)), std::abs(theta(m - 1)));
  const double cnorm = chat.norm();

  // |y(lambda)| with y_i = -chat_i / (theta_i + lambda); zero numerators
  // are skipped so exact hard-case components do not produce 0/0.
  auto norm_at = [&](double lam) {
    double s = 0.0;
    for (int i = 0; i < m; ++i) {
      if (chat(i) == 0.0) continue;
      const double t = theta(i) + lam;
      const double r = chat(i) / t;
      s += r * r;
    }
    return std::sqrt(s);
  };
  auto y_at = [&](double lam) {
    Vector y(m);
    for (int i = 0; i < m; ++i) {
      const double t = theta(i) + lam;
      y(i) = (chat(i) == 0.0) ? 0.0 : -chat(i) / t;
    }
    return y;
  };

  EuclideanTrs out;

  // Interior candidate.
  if (theta_min > 0.0) {
    const double n0 = norm_at(0.0);
    if (n0 <= delta * (1.0 + 1e-14)) {
      out.y = U * y_at(0.0);
      out.lambda = 0.0;
      out.on_boundary = n0 >= delta * (1.0 - 1e-12);
      return out;
    }
  }

  const double lam_lo = std::max(0.0, -theta_min);

  // Hard-case screen: components of c along the minimal eigenspace.
  const double eig_tol = 1e-12 * std::max(1.0, theta_absmax);
  double c_min_space = 0.0;
  int i_min = 0;
  for (int i = 0; i < m; ++i) {
    if (theta(i) <= theta_min + eig_tol) {
      c_min_space = std::max(c_min_space, std::abs(chat(i)));
      i_min = i;
    }
  }
  const double hard_tol = 1e-11 * std::max(1.0, cnorm);

  if (c_min_space <= hard_tol) {
    // Pseudo-solution at lam_lo with minimal-eigenspace components zeroed.
    Vector yhat(m);
    double nhat2 = 0.0;
    for (int i = 0; i < m; ++i) {
      const double t = theta(i) + lam_lo;
      if (theta(i) <= theta_min + eig_tol || chat(i) == 0.0 ||
          std::abs(t) < 1e-300) {
        yhat(i) = 0.0;
      } else {
        yhat(i) = -chat(i) / t;
        nhat2 += yhat(i) * yhat(i);
      }
    }
    const double nhat = std::sqrt(nhat2);
    if (nhat <= delta) {
      if (lam_lo == 0.0) {
        // Psd Q with compatible c: interior (pseudo-inverse) solution.
        out.y = U * yhat;
        out.lambda = 0.0;
        out.on_boundary = nhat >= delta * (1.0 - 1e-12);
        return out;
      }
      // Hard case proper: pad with a minimal eigenvector to the boundary.
      const double tau = std::sqrt(std::max(0.0, delta * delta - nhat2));
      yhat(i_min) += tau;
      out.y = U * yhat;
      out.lambda = lam_lo;
      out.on_boundary = true;
      return out;
    }
  }

  // Boundary solution: find lambda in (lam_lo, hi] with |y(lambda)| = delta
  // via safeguarded Newton on psi(lambda) = 1/|y| - 1/delta.
  double lo = lam_lo;
  double hi = lam_lo + cnorm / delta + 1e-12;
  while (norm_at(hi) > delta && hi < 1e300) {
    hi = 2.0 * hi + 1.0;  // paranoia; the analytic bound already suffices
  }
  double lam = 0.5 * (lo + hi);
  if (lam <= lam_lo) lam = lam_lo + 0.5 * (hi - lam_lo);
  for (int it = 0; it < 200; ++it) {
    const double n = norm_at(lam);
    if (std::abs(n - delta) <= 1e-13 * delta) break;
    if (n > delta) {
      lo = lam;
    } else {
      hi = lam;
    }
    // psi'(lambda) = (sum chat^2/(theta+lam)^3) / n^3
    double s3 = 0.0;
    for (int i = 0; i < m; ++i) {
      if (chat(i) == 0.0) continue;
      const double t = theta(i) + lam;
      s3 += (chat(i) * chat(i)) / (t * t * t);
    }
    const double psi = 1.0 / n - 1.0 / delta;
    const double dpsi = s3 / (n * n * n);
    double next = (dpsi > 0.0) ? lam - psi / dpsi : 0.5 * (lo + hi);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (next == lam || hi - lo <= 1e-16 * std::max(1.0, lo)) break;
    lam = next;
  }
  out.y = U * y_at(lam);
  out.lambda = lam;
  out.on_boundary = true;
  return out;
}

}  // namespace detail

/// Generalized eigenvalues of the pencil (Q, G) restricted to range(G),
/// ascending. These are the eigenvalues of the underlying operator on the
/// subspace when Q = B'HB and G = B'B.
inline Vector subspace_eigs(const Matrix& Q_in, const Matrix& G_in) {
  const int j = static_cast<int>(Q_in.rows());
  if (j < 1 || Q_in.cols() != j || G_in.rows() != j || G_in.cols() != j) {
    throw std::invalid_argument("subspace_eigs: inconsistent dimensions");
  }
  const Matrix Q = 0.5 * (Q_in + Q_in.transpose());
  const Matrix G = 0.5 * (G_in + G_in.transpose());

  // Diagonal scaling keeps the rank decision angle-based when the basis
  // vectors have very different magnitudes.
  Vector dsc(j);
  for (int i = 0; i < j; ++i) {
    dsc(i) = G(i, i) > 0.0 ? 1.0 / std::sqrt(G(i, i)) : 1.0;
  }
  const Matrix Qs = dsc.asDiagonal() * Q * dsc.asDiagonal();
  const Matrix Gs = dsc.asDiagonal() * G * dsc.asDiagonal();

  Eigen::SelfAdjointEigenSolver<Matrix> eg(Gs);
  const Vector s = eg.eigenvalues();
  const double smax = s(j - 1);
  if (smax <= 0.0) {
    throw std::invalid_argument("subspace_eigs: zero Gram matrix");
  }
  if (s(0) < -1e-10 * std::max(smax, std::abs(s(0)))) {
    throw std::invalid_argument("subspace_eigs: invalid Gram");
  }
  const double rank_tol = j * std::numeric_limits<double>::epsilon() * smax;
  int r = 0;
  for (int i = 0; i < j; ++i) {
    if (s(i) > rank_tol) ++r;
  }
  const Matrix Wr = eg.eigenvectors().rightCols(r);
  Vector sr_isqrt(r);
  for (int i = 0; i < r; ++i) sr_isqrt(i) = 1.0 / std::sqrt(s(j - r + i));
  const Matrix M = sr_isqrt.asDiagonal() * (Wr.transpose() * Qs * Wr) *
                   sr_isqrt.asDiagonal();
  Eigen::SelfAdjointEigenSolver<Matrix> em(0.5 * (M + M.transpose()));
  return em.eigenvalues();
}

/// Global minimizer of c'a + 1/2 a'Qa over the G-norm ball of radius delta.
/// G must be symmetric psd; it may be rank-deficient (the problem is then
/// projected onto range(G); components in null(G) are set by unconstrained
/// minimization when the restricted curvature is positive definite and
/// pinned at zero otherwise).
inline TrsSolution solve_trs(const Matrix& Q_in, const Vector& c,
                             const Matrix& G_in, double delta,
                             int j_max = 50) {
  const int j = static_cast<int>(Q_in.rows());
  if (j < 1 || Q_in.cols() != j || G_in.rows() != j || G_in.cols() != j ||
      c.size() != j) {
    throw std::invalid_argument("solve_trs: inconsistent dimensions");
  }
  if (j > j_max) throw std::invalid_argument("solve_trs: subspace too large");
  if (!(delta > 0.0)) throw std::invalid_argument("solve_trs: radius must be positive");
  if (!Q_in.allFinite() || !G_in.allFinite() || !c.allFinite()) {
    throw std::invalid_argument("solve_trs: non-finite input");
  }

  const Matrix Q = 0.5 * (Q_in + Q_in.transpose());
  const Matrix G = 0.5 * (G_in + G_in.transpose());

  Vector dsc(j);
  for (int i = 0; i < j; ++i) {
    dsc(i) = G(i, i) > 0.0 ? 1.0 / std::sqrt(G(i, i)) : 1.0;
  }
  const Matrix Qs = dsc.asDiagonal() * Q * dsc.asDiagonal();
  const Matrix Gs = dsc.asDiagonal() * G * dsc.asDiagonal();
  const Vector cs = dsc.asDiagonal() * c;

  Eigen::SelfAdjointEigenSolver<Matrix> eg(Gs);
  const Vector s = eg.eigenvalues();
  const Matrix& W = eg.eigenvectors();
  const double smax = s(j - 1);
  if (smax <= 0.0) throw std::invalid_argument("solve_trs: zero Gram matrix");
  if (s(0) < -1e-10 * std::max(smax, std::abs(s(0)))) {
    throw std::invalid_argument("solve_trs: invalid Gram");
  }
  const double rank_tol = j * std::numeric_limits<double>::epsilon() * smax;
  int r = 0;
  for (int i = 0; i < j; ++i) {
    if (s(i) > rank_tol) ++r;
  }

  Vector alpha_s(j);
  detail::EuclideanTrs core;

  if (r == j) {
    Vector s_isqrt(j);
    for (int i = 0; i < j; ++i) s_isqrt(i) = 1.0 / std::sqrt(s(i));
    const Matrix T = W * s_isqrt.asDiagonal();
    Matrix Qt = T.transpose() * Qs * T;
    Qt = 0.5 * (Qt + Qt.transpose());
    const Vector ct = T.transpose() * cs;
    core = detail::solve_trs_euclidean(Qt, ct, delta);
    alpha_s = T * core.y;
  } else {
    // Rank-deficient Gram: split into range / null parts.
    const Matrix Wr = W.rightCols(r);
    const Matrix Wn = W.leftCols(j - r);
    const Matrix Qrr = Wr.transpose() * Qs * Wr;
    const Matrix Qnn = Wn.transpose() * Qs * Wn;
    const Matrix Qrn = Wr.transpose() * Qs * Wn;
    const Vector cr = Wr.transpose() * cs;
    const Vector cn = Wn.transpose() * cs;

    const double qscale = std::max(1.0, Qs.cwiseAbs().maxCoeff());
    Eigen::SelfAdjointEigenSolver<Matrix> en(Qnn);
    const bool null_pd = en.eigenvalues()(0) > 1e-10 * qscale;

    Matrix Qhat;
    Vector chat;
    if (null_pd) {
      const Matrix K = Qnn.ldlt().solve(Qrn.transpose());  // Qnn^{-1} Qrn'
      const Vector kc = Qnn.ldlt().solve(cn);
      Qhat = Qrr - Qrn * K;
      Qhat = 0.5 * (Qhat + Qhat.transpose());
      chat = cr - Qrn * kc;
    } else {
      Qhat = Qrr;
      chat = cr;
    }

    Vector sr_isqrt(r);
    for (int i = 0; i < r; ++i) sr_isqrt(i) = 1.0 / std::sqrt(s(j - r + i));
    Matrix Qt = sr_isqrt.asDiagonal() * Qhat * sr_isqrt.asDiagonal();
    Qt = 0.5 * (Qt + Qt.transpose());
    const Vector ct = sr_isqrt.asDiagonal() * chat;
    core = detail::solve_trs_euclidean(Qt, ct, delta);
    const Vector a = sr_isqrt.asDiagonal() * core.y;

    Vector b = Vector::Zero(j - r);
    if (null_pd) b = -Qnn.ldlt().solve(cn + Qrn.transpose() * a);
    alpha_s = Wr * a + Wn * b;
  }

  TrsSolution sol;
  sol.alpha = dsc.asDiagonal() * alpha_s;
  sol.lambda = core.lambda;
  sol.on_boundary = core.on_boundary;
  const double dec = -(c.dot(sol.alpha) + 0.5 * sol.alpha.dot(Q * sol.alpha));
  sol.model_decrease = std::max(0.0, dec);
  if (!sol.alpha.allFinite() || !std::isfinite(sol.lambda)) {
    throw std::runtime_error("solve_trs: non-finite solution");
  }
  return sol;
}

/// Regularized (radius-free) step: solves (Q + 2 mu G) a = -c. The
/// regularizer is mu |a|_G^2, hence the factor 2 in the system matrix.
inline Vector solve_regularized(const Matrix& Q, const Vector& c,
                                const Matrix& G, double mu) {
  const int j = static_cast<int>(Q.rows());
  if (j < 1 || c.size() != j || G.rows() != j || G.cols() != j) {
    throw std::invalid_argument("solve_regularized: inconsistent dimensions");
  }
  if (mu < 0.0) throw std::invalid_argument("solve_regularized: negative mu");
  Matrix M = Q + 2.0 * mu * G;
  M = 0.5 * (M + M.transpose());

  auto try_solve = [&](const Matrix& A, Vector* out) {
    Eigen::LDLT<Matrix> ldlt(A);
    if (ldlt.info() != Eigen::Success) return false;
    Vector a = ldlt.solve(-c);
    if (!a.allFinite()) return false;
    const double resid = (A * a + c).norm();
    const double scale = c.norm() + A.norm() * a.norm();
    if (resid > 1e-8 * (1.0 + scale)) return false;
    *out = a;
    return true;
  };

  Vector alpha;
  if (try_solve(M, &alpha)) return alpha;
  const double jitter = 1e-12 * std::abs(M.trace()) +
                        std::numeric_limits<double>::min();
  Matrix Mj = M + jitter * Matrix::Identity(j, j);
  if (try_solve(Mj, &alpha)) return alpha;
  throw std::runtime_error("solve_regularized: regularized system singular");
}

}  // namespace drsom
