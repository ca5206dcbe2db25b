#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <random>
#include <stdexcept>
#include <vector>

#include "drsom/objective.hpp"
#include "drsom/types.hpp"

namespace drsom {

/// Low-dimensional quadratic model of f around x over span{-g, d}:
///   m(a) = f0 + c'a + 1/2 a'Qa,   step(a) = sum_i a_i basis[i],
/// with G the Gram matrix of the basis (so |a|_G equals the lifted step
/// norm). j is 1 on the first iteration (no momentum yet), otherwise 2.
struct QuadModel {
  int j = 0;
  Matrix Q;
  Vector c;
  Matrix G;
  double f0 = 0.0;
  std::vector<Vector> basis;  // basis[0] = -g, basis[1] = d
  int gram_rank = 0;          // < j when d is (numerically) parallel to g

  Vector lift(const Vector& alpha) const {
    Vector step = Vector::Zero(basis.front().size());
    for (int i = 0; i < j; ++i) step += alpha(i) * basis[i];
    return step;
  }

  double value(const Vector& alpha) const {
    return f0 + c.dot(alpha) + 0.5 * alpha.dot(Q * alpha);
  }
};

enum class ModelMethodTag { kHvpExact, kHvpFd, kInterpolation };

struct ModelMethod {
  ModelMethodTag tag = ModelMethodTag::kInterpolation;
  int interp_samples = 3;     // >= 3; more samples -> least squares
  double interp_scale = 1.0;  // sample radius on the stepsize sphere
  bool interp_scale_with_radius = false;  // cap scale at the trust radius
};

namespace detail {

inline int gram_rank_of(const Matrix& G) {
  const int j = static_cast<int>(G.rows());
  Vector dsc(j);
  for (int i = 0; i < j; ++i) {
    dsc(i) = G(i, i) > 0.0 ? 1.0 / std::sqrt(G(i, i)) : 1.0;
  }
  const Matrix Gs = dsc.asDiagonal() * G * dsc.asDiagonal();
  Eigen::SelfAdjointEigenSolver<Matrix> eg(Gs);
  const double smax = eg.eigenvalues()(j - 1);
  if (smax <= 0.0) return 0;
  const double tol = j * std::numeric_limits<double>::epsilon() * smax;
  int r = 0;
  for (int i = 0; i < j; ++i) {
    if (eg.eigenvalues()(i) > tol) ++r;
  }
  return r;
}

}  // namespace detail

/// Builds the model from Hessian-vector products: Q = B'HB with
/// B = [-g, d], assembled from two HVP calls (one when d = 0).
inline QuadModel build_hvp(const Objective& obj, const Vector& x, double f_x,
                           const Vector& g, const Vector& d,
                           bool force_fd = false) {
  if (g.norm() == 0.0) {
    throw std::invalid_argument("build_hvp: zero gradient");
  }
  auto apply_h = [&](const Vector& v) {
    return force_fd ? hvp_fd(obj, x, v, g) : hvp(obj, x, v, g);
  };

  QuadModel model;
  model.f0 = f_x;
  const bool has_momentum = d.norm() > 0.0;
  model.j = has_momentum ? 2 : 1;
  model.basis.push_back(-g);
  if (has_momentum) model.basis.push_back(d);

  const Vector hg = apply_h(g);
  model.Q.resize(model.j, model.j);
  model.c.resize(model.j);
  model.G.resize(model.j, model.j);
  model.Q(0, 0) = g.dot(hg);
  model.c(0) = -g.squaredNorm();
  model.G(0, 0) = g.squaredNorm();
  if (has_momentum) {
    const Vector hd = apply_h(d);
    model.Q(0, 1) = -g.dot(hd);
    model.Q(1, 0) = -d.dot(hg);
    model.Q(1, 1) = d.dot(hd);
    model.c(1) = g.dot(d);
    model.G(0, 1) = model.G(1, 0) = -g.dot(d);
    model.G(1, 1) = d.squaredNorm();
  }
  model.Q = 0.5 * (model.Q + model.Q.transpose()).eval();
  if (!model.Q.allFinite() || !model.c.allFinite() || !model.G.allFinite()) {
    throw std::runtime_error("build_hvp: model build failed");
  }
  model.gram_rank = detail::gram_rank_of(model.G);
  return model;
}

/// Builds the model by interpolation: the linear term comes from the exact
/// gradient, and the three curvature entries (Q11, Q12, Q22) are fitted in
/// the least-squares sense from ell extra function evaluations at stepsizes
/// beta_i sampled uniformly on the sphere of radius `scale`. A sample set
/// whose monomial matrix is ill-conditioned (cond > 1e8) is redrawn, up to
/// five attempts. `fixed_samples` is a deterministic test hook overriding
/// the RNG.
inline QuadModel build_interp(
    const Objective& obj, const Vector& x, const Vector& g, const Vector& d,
    double f_x, int ell, double scale, std::mt19937_64& rng,
    const std::vector<Eigen::Vector2d>* fixed_samples = nullptr) {
  if (g.norm() == 0.0) {
    throw std::invalid_argument("build_interp: zero gradient");
  }
  if (ell < 3) throw std::invalid_argument("build_interp: need >= 3 samples");
  if (!(scale > 0.0)) throw std::invalid_argument("build_interp: bad scale");

  QuadModel model;
  model.f0 = f_x;
  const bool has_momentum = d.norm() > 0.0;
  model.j = has_momentum ? 2 : 1;
  model.basis.push_back(-g);
  if (has_momentum) model.basis.push_back(d);

  model.c.resize(model.j);
  model.G.resize(model.j, model.j);
  model.c(0) = -g.squaredNorm();
  model.G(0, 0) = g.squaredNorm();
  if (has_momentum) {
    model.c(1) = g.dot(d);
    model.G(0, 1) = model.G(1, 0) = -g.dot(d);
    model.G(1, 1) = d.squaredNorm();
  }

  if (model.j == 1) {
    // One curvature unknown; probe a fixed ladder of signed stepsizes.
    Matrix P(ell, 1);
    Vector rhs(ell);
    double mag = 1.0;
    for (int i = 0; i < ell; ++i) {
      double beta = scale * mag * (i % 2 == 0 ? 1.0 : -1.0);
      if (fixed_samples) beta = (*fixed_samples)[i](0);
      if (i % 2 == 1) mag *= 0.5;
      P(i, 0) = 0.5 * beta * beta;
      rhs(i) = obj.value(x - beta * g) - f_x - model.c(0) * beta;
    }
    if (!rhs.allFinite()) {
      throw std::runtime_error("build_interp: interpolation degenerate");
    }
    model.Q.resize(1, 1);
    model.Q(0, 0) = (P.transpose() * P).inverse()(0, 0) *
                    (P.transpose() * rhs)(0);
    model.gram_rank = 1;
    return model;
  }

  std::uniform_real_distribution<double> angle(0.0, 2.0 * M_PI);
  constexpr int kMaxAttempts = 5;
  for (int attempt = 0; attempt < kMaxAttempts; ++attempt) {
    std::vector<Eigen::Vector2d> betas(ell);
    if (fixed_samples) {
      if (static_cast<int>(fixed_samples->size()) < ell) {
        throw std::invalid_argument("build_interp: too few fixed samples");
      }
      for (int i = 0; i < ell; ++i) betas[i] = (*fixed_samples)[i];
    } else {
      for (int i = 0; i < ell; ++i) {
        const double phi = angle(rng);
        betas[i] = scale * Eigen::Vector2d(std::cos(phi), std::sin(phi));
      }
    }

    Matrix P(ell, 3);
    for (int i = 0; i < ell; ++i) {
      const double b1 = betas[i](0), b2 = betas[i](1);
      P(i, 0) = 0.5 * b1 * b1;
      P(i, 1) = b1 * b2;
      P(i, 2) = 0.5 * b2 * b2;
    }
    Eigen::JacobiSVD<Matrix> svd(P, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const double cond = svd.singularValues()(0) / svd.singularValues()(2);
    if (!(std::isfinite(cond)) || cond > 1e8) {
      if (fixed_samples) break;  // the hook cannot be redrawn
      continue;
    }

    Vector rhs(ell);
    bool finite = true;
    for (int i = 0; i < ell; ++i) {
      const Vector trial = x - betas[i](0) * g + betas[i](1) * d;
      const double fv = obj.value(trial);
      if (!std::isfinite(fv)) {
        finite = false;
        break;
      }
      rhs(i) = fv - f_x - model.c.dot(betas[i]);
    }
    if (!finite) {
      if (fixed_samples) break;
      continue;
    }

    const Vector q = svd.solve(rhs);
    model.Q.resize(2, 2);
    model.Q(0, 0) = q(0);
    model.Q(0, 1) = model.Q(1, 0) = q(1);
    model.Q(1, 1) = q(2);
    if (!model.Q.allFinite()) {
      if (fixed_samples) break;
      continue;
    }
    model.gram_rank = detail::gram_rank_of(model.G);
    return model;
  }
  throw std::runtime_error("build_interp: interpolation degenerate");
}

}  // namespace drsom
