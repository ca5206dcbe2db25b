#pragma once

#include <cmath>
#include <cstdint>
#include <memory>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "drsom/objective.hpp"
#include "drsom/types.hpp"

namespace drsom {

// ---------------------------------------------------------------------------
// Generic builders
// ---------------------------------------------------------------------------

/// f(x) = 1/2 x'Ax + a'x with exact HVP.
inline Objective quadratic_objective(const Matrix& A, const Vector& a,
                                     std::string name = "quadratic") {
  auto Ap = std::make_shared<Matrix>(0.5 * (A + A.transpose()));
  auto ap = std::make_shared<Vector>(a);
  return Objective(
      static_cast<int>(A.rows()),
      [Ap, ap](const Vector& x) {
        return 0.5 * x.dot(*Ap * x) + ap->dot(x);
      },
      [Ap, ap](const Vector& x) { return Vector(*Ap * x + *ap); },
      [Ap](const Vector&, const Vector& v) { return Vector(*Ap * v); },
      std::move(name));
}

/// Separable strongly convex quartic centered at xstar:
///   f(x) = sum_i 1/2 a_i z_i^2 + 1/4 b z_i^4,  z = x - xstar.
/// On |z|_inf <= R its Hessian is Lipschitz with constant 6 b R.
inline Objective convex_quartic(const Vector& a, double b,
                                const Vector& xstar) {
  auto ap = std::make_shared<Vector>(a);
  auto xs = std::make_shared<Vector>(xstar);
  const int n = static_cast<int>(a.size());
  return Objective(
      n,
      [ap, xs, b](const Vector& x) {
        const Vector z = x - *xs;
        double f = 0.0;
        for (int i = 0; i < z.size(); ++i) {
          f += 0.5 * (*ap)(i)*z(i) * z(i) +
               0.25 * b * z(i) * z(i) * z(i) * z(i);
        }
        return f;
      },
      [ap, xs, b](const Vector& x) {
        const Vector z = x - *xs;
        Vector g(z.size());
        for (int i = 0; i < z.size(); ++i) {
          g(i) = (*ap)(i)*z(i) + b * z(i) * z(i) * z(i);
        }
        return g;
      },
      [ap, xs, b](const Vector& x, const Vector& v) {
        const Vector z = x - *xs;
        Vector hv(z.size());
        for (int i = 0; i < z.size(); ++i) {
          hv(i) = ((*ap)(i) + 3.0 * b * z(i) * z(i)) * v(i);
        }
        return hv;
      },
      "convex_quartic");
}

// ---------------------------------------------------------------------------
// L2-Lp regularized least squares with smoothed penalty
// ---------------------------------------------------------------------------

/// min_x 1/2 |Ax-b|^2 + lambda sum_i s(x_i, eps)^p, 0 < p < 1, where s is
/// a quadratic cap of |x| below eps (making the penalty C^1 everywhere and
/// C^2 off the measure-zero set |x_i| = eps).
struct LpInstance {
  int n = 0;  // rows of A
  int m = 0;  // cols of A == problem dimension
  double r = 0.0;
  double p = 0.5;
  double eps_smooth = 0.1;
  double lambda_reg = 0.0;
  std::uint64_t seed = 0;
  Matrix A;
  Vector b;
};

inline LpInstance lp_generate(int n, int m, double r, double p,
                              double eps_smooth, std::uint64_t seed) {
  if (n <= 0 || m <= 0) throw std::invalid_argument("lp_generate: bad size");
  if (!(r > 0.0 && r <= 1.0)) {
    throw std::invalid_argument("lp_generate: sparsity r must be in (0, 1]");
  }
  if (!(p > 0.0 && p < 1.0)) {
    throw std::invalid_argument("lp_generate: p must be in (0, 1)");
  }
  if (!(eps_smooth > 0.0)) {
    throw std::invalid_argument("lp_generate: eps_smooth must be positive");
  }
  LpInstance inst;
  inst.n = n;
  inst.m = m;
  inst.r = r;
  inst.p = p;
  inst.eps_smooth = eps_smooth;
  inst.seed = seed;

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> unif(0.0, 1.0);

  inst.A.resize(n, m);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < m; ++j) {
      const double value = normal(rng);
      const bool keep = unif(rng) < r;
      inst.A(i, j) = keep ? value : 0.0;
    }
  }
  Vector v(m);
  const double sigma = 1.0 / std::sqrt(static_cast<double>(n));
  for (int j = 0; j < m; ++j) {
    const bool zero = unif(rng) < 0.5;
    const double value = normal(rng) * sigma;
    v(j) = zero ? 0.0 : value;
  }
  Vector delta(n);
  for (int i = 0; i < n; ++i) delta(i) = normal(rng);
  inst.b = inst.A * v + delta;
  inst.lambda_reg = 0.2 * (inst.A.transpose() * inst.b).cwiseAbs().maxCoeff();
  return inst;
}

namespace detail {

inline double lp_s(double x, double eps) {
  const double ax = std::abs(x);
  return ax > eps ? ax : x * x / (2.0 * eps) + 0.5 * eps;
}

inline double lp_psi(double x, double eps, double p) {
  return std::pow(lp_s(x, eps), p);
}

inline double lp_dpsi(double x, double eps, double p) {
  const double s = lp_s(x, eps);
  const double ds = std::abs(x) > eps ? (x > 0.0 ? 1.0 : -1.0) : x / eps;
  return p * std::pow(s, p - 1.0) * ds;
}

inline double lp_d2psi(double x, double eps, double p) {
  const double s = lp_s(x, eps);
  if (std::abs(x) > eps) {
    return p * (p - 1.0) * std::pow(s, p - 2.0);
  }
  const double ds = x / eps;
  return p * (p - 1.0) * std::pow(s, p - 2.0) * ds * ds +
         p * std::pow(s, p - 1.0) / eps;
}

}  // namespace detail

inline Objective lp_objective(const LpInstance& inst) {
  auto ip = std::make_shared<const LpInstance>(inst);
  return Objective(
      inst.m,
      [ip](const Vector& x) {
        const Vector res = ip->A * x - ip->b;
        double pen = 0.0;
        for (int i = 0; i < x.size(); ++i) {
          pen += detail::lp_psi(x(i), ip->eps_smooth, ip->p);
        }
        return 0.5 * res.squaredNorm() + ip->lambda_reg * pen;
      },
      [ip](const Vector& x) {
        Vector g = ip->A.transpose() * (ip->A * x - ip->b);
        for (int i = 0; i < x.size(); ++i) {
          g(i) += ip->lambda_reg * detail::lp_dpsi(x(i), ip->eps_smooth, ip->p);
        }
        return g;
      },
      [ip](const Vector& x, const Vector& v) {
        Vector hv = ip->A.transpose() * (ip->A * v);
        for (int i = 0; i < x.size(); ++i) {
          hv(i) +=
              ip->lambda_reg * detail::lp_d2psi(x(i), ip->eps_smooth, ip->p) *
              v(i);
        }
        return hv;
      },
      "l2lp");
}

// ---------------------------------------------------------------------------
// Sensor network localization (nonlinear least squares form)
// ---------------------------------------------------------------------------

struct SnlEdge {
  int i = 0;  // sensor index (or anchor index for anchor edges)
  int j = 0;  // sensor index
  double dist = 0.0;
};

struct SnlInstance {
  int n = 0;  // total points
  int m = 0;  // anchors (the first m generated points)
  double radio_range = 0.5;
  double noise = 0.05;
  std::uint64_t seed = 0;
  Matrix anchors;               // m x 2
  Matrix truth;                 // (n - m) x 2, evaluation only
  std::vector<SnlEdge> sensor_edges;  // sensor-sensor, i < j
  std::vector<SnlEdge> anchor_edges;  // anchor i -- sensor j

  int num_sensors() const { return n - m; }
};

inline SnlInstance snl_generate(int n, int m, double r_d, double noise_nf,
                                std::uint64_t seed) {
  if (n <= 0 || m < 0 || m >= n) {
    throw std::invalid_argument("snl_generate: need 0 <= m < n");
  }
  if (!(r_d > 0.0)) throw std::invalid_argument("snl_generate: bad radio range");
  SnlInstance inst;
  inst.n = n;
  inst.m = m;
  inst.radio_range = r_d;
  inst.noise = noise_nf;
  inst.seed = seed;

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::normal_distribution<double> normal(0.0, 1.0);

  Matrix pts(n, 2);
  for (int i = 0; i < n; ++i) {
    pts(i, 0) = unif(rng);
    pts(i, 1) = unif(rng);
  }
  inst.anchors = pts.topRows(m);
  inst.truth = pts.bottomRows(n - m);

  const int ns = n - m;
  auto noisy = [&](double true_dist) {
    const double measured = true_dist * (1.0 + noise_nf * normal(rng));
    return std::max(measured, 1e-6);
  };
  for (int i = 0; i < ns; ++i) {
    for (int j = i + 1; j < ns; ++j) {
      const double dist = (inst.truth.row(i) - inst.truth.row(j)).norm();
      if (dist <= r_d) inst.sensor_edges.push_back({i, j, noisy(dist)});
    }
  }
  for (int k = 0; k < m; ++k) {
    for (int j = 0; j < ns; ++j) {
      const double dist = (inst.anchors.row(k) - inst.truth.row(j)).norm();
      if (dist <= r_d) inst.anchor_edges.push_back({k, j, noisy(dist)});
    }
  }
  return inst;
}

/// Objective over R^{2(n-m)}; sensor j occupies coordinates (2j, 2j+1).
inline Objective snl_objective(const SnlInstance& inst) {
  auto ip = std::make_shared<const SnlInstance>(inst);
  const int dim = 2 * inst.num_sensors();
  return Objective(
      dim,
      [ip](const Vector& x) {
        double f = 0.0;
        for (const auto& e : ip->sensor_edges) {
          const double dx = x(2 * e.i) - x(2 * e.j);
          const double dy = x(2 * e.i + 1) - x(2 * e.j + 1);
          const double t = dx * dx + dy * dy - e.dist * e.dist;
          f += t * t;
        }
        for (const auto& e : ip->anchor_edges) {
          const double dx = x(2 * e.j) - ip->anchors(e.i, 0);
          const double dy = x(2 * e.j + 1) - ip->anchors(e.i, 1);
          const double t = dx * dx + dy * dy - e.dist * e.dist;
          f += t * t;
        }
        return f;
      },
      [ip, dim](const Vector& x) {
        Vector g = Vector::Zero(dim);
        for (const auto& e : ip->sensor_edges) {
          const double dx = x(2 * e.i) - x(2 * e.j);
          const double dy = x(2 * e.i + 1) - x(2 * e.j + 1);
          const double t = dx * dx + dy * dy - e.dist * e.dist;
          g(2 * e.i) += 4.0 * t * dx;
          g(2 * e.i + 1) += 4.0 * t * dy;
          g(2 * e.j) -= 4.0 * t * dx;
          g(2 * e.j + 1) -= 4.0 * t * dy;
        }
        for (const auto& e : ip->anchor_edges) {
          const double dx = x(2 * e.j) - ip->anchors(e.i, 0);
          const double dy = x(2 * e.j + 1) - ip->anchors(e.i, 1);
          const double t = dx * dx + dy * dy - e.dist * e.dist;
          g(2 * e.j) += 4.0 * t * dx;
          g(2 * e.j + 1) += 4.0 * t * dy;
        }
        return g;
      },
      [ip, dim](const Vector& x, const Vector& v) {
        Vector hv = Vector::Zero(dim);
        for (const auto& e : ip->sensor_edges) {
          const double dx = x(2 * e.i) - x(2 * e.j);
          const double dy = x(2 * e.i + 1) - x(2 * e.j + 1);
          const double vx = v(2 * e.i) - v(2 * e.j);
          const double vy = v(2 * e.i + 1) - v(2 * e.j + 1);
          const double t = dx * dx + dy * dy - e.dist * e.dist;
          const double uv = dx * vx + dy * vy;
          const double hx = 4.0 * (2.0 * uv * dx + t * vx);
          const double hy = 4.0 * (2.0 * uv * dy + t * vy);
          hv(2 * e.i) += hx;
          hv(2 * e.i + 1) += hy;
          hv(2 * e.j) -= hx;
          hv(2 * e.j + 1) -= hy;
        }
        for (const auto& e : ip->anchor_edges) {
          const double dx = x(2 * e.j) - ip->anchors(e.i, 0);
          const double dy = x(2 * e.j + 1) - ip->anchors(e.i, 1);
          const double vx = v(2 * e.j);
          const double vy = v(2 * e.j + 1);
          const double t = dx * dx + dy * dy - e.dist * e.dist;
          const double uv = dx * vx + dy * vy;
          hv(2 * e.j) += 4.0 * (2.0 * uv * dx + t * vx);
          hv(2 * e.j + 1) += 4.0 * (2.0 * uv * dy + t * vy);
        }
        return hv;
      },
      "snl");
}

/// Root-mean-square positional error of a candidate layout against the
/// ground truth (evaluation only; the truth never enters the objective).
inline double snl_rmse(const SnlInstance& inst, const Vector& x) {
  const int ns = inst.num_sensors();
  double acc = 0.0;
  for (int j = 0; j < ns; ++j) {
    const double dx = x(2 * j) - inst.truth(j, 0);
    const double dy = x(2 * j + 1) - inst.truth(j, 1);
    acc += dx * dx + dy * dy;
  }
  return std::sqrt(acc / ns);
}

// ---------------------------------------------------------------------------
// Classic unconstrained test functions
// ---------------------------------------------------------------------------

inline Objective rosenbrock_objective(int n) {
  if (n < 2 || n % 2 != 0) {
    throw std::invalid_argument("rosenbrock: n must be even and >= 2");
  }
  return Objective(
      n,
      [](const Vector& x) {
        double f = 0.0;
        for (int i = 0; i + 1 < x.size(); i += 2) {
          const double t = x(i + 1) - x(i) * x(i);
          const double u = 1.0 - x(i);
          f += 100.0 * t * t + u * u;
        }
        return f;
      },
      [](const Vector& x) {
        Vector g = Vector::Zero(x.size());
        for (int i = 0; i + 1 < x.size(); i += 2) {
          const double t = x(i + 1) - x(i) * x(i);
          g(i) = -400.0 * x(i) * t - 2.0 * (1.0 - x(i));
          g(i + 1) = 200.0 * t;
        }
        return g;
      },
      [](const Vector& x, const Vector& v) {
        Vector hv = Vector::Zero(x.size());
        for (int i = 0; i + 1 < x.size(); i += 2) {
          const double h11 = -400.0 * (x(i + 1) - 3.0 * x(i) * x(i)) + 2.0;
          const double h12 = -400.0 * x(i);
          hv(i) = h11 * v(i) + h12 * v(i + 1);
          hv(i + 1) = h12 * v(i) + 200.0 * v(i + 1);
        }
        return hv;
      },
      "rosenbrock");
}

inline Objective ill_conditioned_quadratic(int n, double cond) {
  Vector eigs(n);
  for (int i = 0; i < n; ++i) {
    eigs(i) = std::pow(cond, static_cast<double>(i) / (n - 1));
  }
  return quadratic_objective(Matrix(eigs.asDiagonal()), Vector::Zero(n),
                             "ill_quadratic");
}

inline Objective beale_objective() {
  static const double kC[3] = {1.5, 2.25, 2.625};
  return Objective(
      2,
      [](const Vector& z) {
        const double x = z(0), y = z(1);
        double f = 0.0;
        for (int k = 1; k <= 3; ++k) {
          const double e = kC[k - 1] - x + x * std::pow(y, k);
          f += e * e;
        }
        return f;
      },
      [](const Vector& z) {
        const double x = z(0), y = z(1);
        Vector g = Vector::Zero(2);
        for (int k = 1; k <= 3; ++k) {
          const double yk = std::pow(y, k);
          const double e = kC[k - 1] - x + x * yk;
          g(0) += 2.0 * e * (yk - 1.0);
          g(1) += 2.0 * e * k * x * std::pow(y, k - 1);
        }
        return g;
      },
      [](const Vector& z, const Vector& v) {
        const double x = z(0), y = z(1);
        Matrix H = Matrix::Zero(2, 2);
        for (int k = 1; k <= 3; ++k) {
          const double yk = std::pow(y, k);
          const double e = kC[k - 1] - x + x * yk;
          const double ex = yk - 1.0;
          const double ey = k * x * std::pow(y, k - 1);
          const double exy = k * std::pow(y, k - 1);
          const double eyy =
              (k >= 2) ? k * (k - 1) * x * std::pow(y, k - 2) : 0.0;
          H(0, 0) += 2.0 * ex * ex;
          H(0, 1) += 2.0 * (ex * ey + e * exy);
          H(1, 1) += 2.0 * (ey * ey + e * eyy);
        }
        H(1, 0) = H(0, 1);
        return Vector(H * v);
      },
      "beale");
}

inline Objective himmelblau_objective() {
  return Objective(
      2,
      [](const Vector& z) {
        const double u = z(0) * z(0) + z(1) - 11.0;
        const double w = z(0) + z(1) * z(1) - 7.0;
        return u * u + w * w;
      },
      [](const Vector& z) {
        const double u = z(0) * z(0) + z(1) - 11.0;
        const double w = z(0) + z(1) * z(1) - 7.0;
        Vector g(2);
        g(0) = 4.0 * z(0) * u + 2.0 * w;
        g(1) = 2.0 * u + 4.0 * z(1) * w;
        return g;
      },
      [](const Vector& z, const Vector& v) {
        const double u = z(0) * z(0) + z(1) - 11.0;
        const double w = z(0) + z(1) * z(1) - 7.0;
        Matrix H(2, 2);
        H(0, 0) = 4.0 * u + 8.0 * z(0) * z(0) + 2.0;
        H(0, 1) = 4.0 * z(0) + 4.0 * z(1);
        H(1, 0) = H(0, 1);
        H(1, 1) = 4.0 * w + 8.0 * z(1) * z(1) + 2.0;
        return Vector(H * v);
      },
      "himmelblau");
}

/// Seeded random double-well quartic with a small psd coupling term:
///   f(x) = sum_i 1/4 (x_i^2 - a_i)^2 + 1/2 x'Cx.
inline Objective nonconvex_quartic(int n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> ua(0.5, 2.0);
  std::normal_distribution<double> normal(0.0, 1.0);
  auto a = std::make_shared<Vector>(n);
  for (int i = 0; i < n; ++i) (*a)(i) = ua(rng);
  Matrix B(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) B(i, j) = normal(rng);
  }
  auto C = std::make_shared<Matrix>((0.1 / n) * (B.transpose() * B));
  return Objective(
      n,
      [a, C](const Vector& x) {
        double f = 0.5 * x.dot(*C * x);
        for (int i = 0; i < x.size(); ++i) {
          const double t = x(i) * x(i) - (*a)(i);
          f += 0.25 * t * t;
        }
        return f;
      },
      [a, C](const Vector& x) {
        Vector g = *C * x;
        for (int i = 0; i < x.size(); ++i) {
          g(i) += (x(i) * x(i) - (*a)(i)) * x(i);
        }
        return g;
      },
      [a, C](const Vector& x, const Vector& v) {
        Vector hv = *C * v;
        for (int i = 0; i < x.size(); ++i) {
          hv(i) += (3.0 * x(i) * x(i) - (*a)(i)) * v(i);
        }
        return hv;
      },
      "nonconvex_quartic");
}

struct NamedProblem {
  std::string name;
  Objective obj;
  Vector x0;
  std::vector<Vector> minima;  // known minimizers, possibly empty
};

inline std::vector<NamedProblem> classic_suite() {
  std::vector<NamedProblem> suite;

  {
    Vector x0(2);
    x0 << -1.2, 1.0;
    suite.push_back(
        {"rosenbrock2", rosenbrock_objective(2), x0, {Vector::Ones(2)}});
  }
  {
    Vector x0(10);
    for (int i = 0; i < 10; i += 2) {
      x0(i) = -1.2;
      x0(i + 1) = 1.0;
    }
    suite.push_back(
        {"rosenbrock10", rosenbrock_objective(10), x0, {Vector::Ones(10)}});
  }
  suite.push_back({"ill_quadratic", ill_conditioned_quadratic(20, 1e4),
                   Vector::Ones(20),
                   {Vector::Zero(20)}});
  {
    Vector x0(2);
    x0 << 1.0, 1.0;
    Vector xmin(2);
    xmin << 3.0, 0.5;
    suite.push_back({"beale", beale_objective(), x0, {xmin}});
  }
  {
    Vector x0(2);
    x0 << 0.0, 0.0;
    std::vector<Vector> minima;
    const double pts[4][2] = {{3.0, 2.0},
                              {-2.805118086952745, 3.131312518250573},
                              {-3.779310253377747, -3.283185991286170},
                              {3.584428340330492, -1.848126526964404}};
    for (auto& pt : pts) {
      Vector v(2);
      v << pt[0], pt[1];
      minima.push_back(v);
    }
    suite.push_back({"himmelblau", himmelblau_objective(), x0, minima});
  }
  suite.push_back({"nonconvex_quartic", nonconvex_quartic(12, 3),
                   0.5 * Vector::Ones(12),
                   {}});
  return suite;
}

}  // namespace drsom
