#pragma once

#include <cmath>
#include <stdexcept>

#include "drsom/objective.hpp"
#include "drsom/types.hpp"

namespace drsom {

enum class LineSearchKind { kArmijoBacktracking, kStrongWolfe };

struct LineSearchSpec {
  LineSearchKind kind = LineSearchKind::kStrongWolfe;
  double c1 = 1e-4;
  double c2 = 0.9;  // 0.9 for quasi-Newton, 0.1 for nonlinear CG
  double shrink = 0.5;
  int max_evals = 60;

  void validate() const {
    if (!(0.0 < c1 && c1 < c2 && c2 < 1.0)) {
      throw std::invalid_argument("LineSearchSpec: need 0 < c1 < c2 < 1");
    }
  }
};

struct LineSearchResult {
  bool success = false;
  double alpha = 0.0;
  double f = 0.0;
  Vector g;  // gradient at x + alpha p
};

inline LineSearchResult armijo_backtracking(const Objective& obj,
                                            const Vector& x, double f0,
                                            const Vector& g0, const Vector& p,
                                            const LineSearchSpec& spec,
                                            double alpha_init = 1.0) {
  LineSearchResult out;
  const double dphi0 = g0.dot(p);
  if (!(dphi0 < 0.0)) return out;
  double a = alpha_init;
  for (int i = 0; i < spec.max_evals; ++i) {
    const double fa = obj.value(x + a * p);
    if (std::isfinite(fa) && fa <= f0 + spec.c1 * a * dphi0) {
      out.success = true;
      out.alpha = a;
      out.f = fa;
      out.g = obj.gradient(x + a * p);
      return out;
    }
    a *= spec.shrink;
  }
  return out;
}

/// Strong Wolfe line search: bracketing with doubling, then a zoom phase
/// using quadratic interpolation with a bisection fallback.
inline LineSearchResult strong_wolfe(const Objective& obj, const Vector& x,
                                     double f0, const Vector& g0,
                                     const Vector& p,
                                     const LineSearchSpec& spec,
                                     double alpha_init = 1.0) {
  LineSearchResult out;
  const double dphi0 = g0.dot(p);
  if (!(dphi0 < 0.0)) return out;

  int evals = 0;
  auto probe = [&](double a, double* fa, Vector* ga) {
    ++evals;
    *fa = obj.value(x + a * p);
    *ga = obj.gradient(x + a * p);
  };

  auto zoom = [&](double lo, double f_lo, double dphi_lo, double hi,
                  double f_hi) -> LineSearchResult {
    LineSearchResult z;
    for (; evals < spec.max_evals;) {
      // Quadratic interpolation on (lo, hi); bisection when it degenerates.
      double a;
      const double dl = hi - lo;
      const double denom = f_hi - f_lo - dphi_lo * dl;
      if (std::abs(denom) > 1e-300) {
        a = lo - 0.5 * dphi_lo * dl * dl / denom;
      } else {
        a = 0.5 * (lo + hi);
      }
      const double lo_b = std::min(lo, hi), hi_b = std::max(lo, hi);
      const double margin = 0.1 * (hi_b - lo_b);
      if (!(a > lo_b + margin && a < hi_b - margin)) a = 0.5 * (lo + hi);

      double fa;
      Vector ga;
      probe(a, &fa, &ga);
      const double dphia = ga.dot(p);
      if (!std::isfinite(fa) || fa > f0 + spec.c1 * a * dphi0 || fa >= f_lo) {
        hi = a;
        f_hi = fa;
      } else {
        if (std::abs(dphia) <= -spec.c2 * dphi0) {
          z.success = true;
          z.alpha = a;
          z.f = fa;
          z.g = ga;
          return z;
        }
        if (dphia * (hi - lo) >= 0.0) {
          hi = lo;
          f_hi = f_lo;
        }
        lo = a;
        f_lo = fa;
        dphi_lo = dphia;
      }
      if (std::abs(hi - lo) < 1e-16 * std::max(1.0, std::abs(lo))) break;
    }
    return z;
  };

  double a_prev = 0.0, f_prev = f0, dphi_prev = dphi0;
  double a = alpha_init;
  for (int i = 0; evals < spec.max_evals; ++i) {
    double fa;
    Vector ga;
    probe(a, &fa, &ga);
    const double dphia = ga.dot(p);
    if (!std::isfinite(fa) || fa > f0 + spec.c1 * a * dphi0 ||
        (i > 0 && fa >= f_prev)) {
      return zoom(a_prev, f_prev, dphi_prev, a, fa);
    }
    if (std::abs(dphia) <= -spec.c2 * dphi0) {
      out.success = true;
      out.alpha = a;
      out.f = fa;
      out.g = ga;
      return out;
    }
    if (dphia >= 0.0) return zoom(a, fa, dphia, a_prev, f_prev);
    a_prev = a;
    f_prev = fa;
    dphi_prev = dphia;
    a *= 2.0;
  }
  return out;
}

inline LineSearchResult line_search(const Objective& obj, const Vector& x,
                                    double f0, const Vector& g0,
                                    const Vector& p,
                                    const LineSearchSpec& spec,
                                    double alpha_init = 1.0) {
  spec.validate();
  switch (spec.kind) {
    case LineSearchKind::kArmijoBacktracking:
      return armijo_backtracking(obj, x, f0, g0, p, spec, alpha_init);
    case LineSearchKind::kStrongWolfe:
      return strong_wolfe(obj, x, f0, g0, p, spec, alpha_init);
  }
  return {};
}

}  // namespace drsom
