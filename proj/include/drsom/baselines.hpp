#pragma once

#include <chrono>
#include <cmath>
#include <deque>

#include "drsom/line_search.hpp"
#include "drsom/objective.hpp"
#include "drsom/report.hpp"
#include "drsom/types.hpp"

namespace drsom {

struct BaselineConfig {
  double tol_g = 1e-5;
  int max_iter = 10000;
  LineSearchSpec ls;
  double time_limit_sec = 0.0;
  int memory = 10;  // L-BFGS history length
};

namespace detail {

/// Shared driver: the callback produces the search direction from the
/// current gradient and the previous accepted data.
template <typename DirectionFn>
RunReport baseline_loop(const Objective& obj, const Vector& x0,
                        const BaselineConfig& cfg, const char* name,
                        DirectionFn direction, bool unit_initial_step = false) {
  const auto t0 = std::chrono::steady_clock::now();
  RunReport report;
  report.solver = name;
  auto elapsed = [&] {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                         t0)
        .count();
  };

  obj.reset_counts();
  Vector x = x0;
  double f = obj.value(x);
  Vector g = obj.gradient(x);

  auto finish = [&](Status status) {
    report.status = status;
    report.x_final = x;
    report.f_final = f;
    report.gnorm_final = g.norm();
    report.iterations = static_cast<int>(report.trace.size());
    report.evals = obj.counts();
    report.wall_seconds = elapsed();
    return report;
  };
  if (!std::isfinite(f)) {
    report.message = "non-finite objective at x0";
    return finish(Status::kError);
  }

  double alpha_prev = 0.0;
  double dphi_prev = 0.0;
  int k = 0;
  while (true) {
    if (g.norm() <= cfg.tol_g) return finish(Status::kConverged);
    if (k >= cfg.max_iter) return finish(Status::kMaxIter);
    if (cfg.time_limit_sec > 0.0 && elapsed() > cfg.time_limit_sec) {
      return finish(Status::kMaxIter);
    }

    Vector p = direction(x, f, g);
    double dphi = g.dot(p);
    if (!(dphi < 0.0)) {  // not a descent direction: restart on -g
      p = -g;
      dphi = g.dot(p);
    }

    // Fletcher-style initial step from the previous accepted slope;
    // quasi-Newton directions start from the unit step instead.
    double a0 = 1.0;
    if (!unit_initial_step) {
      if (alpha_prev > 0.0 && dphi != 0.0) {
        a0 = std::min(1.0, 1.01 * alpha_prev * dphi_prev / dphi);
        if (!(a0 > 0.0)) a0 = 1.0;
      } else {
        a0 = std::min(1.0, 1.0 / (1.0 + g.norm()));
      }
    }

    const LineSearchResult ls = line_search(obj, x, f, g, p, cfg.ls, a0);

    TraceRecord rec;
    rec.k = k;
    rec.f = f;
    rec.gnorm = g.norm();
    rec.rho = 0.0;
    rec.lambda_or_mu = 0.0;
    rec.delta = 0.0;
    rec.step_norm = ls.success ? ls.alpha * p.norm() : 0.0;
    rec.accepted = ls.success;
    report.trace.push_back(rec);
    ++k;

    if (!ls.success) return finish(Status::kStalled);

    x += ls.alpha * p;
    f = ls.f;
    g = ls.g;
    alpha_prev = ls.alpha;
    dphi_prev = dphi;
  }
}

}  // namespace detail

/// Steepest descent with line search.
inline RunReport gd_minimize(const Objective& obj, const Vector& x0,
                             const BaselineConfig& cfg) {
  return detail::baseline_loop(obj, x0, cfg, "gd",
                               [](const Vector&, double, const Vector& g) {
                                 return Vector(-g);
                               });
}

/// Polak-Ribiere+ nonlinear conjugate gradient with restart on loss of
/// descent.
inline RunReport cg_minimize(const Objective& obj, const Vector& x0,
                             const BaselineConfig& cfg) {
  Vector g_prev;
  Vector p_prev;
  auto dir = [&](const Vector&, double, const Vector& g) -> Vector {
    Vector p;
    if (g_prev.size() == 0) {
      p = -g;
    } else {
      const double beta =
          std::max(0.0, g.dot(g - g_prev) / g_prev.squaredNorm());
      p = -g + beta * p_prev;
      if (g.dot(p) >= -1e-12 * g.norm() * p.norm()) p = -g;
    }
    g_prev = g;
    p_prev = p;
    return p;
  };
  BaselineConfig c = cfg;
  if (c.ls.kind == LineSearchKind::kStrongWolfe && c.ls.c2 > 0.1) c.ls.c2 = 0.1;
  return detail::baseline_loop(obj, x0, c, "cg", dir);
}

/// L-BFGS with the standard two-loop recursion. Curvature pairs with
/// s'y <= 1e-12 |s||y| are skipped.
inline RunReport lbfgs_minimize(const Objective& obj, const Vector& x0,
                                const BaselineConfig& cfg) {
  struct Pair {
    Vector s, y;
    double rho;
  };
  std::deque<Pair> history;
  Vector x_prev, g_prev;

  auto dir = [&](const Vector& x, double, const Vector& g) -> Vector {
    if (x_prev.size() != 0) {
      Vector s = x - x_prev;
      Vector y = g - g_prev;
      const double sy = s.dot(y);
      if (sy > 1e-12 * s.norm() * y.norm()) {
        history.push_back({s, y, 1.0 / sy});
        while (static_cast<int>(history.size()) > std::max(0, cfg.memory)) {
          history.pop_front();
        }
      }
    }
    x_prev = x;
    g_prev = g;

    Vector q = -g;
    std::vector<double> a(history.size());
    for (int i = static_cast<int>(history.size()) - 1; i >= 0; --i) {
      a[i] = history[i].rho * history[i].s.dot(q);
      q -= a[i] * history[i].y;
    }
    if (!history.empty()) {
      const auto& last = history.back();
      q *= last.s.dot(last.y) / last.y.squaredNorm();
    }
    for (std::size_t i = 0; i < history.size(); ++i) {
      const double b = history[i].rho * history[i].y.dot(q);
      q += (a[i] - b) * history[i].s;
    }
    return q;
  };
  return detail::baseline_loop(obj, x0, cfg, "lbfgs", dir,
                               /*unit_initial_step=*/true);
}

}  // namespace drsom
