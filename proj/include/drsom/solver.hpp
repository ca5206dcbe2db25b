#pragma once

#include <chrono>
#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <stdexcept>

#include "drsom/corrector.hpp"
#include "drsom/model.hpp"
#include "drsom/objective.hpp"
#include "drsom/report.hpp"
#include "drsom/trs.hpp"
#include "drsom/types.hpp"

namespace drsom {

enum class Mode { kTrustRadius, kRadiusFree, kFixedRadius };

inline const char* to_string(Mode m) {
  switch (m) {
    case Mode::kTrustRadius: return "tr";
    case Mode::kRadiusFree: return "rf";
    case Mode::kFixedRadius: return "fixed";
  }
  return "?";
}

struct CorrectorConfig {
  bool enabled = false;
  int period = 5;        // at most one corrector pass every `period` iters
  double c_bound = 1e2;  // residual bound constant
  int j_max = 10;        // subspace dimension cap
};

struct SolverConfig {
  Mode mode = Mode::kRadiusFree;
  ModelMethod model;
  double tol_g = 1e-5;
  int max_iter = 10000;
  double eta = 0.09;   // acceptance floor (ignored in fixed-radius mode)
  double zeta1 = 0.25;
  double zeta2 = 0.75;
  double beta1 = 0.5;  // shrink factor
  double beta2 = 2.0;  // expand factor
  double gamma0 = 1e-3;
  double gamma_min = 1e-12;
  double mu_cap = 1e3;  // additive bound on the regularizer interval
  double delta0 = 1.0;
  double delta_max = 1e10;
  double m_est = 1.0;  // Hessian-Lipschitz estimate, fixed-radius mode only
  CorrectorConfig corrector;
  double time_limit_sec = 0.0;  // 0 = unlimited; checked between iterations
  int max_consecutive_rejects = 50;
  std::uint64_t rng_seed = 0;  // drives interpolation sampling

  void validate() const {
    if (!(beta1 < 1.0 && 1.0 < beta2)) {
      throw std::invalid_argument("SolverConfig: need beta1 < 1 < beta2");
    }
    if (!(0.0 <= eta && eta < zeta1 && zeta1 < zeta2 && zeta2 <= 1.0)) {
      throw std::invalid_argument(
          "SolverConfig: need 0 <= eta < zeta1 < zeta2 <= 1");
    }
    if (!(tol_g > 0.0) || !(delta0 > 0.0) || !(delta_max >= delta0) ||
        !(gamma0 > 0.0) || !(gamma_min > 0.0) || !(m_est > 0.0) ||
        max_iter < 0) {
      throw std::invalid_argument("SolverConfig: invalid tolerances");
    }
    if (model.interp_samples < 3) {
      throw std::invalid_argument("SolverConfig: interp_samples >= 3");
    }
  }
};

struct SolverState {
  Vector x;
  double f = 0.0;
  Vector g;
  Vector d;  // momentum x_k - x_{k-1}; unchanged by rejected steps
  double delta = 1.0;
  double mu = 0.0;
  double gamma = 1e-3;
  int k = 0;
  double last_rho = 0.0;
  double last_lambda = 0.0;
};

namespace detail {

inline double shrink_gamma(double gamma, double beta1, double gamma_min) {
  return std::max(gamma_min, std::min(std::sqrt(gamma), beta1 * gamma));
}

}  // namespace detail

/// One DRSOM iteration: model build, subproblem solve, acceptance test and
/// radius/regularizer adaptation. Returns whether the trial step was
/// accepted; the trace record describes the attempt (f and gnorm at the
/// iterate the step started from). When `use_corrector` is set, the 2-D
/// step is refined by the subspace corrector before the ratio test.
inline TraceRecord step(const Objective& obj, SolverState& state,
                        const SolverConfig& cfg, std::mt19937_64& rng,
                        bool use_corrector = false) {
  TraceRecord rec;
  rec.k = state.k;
  rec.f = state.f;
  rec.gnorm = state.g.norm();

  // Model over span{-g, d}.
  QuadModel model;
  switch (cfg.model.tag) {
    case ModelMethodTag::kHvpExact:
      model = build_hvp(obj, state.x, state.f, state.g, state.d, false);
      break;
    case ModelMethodTag::kHvpFd:
      model = build_hvp(obj, state.x, state.f, state.g, state.d, true);
      break;
    case ModelMethodTag::kInterpolation: {
      double scale = cfg.model.interp_scale;
      if (cfg.model.interp_scale_with_radius &&
          cfg.mode != Mode::kRadiusFree) {
        scale = std::min(scale, state.delta);
      }
      model = build_interp(obj, state.x, state.g, state.d, state.f,
                           cfg.model.interp_samples, scale, rng);
      break;
    }
  }

  // Subproblem.
  Vector alpha;
  double predicted = 0.0;
  double lambda_or_mu = 0.0;
  bool on_boundary = false;
  if (cfg.mode == Mode::kRadiusFree) {
    const Vector eigs = subspace_eigs(model.Q, model.G);
    const double mu1 = eigs(0);
    const double mu2 = eigs(eigs.size() - 1);
    const double mu_lower = std::max(0.0, -mu1);
    const double mu_upper = std::max(mu_lower, mu2) + cfg.mu_cap;
    double mu = state.gamma * mu_upper +
                std::max(1.0 - state.gamma, 0.0) * mu_lower;
    mu = std::max(mu, mu_lower + 1e-12 * (1.0 + std::abs(mu2)));
    alpha = solve_regularized(model.Q, model.c, model.G, mu);
    predicted = -(model.c.dot(alpha) + 0.5 * alpha.dot(model.Q * alpha));
    state.mu = mu;
    lambda_or_mu = mu;
  } else {
    const TrsSolution sol =
        solve_trs(model.Q, model.c, model.G, state.delta);
    alpha = sol.alpha;
    predicted = sol.model_decrease;
    lambda_or_mu = sol.lambda;
    on_boundary = sol.on_boundary;
    state.last_lambda = sol.lambda;
  }

  Vector trial_step = model.lift(alpha);

  // Optional corrector refinement of the incumbent step.
  if (use_corrector && trial_step.norm() > 0.0) {
    const double radius =
        cfg.mode == Mode::kRadiusFree ? 1e9 : state.delta;
    const CorrectorResult cor = corrector_step(
        obj, state.x, state.f, state.g, trial_step, radius, cfg.tol_g,
        cfg.corrector.c_bound, cfg.corrector.j_max);
    if (cor.step.size() == state.x.size() && cor.model_decrease > 0.0) {
      trial_step = cor.step;
      predicted = cor.model_decrease;
      lambda_or_mu = cor.lambda;
      if (cfg.mode != Mode::kRadiusFree) state.last_lambda = cor.lambda;
      on_boundary = false;
    }
  }

  rec.lambda_or_mu = lambda_or_mu;
  rec.delta = cfg.mode == Mode::kRadiusFree ? 0.0 : state.delta;
  rec.step_norm = trial_step.norm();
  rec.model_decrease = predicted;
  rec.on_boundary = on_boundary;

  const double f_trial = obj.value(state.x + trial_step);
  const bool degenerate = !(predicted > 0.0) || !std::isfinite(f_trial);
  double rho = -std::numeric_limits<double>::infinity();
  if (!degenerate) rho = (state.f - f_trial) / predicted;
  rec.rho = rho;
  state.last_rho = rho;

  const bool accept =
      !degenerate && (cfg.mode == Mode::kFixedRadius || rho > cfg.eta);
  if (accept) {
    state.x += trial_step;
    state.f = f_trial;
    state.g = obj.gradient(state.x);
    state.d = trial_step;
  }
  rec.accepted = accept;

  // Adaptation.
  if (cfg.mode == Mode::kTrustRadius) {
    if (degenerate || rho < cfg.zeta1) {
      state.delta *= cfg.beta1;
    } else if (rho > cfg.zeta2) {
      state.delta = std::min(cfg.beta2 * state.delta, cfg.delta_max);
    }
  } else if (cfg.mode == Mode::kRadiusFree) {
    if (degenerate || rho <= cfg.zeta1) {
      state.gamma = std::min(cfg.beta2 * state.gamma, 1e12);
    } else if (rho > cfg.zeta2) {
      state.gamma =
          detail::shrink_gamma(state.gamma, cfg.beta1, cfg.gamma_min);
    }
  }

  ++state.k;
  return rec;
}

/// Full DRSOM run from x0: iterates `step` until the gradient tolerance is
/// met, the iteration budget is exhausted, or the configured number of
/// consecutive rejections signals a stall.
inline RunReport minimize(const Objective& obj, const Vector& x0,
                          const SolverConfig& cfg) {
  cfg.validate();
  const auto t0 = std::chrono::steady_clock::now();
  RunReport report;
  report.solver = "drsom";

  auto elapsed = [&] {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                         t0)
        .count();
  };
  auto finish = [&](Status status, const SolverState& st) {
    report.status = status;
    report.x_final = st.x;
    report.f_final = st.f;
    report.gnorm_final = st.g.norm();
    report.iterations = static_cast<int>(report.trace.size());
    report.evals = obj.counts();
    report.wall_seconds = elapsed();
    return report;
  };

  obj.reset_counts();
  SolverState state;
  state.x = x0;
  if (x0.size() != obj.dim()) {
    report.status = Status::kError;
    report.message = "x0 dimension mismatch";
    return report;
  }
  state.f = obj.value(x0);
  if (!std::isfinite(state.f)) {
    report.status = Status::kError;
    report.message = "non-finite objective at x0";
    report.x_final = x0;
    report.evals = obj.counts();
    return report;
  }
  state.g = obj.gradient(x0);
  state.d = Vector::Zero(obj.dim());
  state.gamma = cfg.gamma0;
  state.delta = cfg.mode == Mode::kFixedRadius
                    ? 2.0 * std::sqrt(cfg.tol_g) / cfg.m_est
                    : cfg.delta0;

  std::mt19937_64 rng(cfg.rng_seed);
  int consecutive_rejects = 0;
  bool corrector_armed = false;
  int last_corrector_iter = std::numeric_limits<int>::min() / 2;
  const double sqrt_tol = std::sqrt(cfg.tol_g);

  try {
    while (true) {
      if (state.g.norm() <= cfg.tol_g) return finish(Status::kConverged, state);
      if (state.k >= cfg.max_iter) return finish(Status::kMaxIter, state);
      if (cfg.time_limit_sec > 0.0 && elapsed() > cfg.time_limit_sec) {
        return finish(Status::kMaxIter, state);  // budget exhausted
      }

      const bool use_corrector =
          cfg.corrector.enabled && corrector_armed &&
          state.k - last_corrector_iter >= cfg.corrector.period;
      if (use_corrector) last_corrector_iter = state.k;

      const TraceRecord rec = step(obj, state, cfg, rng, use_corrector);
      report.trace.push_back(rec);

      if (rec.accepted) {
        consecutive_rejects = 0;
        corrector_armed = rec.lambda_or_mu <= sqrt_tol;
      } else {
        if (++consecutive_rejects >= cfg.max_consecutive_rejects) {
          return finish(Status::kStalled, state);
        }
      }
    }
  } catch (const std::exception& e) {
    report.message = e.what();
    return finish(Status::kError, state);
  }
}

}  // namespace drsom
