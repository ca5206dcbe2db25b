// Minimal library usage: minimize the 2-D Rosenbrock function with the
// radius-free DRSOM and print the per-iteration trace.

#include <cstdio>

#include "drsom/drsom.hpp"

int main() {
  const drsom::Objective obj = drsom::rosenbrock_objective(2);
  drsom::Vector x0(2);
  x0 << -1.2, 1.0;

  drsom::SolverConfig cfg;
  cfg.mode = drsom::Mode::kRadiusFree;
  cfg.model.tag = drsom::ModelMethodTag::kInterpolation;
  cfg.tol_g = 1e-6;

  const drsom::RunReport report = drsom::minimize(obj, x0, cfg);

  std::printf("%4s %14s %12s %10s\n", "k", "f", "|g|", "accepted");
  for (const auto& rec : report.trace) {
    std::printf("%4d %14.6e %12.4e %10s\n", rec.k, rec.f, rec.gnorm,
                rec.accepted ? "yes" : "no");
  }
  std::printf("status=%s iterations=%d f=%.3e |g|=%.3e  (f-evals %ld, "
              "g-evals %ld)\n",
              drsom::to_string(report.status), report.iterations,
              report.f_final, report.gnorm_final, report.evals.n_f,
              report.evals.n_g);
  return report.status == drsom::Status::kConverged ? 0 : 1;
}
