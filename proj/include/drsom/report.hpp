#pragma once

#include <limits>
#include <string>
#include <vector>

#include "drsom/objective.hpp"
#include "drsom/types.hpp"

namespace drsom {

enum class Status { kConverged, kMaxIter, kStalled, kError };

inline const char* to_string(Status s) {
  switch (s) {
    case Status::kConverged: return "converged";
    case Status::kMaxIter: return "max_iter";
    case Status::kStalled: return "stalled";
    case Status::kError: return "error";
  }
  return "error";
}

/// One row per attempted step. f and gnorm are taken at the iterate the
/// step was attempted from. The CSV schema exposes the first eight fields;
/// the remaining ones are in-memory diagnostics.
struct TraceRecord {
  int k = 0;
  double f = 0.0;
  double gnorm = 0.0;
  double lambda_or_mu = 0.0;
  double delta = 0.0;
  double rho = 0.0;
  double step_norm = 0.0;
  bool accepted = false;
  // diagnostics, not serialized
  double model_decrease = 0.0;
  bool on_boundary = false;
};

struct RunReport {
  Status status = Status::kError;
  Vector x_final;
  double f_final = std::numeric_limits<double>::quiet_NaN();
  double gnorm_final = std::numeric_limits<double>::quiet_NaN();
  int iterations = 0;
  EvalCounts evals;
  std::vector<TraceRecord> trace;
  std::string solver;
  double wall_seconds = 0.0;
  std::string message;
};

}  // namespace drsom
