#pragma once

#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>
#include <string>
#include <utility>

#include "drsom/types.hpp"

namespace drsom {

/// Evaluation counters. Monotonically nondecreasing over a run and reset
/// only at run start. Updates are not atomic: an Objective instance must be
/// confined to a single solver thread; concurrent runs use distinct
/// instances.
struct EvalCounts {
  long n_f = 0;
  long n_g = 0;
  long n_hvp = 0;
};

/// Black-box objective with gradient access and an optional exact
/// Hessian-vector product callback. All evaluations are routed through this
/// class so solver costs stay comparable across methods.
class Objective {
 public:
  using ValueFun = std::function<double(const Vector&)>;
  using GradFun = std::function<Vector(const Vector&)>;
  using HvpFun = std::function<Vector(const Vector&, const Vector&)>;

  Objective(int dim, ValueFun f, GradFun grad, HvpFun hvp_exact = nullptr,
            std::string name = "objective")
      : dim_(dim),
        f_(std::move(f)),
        grad_(std::move(grad)),
        hvp_(std::move(hvp_exact)),
        name_(std::move(name)) {
    if (dim_ <= 0) {
      throw std::invalid_argument("Objective: dimension must be positive");
    }
  }

  int dim() const { return dim_; }
  const std::string& name() const { return name_; }
  bool has_exact_hvp() const { return static_cast<bool>(hvp_); }

  double value(const Vector& x) const {
    ++counts_.n_f;
    return f_(x);
  }

  Vector gradient(const Vector& x) const {
    ++counts_.n_g;
    return grad_(x);
  }

  Vector hvp_exact(const Vector& x, const Vector& v) const {
    if (!hvp_) throw std::logic_error("Objective: no exact HVP registered");
    ++counts_.n_hvp;
    return hvp_(x, v);
  }

  const EvalCounts& counts() const { return counts_; }
  void reset_counts() const { counts_ = EvalCounts{}; }

 private:
  int dim_;
  ValueFun f_;
  GradFun grad_;
  HvpFun hvp_;
  std::string name_;
  mutable EvalCounts counts_;
};

/// Forward-difference Hessian-vector product from one extra gradient call,
///   H v ~= (g(x + h v) - g(x)) / h,
/// with displacement h = 2 sqrt(u) (1 + |x|) / |v| so the probe point is
/// scale-invariant in v and stays well-conditioned near the origin.
inline Vector hvp_fd(const Objective& obj, const Vector& x, const Vector& v,
                     const Vector& g_x) {
  const double vnorm = v.norm();
  if (vnorm == 0.0) {
    throw std::invalid_argument("hvp_fd: degenerate direction");
  }
  const double u = std::numeric_limits<double>::epsilon();
  const double h = 2.0 * std::sqrt(u) * (1.0 + x.norm()) / vnorm;
  return (obj.gradient(x + h * v) - g_x) / h;
}

/// Hessian-vector product: exact callback when registered, finite
/// difference otherwise. g_x is the already-computed gradient at x.
inline Vector hvp(const Objective& obj, const Vector& x, const Vector& v,
                  const Vector& g_x) {
  if (obj.has_exact_hvp()) return obj.hvp_exact(x, v);
  return hvp_fd(obj, x, v, g_x);
}

}  // namespace drsom
