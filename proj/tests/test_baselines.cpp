#include "drsom/baselines.hpp"

#include <gtest/gtest.h>

#include <random>

#include "drsom/problems.hpp"
#include "oracles.hpp"

namespace {

using drsom::BaselineConfig;
using drsom::Matrix;
using drsom::Objective;
using drsom::RunReport;
using drsom::Status;
using drsom::Vector;

void expect_strictly_decreasing(const RunReport& report) {
  double prev = std::numeric_limits<double>::infinity();
  for (const auto& rec : report.trace) {
    if (!rec.accepted) continue;
    EXPECT_LT(rec.f, prev);
    prev = rec.f;
  }
}

TEST(Gd, SphereWithArmijoConverges) {
  const Objective obj =
      drsom::quadratic_objective(Matrix::Identity(2, 2), Vector::Zero(2));
  BaselineConfig cfg;
  cfg.ls.kind = drsom::LineSearchKind::kArmijoBacktracking;
  cfg.max_iter = 60;
  const RunReport report = drsom::gd_minimize(obj, Vector::Ones(2), cfg);
  EXPECT_EQ(report.status, Status::kConverged);
  EXPECT_LE(report.iterations, 60);
  expect_strictly_decreasing(report);
}

TEST(Gd, RosenbrockEventuallyConverges) {
  const Objective obj = drsom::rosenbrock_objective(2);
  Vector x0(2);
  x0 << -1.2, 1.0;
  BaselineConfig cfg;
  cfg.tol_g = 1e-5;
  cfg.max_iter = 50000;
  const RunReport report = drsom::gd_minimize(obj, x0, cfg);
  EXPECT_EQ(report.status, Status::kConverged);
  EXPECT_LE((report.x_final - Vector::Ones(2)).norm(), 1e-2);
}

TEST(Cg, QuadraticTerminatesInDimensionPlusTwo) {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> normal(0.0, 1.0);
  const int n = 8;
  Matrix R(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) R(i, j) = normal(rng);
  }
  const Matrix A = R.transpose() * R / n + Matrix::Identity(n, n);
  Vector a0(n);
  for (int i = 0; i < n; ++i) a0(i) = normal(rng);
  const Objective obj = drsom::quadratic_objective(A, a0);
  BaselineConfig cfg;
  cfg.tol_g = 1e-6 * (A * Vector::Ones(n) + a0).norm();
  cfg.ls.c2 = 1e-3;  // near-exact line minimization: linear CG regime
  cfg.max_iter = 100;
  const RunReport report = drsom::cg_minimize(obj, Vector::Ones(n), cfg);
  EXPECT_EQ(report.status, Status::kConverged);
  EXPECT_LE(report.iterations, n + 2);
}

TEST(Cg, StartingAtOptimumTakesNoIterations) {
  const Objective obj =
      drsom::quadratic_objective(Matrix::Identity(3, 3), Vector::Zero(3));
  BaselineConfig cfg;
  const RunReport report = drsom::cg_minimize(obj, Vector::Zero(3), cfg);
  EXPECT_EQ(report.status, Status::kConverged);
  EXPECT_EQ(report.iterations, 0);
}

TEST(Cg, SolvesMediumSnlInstance) {
  const auto inst = drsom::snl_generate(80, 5, 0.5, 0.05, 1);
  const Objective obj = drsom::snl_objective(inst);
  BaselineConfig cfg;
  cfg.tol_g = 1e-6;
  cfg.max_iter = 20000;
  const RunReport report =
      drsom::cg_minimize(obj, Vector::Zero(obj.dim()), cfg);
  EXPECT_EQ(report.status, Status::kConverged);
  EXPECT_LE(report.gnorm_final, 1e-6);
}

TEST(Lbfgs, QuadraticConvergesQuickly) {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> normal(0.0, 1.0);
  const int n = 20;
  Matrix R(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) R(i, j) = normal(rng);
  }
  const Matrix A = R.transpose() * R / n + Matrix::Identity(n, n);
  const Objective obj = drsom::quadratic_objective(A, Vector::Zero(n));
  BaselineConfig cfg;
  cfg.tol_g = 1e-6;
  const RunReport report = drsom::lbfgs_minimize(obj, Vector::Ones(n), cfg);
  EXPECT_EQ(report.status, Status::kConverged);
  EXPECT_LE(report.iterations, 40);
  expect_strictly_decreasing(report);
}

TEST(Lbfgs, RosenbrockConverges) {
  const Objective obj = drsom::rosenbrock_objective(2);
  Vector x0(2);
  x0 << -1.2, 1.0;
  BaselineConfig cfg;
  cfg.tol_g = 1e-6;
  cfg.max_iter = 2000;
  const RunReport report = drsom::lbfgs_minimize(obj, x0, cfg);
  EXPECT_EQ(report.status, Status::kConverged);
  EXPECT_LE((report.x_final - Vector::Ones(2)).norm(), 1e-4);
}

TEST(Lbfgs, ZeroMemoryDegeneratesToScaledGradientDescent) {
  const Objective obj =
      drsom::quadratic_objective(Matrix::Identity(4, 4), Vector::Zero(4));
  BaselineConfig cfg;
  cfg.memory = 0;
  cfg.max_iter = 200;
  const RunReport report = drsom::lbfgs_minimize(obj, Vector::Ones(4), cfg);
  EXPECT_EQ(report.status, Status::kConverged);
}

TEST(LineSearch, StrongWolfeConditionsHoldAtAcceptedPoint) {
  const Objective obj = drsom::rosenbrock_objective(2);
  std::mt19937_64 rng(7);
  std::normal_distribution<double> normal(0.0, 1.0);
  drsom::LineSearchSpec spec;
  spec.kind = drsom::LineSearchKind::kStrongWolfe;
  for (int rep = 0; rep < 40; ++rep) {
    Vector x(2);
    x << normal(rng), normal(rng);
    const double f0 = obj.value(x);
    const Vector g0 = obj.gradient(x);
    if (g0.norm() < 1e-10) continue;
    const Vector p = -g0;
    const auto res = drsom::strong_wolfe(obj, x, f0, g0, p, spec, 1.0);
    ASSERT_TRUE(res.success) << "rep " << rep;
    const double dphi0 = g0.dot(p);
    EXPECT_LE(res.f, f0 + spec.c1 * res.alpha * dphi0 + 1e-14 * std::abs(f0));
    EXPECT_LE(std::abs(res.g.dot(p)), -spec.c2 * dphi0 + 1e-12);
  }
}

TEST(LineSearch, ArmijoBudgetFailureReported) {
  // A direction of sufficient increase: backtracking cannot satisfy Armijo
  // within budget because p is an ascent direction.
  const Objective obj =
      drsom::quadratic_objective(Matrix::Identity(2, 2), Vector::Zero(2));
  const Vector x = Vector::Ones(2);
  const double f0 = obj.value(x);
  const Vector g0 = obj.gradient(x);
  drsom::LineSearchSpec spec;
  spec.kind = drsom::LineSearchKind::kArmijoBacktracking;
  const auto res = drsom::armijo_backtracking(obj, x, f0, g0, g0, spec, 1.0);
  EXPECT_FALSE(res.success);
}

TEST(Baselines, EvaluationAccountingIncludesLineSearch) {
  const Objective obj = drsom::rosenbrock_objective(2);
  Vector x0(2);
  x0 << -1.2, 1.0;
  BaselineConfig cfg;
  cfg.max_iter = 50;
  const RunReport report = drsom::gd_minimize(obj, x0, cfg);
  EXPECT_EQ(report.evals.n_f, obj.counts().n_f);
  EXPECT_GE(report.evals.n_f, report.iterations);  // at least one probe each
  EXPECT_GE(report.evals.n_g, report.iterations);
}

}  // namespace
