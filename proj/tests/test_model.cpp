#include "drsom/model.hpp"

#include <gtest/gtest.h>

#include <random>

#include "drsom/problems.hpp"
#include "oracles.hpp"

namespace {

using drsom::Matrix;
using drsom::Objective;
using drsom::QuadModel;
using drsom::Vector;

TEST(BuildHvp, FirstIterationUsesOneDimension) {
  const Objective obj =
      drsom::quadratic_objective(Matrix::Identity(2, 2), Vector::Zero(2));
  Vector x(2);
  x << 2.0, 0.0;
  const Vector g = obj.gradient(x);
  const auto model = drsom::build_hvp(obj, x, obj.value(x), g, Vector::Zero(2));
  EXPECT_EQ(model.j, 1);
  EXPECT_NEAR(model.Q(0, 0), 4.0, 1e-12);
  EXPECT_NEAR(model.c(0), -4.0, 1e-12);
  EXPECT_NEAR(model.G(0, 0), 4.0, 1e-12);
}

TEST(BuildHvp, HandComputedTwoByTwo) {
  Matrix A = Matrix::Zero(2, 2);
  A(0, 0) = 1.0;
  A(1, 1) = 2.0;
  const Objective obj = drsom::quadratic_objective(A, Vector::Zero(2));
  Vector x(2), d(2);
  x << 1.0, 1.0;
  d << 0.5, 0.5;
  const Vector g = obj.gradient(x);
  ASSERT_NEAR(g(0), 1.0, 1e-15);
  ASSERT_NEAR(g(1), 2.0, 1e-15);
  const auto model = drsom::build_hvp(obj, x, obj.value(x), g, d);
  ASSERT_EQ(model.j, 2);
  EXPECT_NEAR(model.Q(0, 0), 9.0, 1e-10);
  EXPECT_NEAR(model.Q(0, 1), -2.5, 1e-10);
  EXPECT_NEAR(model.Q(1, 1), 0.75, 1e-10);
  EXPECT_NEAR(model.c(0), -5.0, 1e-12);
  EXPECT_NEAR(model.c(1), 1.5, 1e-12);
  EXPECT_NEAR(model.G(0, 0), 5.0, 1e-12);
  EXPECT_NEAR(model.G(0, 1), -1.5, 1e-12);
  EXPECT_NEAR(model.G(1, 1), 0.5, 1e-12);
  EXPECT_EQ(model.gram_rank, 2);
}

TEST(BuildHvp, ParallelMomentumFlagsGramRank) {
  const Objective obj =
      drsom::quadratic_objective(Matrix::Identity(3, 3), Vector::Zero(3));
  Vector x(3);
  x << 1.0, 2.0, -1.0;
  const Vector g = obj.gradient(x);
  const Vector d = -0.25 * g;
  const auto model = drsom::build_hvp(obj, x, obj.value(x), g, d);
  EXPECT_EQ(model.j, 2);
  EXPECT_EQ(model.gram_rank, 1);
}

TEST(BuildHvp, SymmetryAndGramConsistency) {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> normal(0.0, 1.0);
  const Objective obj = drsom::rosenbrock_objective(6);
  for (int rep = 0; rep < 20; ++rep) {
    Vector x(6), d(6);
    for (int i = 0; i < 6; ++i) {
      x(i) = normal(rng);
      d(i) = 0.1 * normal(rng);
    }
    const Vector g = obj.gradient(x);
    if (g.norm() == 0.0) continue;
    const auto model = drsom::build_hvp(obj, x, obj.value(x), g, d);
    EXPECT_LE((model.Q - model.Q.transpose()).cwiseAbs().maxCoeff(), 1e-12);
    // G is the Gram matrix of the stored basis.
    Matrix gram(model.j, model.j);
    for (int a = 0; a < model.j; ++a) {
      for (int b = 0; b < model.j; ++b) {
        gram(a, b) = model.basis[a].dot(model.basis[b]);
      }
    }
    EXPECT_LE((model.G - gram).norm(), 1e-10 * (1.0 + gram.norm()));
    // c = [-|g|^2, g'd] by definition.
    EXPECT_EQ(model.c(0), -g.squaredNorm());
    EXPECT_EQ(model.c(1), g.dot(d));
  }
}

TEST(BuildHvp, ExactAndFiniteDifferenceAgree) {
  const Objective obj = drsom::rosenbrock_objective(4);
  Vector x(4), d(4);
  x << -0.5, 0.5, 0.2, -0.1;
  d << 0.05, -0.02, 0.01, 0.03;
  const Vector g = obj.gradient(x);
  const auto exact = drsom::build_hvp(obj, x, obj.value(x), g, d, false);
  const auto fd = drsom::build_hvp(obj, x, obj.value(x), g, d, true);
  EXPECT_LE((exact.Q - fd.Q).norm(), 1e-4 * (1.0 + exact.Q.norm()));
}

TEST(BuildHvp, NonFiniteObjectiveIsModelBuildFailure) {
  const Objective obj(
      2, [](const Vector& x) { return 0.5 * x.squaredNorm(); },
      [](const Vector& x) { return x; },
      [](const Vector&, const Vector&) {
        return Vector::Constant(2, std::numeric_limits<double>::quiet_NaN());
      });
  Vector x(2);
  x << 1.0, 1.0;
  const Vector g = obj.gradient(x);
  EXPECT_THROW(drsom::build_hvp(obj, x, obj.value(x), g, Vector::Zero(2)),
               std::runtime_error);
}

TEST(BuildInterp, DeterministicSampleHookRecoversIdentity) {
  const Objective obj =
      drsom::quadratic_objective(Matrix::Identity(2, 2), Vector::Zero(2));
  Vector x(2), g(2), d(2);
  x << 1.0, 0.0;
  g << 1.0, 0.0;
  d << 0.0, 1.0;
  std::vector<Eigen::Vector2d> betas = {{1.0, 0.0}, {0.0, 1.0}, {1.0, 1.0}};
  std::mt19937_64 rng(0);
  const auto model =
      drsom::build_interp(obj, x, g, d, obj.value(x), 3, 1.0, rng, &betas);
  ASSERT_EQ(model.j, 2);
  EXPECT_NEAR(model.Q(0, 0), 1.0, 1e-10);
  EXPECT_NEAR(model.Q(0, 1), 0.0, 1e-10);
  EXPECT_NEAR(model.Q(1, 1), 1.0, 1e-10);
}

TEST(BuildInterp, ExactOnQuadratics) {
  std::mt19937_64 rng(9);
  std::normal_distribution<double> normal(0.0, 1.0);
  const int n = 8;
  for (int rep = 0; rep < 20; ++rep) {
    Matrix R(n, n);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) R(i, j) = normal(rng);
    }
    const Matrix A = 0.5 * (R + R.transpose());
    Vector a0(n);
    for (int i = 0; i < n; ++i) a0(i) = normal(rng);
    const Objective obj = drsom::quadratic_objective(A, a0);
    Vector x(n), d(n);
    for (int i = 0; i < n; ++i) {
      x(i) = normal(rng);
      d(i) = normal(rng);
    }
    const Vector g = obj.gradient(x);
    const auto mi =
        drsom::build_interp(obj, x, g, d, obj.value(x), 3, 1.0, rng);
    const auto mh = drsom::build_hvp(obj, x, obj.value(x), g, d);
    EXPECT_LE((mi.Q - mh.Q).norm(), 1e-8 * (1.0 + mh.Q.norm())) << rep;
  }
}

TEST(BuildInterp, LeastSquaresWithExtraSamples) {
  std::mt19937_64 rng(15);
  const Objective obj =
      drsom::quadratic_objective(2.0 * Matrix::Identity(3, 3), Vector::Zero(3));
  Vector x(3), d(3);
  x << 1.0, -1.0, 0.5;
  d << 0.2, 0.1, -0.3;
  const Vector g = obj.gradient(x);
  const auto model =
      drsom::build_interp(obj, x, g, d, obj.value(x), 7, 1.0, rng);
  const auto want = drsom::build_hvp(obj, x, obj.value(x), g, d);
  EXPECT_LE((model.Q - want.Q).norm(), 1e-8 * (1.0 + want.Q.norm()));
}

TEST(BuildInterp, CloseToHvpModelOnSmoothedLp) {
  const auto inst = drsom::lp_generate(60, 30, 0.3, 0.5, 0.1, 12);
  const Objective obj = drsom::lp_objective(inst);
  std::mt19937_64 rng(21);
  std::normal_distribution<double> normal(0.0, 1.0);
  Vector x(30), d(30);
  for (int i = 0; i < 30; ++i) {
    x(i) = 0.5 * normal(rng);
    d(i) = 0.01 * normal(rng);
  }
  const Vector g = obj.gradient(x);
  const auto mh = drsom::build_hvp(obj, x, obj.value(x), g, d);
  const auto mi =
      drsom::build_interp(obj, x, g, d, obj.value(x), 3, 1e-2, rng);
  EXPECT_LE((mi.Q - mh.Q).norm(), 1e-2 * (1.0 + mh.Q.norm()));
}

TEST(BuildInterp, CountsFunctionEvaluations) {
  const Objective obj =
      drsom::quadratic_objective(Matrix::Identity(2, 2), Vector::Zero(2));
  Vector x(2), d(2);
  x << 1.0, 2.0;
  d << 0.1, -0.1;
  const Vector g = obj.gradient(x);
  const double fx = obj.value(x);
  obj.reset_counts();
  std::mt19937_64 rng(1);
  drsom::build_interp(obj, x, g, d, fx, 5, 1.0, rng);
  EXPECT_EQ(obj.counts().n_f, 5);
  EXPECT_EQ(obj.counts().n_g, 0);
}

TEST(ModelConsistency, ErrorDecaysCubically) {
  const Objective obj = drsom::rosenbrock_objective(2);
  Vector x(2);
  x << -0.5, 0.5;
  const Vector g = obj.gradient(x);
  Vector d(2);
  d << 0.1, -0.2;
  const auto model = drsom::build_hvp(obj, x, obj.value(x), g, d);
  Vector alpha(2);
  alpha << 0.7, 0.4;
  std::vector<double> log_t, log_err;
  for (double t = 1e-2; t >= 1e-3 / 1.001; t /= std::pow(10.0, 0.25)) {
    const Vector at = t * alpha;
    const double fv = obj.value(x + model.lift(at));
    const double err = std::abs(fv - model.value(at));
    ASSERT_GT(err, 0.0);
    log_t.push_back(std::log(t));
    log_err.push_back(std::log(err));
  }
  EXPECT_GE(oracles::fit_slope(log_t, log_err), 2.7);
}

}  // namespace
