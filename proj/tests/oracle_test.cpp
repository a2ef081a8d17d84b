#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "klminimax/errors.hpp"
#include "klminimax/harness.hpp"
#include "klminimax/oracle.hpp"

using namespace klminimax;
using std::numbers::pi;

namespace {

Vector scalar(double v) { return Vector::Constant(1, v); }

// f(x, y) = 0.5 ||x - a||^2 - 0.5 ||y||^2, p = 0.1 ||x||_1, q = box [-1, 1].
MinimaxProblem convex_problem(const Vector& a) {
  MinimaxProblem prob;
  prob.name = "convex";
  prob.n = a.size();
  prob.m = 2;
  prob.value = [a](const Vector& x, const Vector& y) {
    return 0.5 * (x - a).squaredNorm() - 0.5 * y.squaredNorm();
  };
  prob.grad_x = [a](const Vector& x, const Vector&) -> Vector { return x - a; };
  prob.grad_y = [](const Vector&, const Vector& y) -> Vector { return -y; };
  prob.p = ProxRegularizer::l1(0.1);
  prob.q = ProxRegularizer::box(Vector::Constant(2, -1.0), Vector::Constant(2, 1.0));
  prob.separable_inner = [a](const Vector& x) {
    SeparableInner s;
    s.constant = 0.5 * (x - a).squaredNorm();
    s.coordinate = [](Eigen::Index, double y) { return -0.5 * y * y; };
    s.lo = Vector::Constant(2, -1.0);
    s.hi = Vector::Constant(2, 1.0);
    return s;
  };
  return prob;
}

}  // namespace

TEST(InnerMax, ToyMaximizer) {
  const auto prob = toy_problem();
  for (double x : {1.0, 1.25, 2.0}) {
    const auto res = inner_max_separable(prob, scalar(x));
    EXPECT_NEAR(res.y_star(0), pi / 4, 1e-12);
    EXPECT_NEAR(res.F_star, x * (std::sqrt(2.0) / 2 - 1), 1e-14);
  }
}

TEST(InnerMax, HadamardAtOrigin) {
  const auto inst = HadamardInstance::generate(4, 3, 8);
  const auto res = inner_max_separable(hadamard_problem(inst), Vector::Zero(3));
  EXPECT_TRUE(res.y_star.isZero(0.0));
  EXPECT_NEAR(res.F_star, 0.01 * inst.c.squaredNorm(), 1e-15);
}

TEST(InnerMax, HadamardCancellingCoordinate) {
  // u0 = 1, v0 = -1: w vanishes at y = +-1 and only the l1 cost remains.
  Matrix A(1, 1), B(1, 1);
  A << 1.0;
  B << -1.0;
  const auto prob = hadamard_problem(HadamardInstance::from_data(A, B, Vector::Zero(1)));
  const auto res = inner_max_separable(prob, scalar(1.0));
  const double constant = 0.01;
  EXPECT_GE(res.F_star - constant, -0.1 - 1e-12);
  // Independent 1-D scan.
  double best = -1e300;
  for (int i = 0; i <= 400000; ++i) {
    const double y = -2.0 + 4.0 * i / 400000.0;
    best = std::max(best, -std::pow((y + 1) * (y - 1), 2) - 0.1 * std::abs(y));
  }
  EXPECT_GE(res.F_star - constant, best - 1e-12);
  EXPECT_LE(res.F_star - constant, best + 1e-6);
}

TEST(InnerMax, ActualNotBelowApproximate) {
  const auto inst = HadamardInstance::generate(6, 5, 4);
  const auto prob = hadamard_problem(inst);
  Vector x(5), y(6);
  x << 0.1, -0.2, 0.05, 0.3, -0.1;
  y << 0.5, -1.5, 2.0, 0.0, -0.3, 1.0;
  const auto res = inner_max_separable(prob, x);
  EXPECT_GE(res.F_star + res.residual, prob.inner_value(x, y));
}

TEST(ValueFunction, Examples) {
  EXPECT_NEAR(value_function(toy_problem(), scalar(2.0)), std::sqrt(2.0) - 2.0, 1e-14);
  const auto zero = HadamardInstance::from_data(Matrix::Zero(3, 2), Matrix::Zero(3, 2), Vector::Zero(2));
  EXPECT_NEAR(value_function(hadamard_problem(zero), Vector::Zero(2)), 0.0, 1e-15);
  EXPECT_THROW(value_function(toy_problem(), scalar(3.0)), InfeasiblePoint);
}

TEST(ValueFunction, ToyMinimizedAtUpperBound) {
  const auto prob = toy_problem();
  double best = 1e300, arg = 0.0;
  for (int i = 0; i <= 1000; ++i) {
    const double x = 1.0 + i / 1000.0;
    const double v = value_function(prob, scalar(x), {1000, 1e-12});
    if (v < best) best = v, arg = x;
  }
  EXPECT_EQ(arg, 2.0);
  EXPECT_NEAR(best, std::sqrt(2.0) - 2.0, 1e-12);
}

TEST(Stationarity, Toy) {
  const auto prob = toy_problem();
  const double g = std::sqrt(2.0) / 2 - 1;
  const auto at2 = stationarity_surrogate(prob, scalar(2.0), 0.5);
  EXPECT_NEAR(at2.exact_distance, 0.0, 1e-15);
  const auto mid = stationarity_surrogate(prob, scalar(1.5), 0.5);
  EXPECT_NEAR(mid.residual, std::abs(g), 1e-14);
  EXPECT_NEAR(mid.exact_distance, std::abs(g), 1e-14);
}

TEST(Stationarity, FixedPointOfConvexInstance) {
  Vector a(3);
  a << 1.0, -0.05, -2.0;
  const auto prob = convex_problem(a);
  Vector x_star(3);
  x_star << 0.9, 0.0, -1.9;
  const auto rep = stationarity_surrogate(prob, x_star, 0.7);
  EXPECT_LE(rep.residual, 1e-8);
  EXPECT_LE(rep.exact_distance, 1e-8);
}

TEST(KL, ToyConstantHolds) {
  const auto prob = toy_problem();
  const KLParams kl = toy_settings().outer_config(toy_smoothness()).kl;
  for (double x : {1.0, 1.37, 1.99}) {
    const auto rep = kl_verify(prob, scalar(x), kl, 20000, 5);
    EXPECT_EQ(rep.violations, 0) << x;
    EXPECT_EQ(rep.samples_in_level_set, 20000);
    EXPECT_GE(rep.worst_margin, 0.0);
  }
}

TEST(KL, OversizedConstantFails) {
  KLParams kl = toy_settings().outer_config(toy_smoothness()).kl;
  kl.C = 10.0;
  const auto rep = kl_verify(toy_problem(), scalar(1.5), kl, 2000, 5);
  EXPECT_GT(rep.violations, 0);
  EXPECT_LT(rep.worst_margin, 0.0);
}

TEST(KL, EmptyLevelSetIsInconclusive) {
  // At x = 2 the point is stationary and the level set collapses.
  const KLParams kl = toy_settings().outer_config(toy_smoothness()).kl;
  const auto rep = kl_verify(toy_problem(), scalar(2.0), kl, 100, 5, {}, 500);
  EXPECT_TRUE(rep.inconclusive());
  EXPECT_EQ(rep.draws, 500);
  EXPECT_NE(rep.to_json().find("\"violations\""), std::string::npos);
}

TEST(Holder, ToyPairs) {
  const auto s = toy_settings();
  const OuterConfig cfg = s.outer_config(toy_smoothness());
  const auto rep = holder_verify(toy_problem(), toy_smoothness(), cfg.kl, s.epsilon, 2000, 3);
  EXPECT_EQ(rep.pairs, 2000);
  EXPECT_EQ(rep.violations, 0);
  EXPECT_NEAR(rep.radius, cfg.kl.gamma * std::pow(s.epsilon, 0.1) / 4.0, 1e-15);
}
