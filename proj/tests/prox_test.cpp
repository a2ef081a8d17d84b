#include <cmath>
#include <limits>

#include <gtest/gtest.h>

#include "klminimax/checks.hpp"
#include "klminimax/errors.hpp"
#include "klminimax/prox.hpp"
#include "klminimax/rng.hpp"

using namespace klminimax;

namespace {

Vector vec(std::initializer_list<double> xs) {
  Vector v(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index i = 0;
  for (double x : xs) v(i++) = x;
  return v;
}

}  // namespace

TEST(Prox, SoftThreshold) {
  const Vector u = prox(ProxRegularizer::l1(1.0), vec({3.0, -0.5}), 1.0);
  EXPECT_DOUBLE_EQ(u(0), 2.0);
  EXPECT_DOUBLE_EQ(u(1), 0.0);
}

TEST(Prox, SoftThresholdTieGoesToZero) {
  const Vector u = prox(ProxRegularizer::l1(0.5), vec({1.0, -1.0}), 2.0);
  EXPECT_EQ(u(0), 0.0);
  EXPECT_EQ(u(1), 0.0);
}

TEST(Prox, BallProjection) {
  for (double t : {0.1, 1.0, 7.0}) {
    const Vector u = prox(ProxRegularizer::ball(Vector::Zero(2), 1.0), vec({3.0, 4.0}), t);
    EXPECT_NEAR(u(0), 0.6, 1e-15);
    EXPECT_NEAR(u(1), 0.8, 1e-15);
  }
}

TEST(Prox, L1BallShrinkThenProject) {
  const ProxRegularizer reg = ProxRegularizer::l1_ball(1.0, 1.0);
  const Vector v = vec({3.0, 4.0});
  const Vector u = prox(reg, v, 1.0);
  EXPECT_NEAR(u(0), 2.0 / std::sqrt(13.0), 1e-15);
  EXPECT_NEAR(u(1), 3.0 / std::sqrt(13.0), 1e-15);
  const auto grid = checks::grid_prox(reg, v, 1.0);
  EXPECT_NEAR(grid.arg(0), u(0), 1e-3);
  EXPECT_NEAR(grid.arg(1), u(1), 1e-3);
}

TEST(Prox, BoxClampsAndL1BoxComposes) {
  const ProxRegularizer box = ProxRegularizer::box(vec({-1.0, 0.0}), vec({1.0, 2.0}));
  const Vector u = prox(box, vec({5.0, -3.0}), 0.3);
  EXPECT_EQ(u, vec({1.0, 0.0}));
  const ProxRegularizer l1box = ProxRegularizer::l1_box(0.5, vec({-1.0, 0.5}), vec({1.0, 2.0}));
  const Vector w = prox(l1box, vec({0.7, 0.2}), 1.0);
  EXPECT_NEAR(w(0), 0.2, 1e-15);
  EXPECT_NEAR(w(1), 0.5, 1e-15);
}

TEST(Prox, ZeroIsIdentity) {
  const Vector v = vec({1.5, -2.0, 0.0});
  EXPECT_EQ(prox(ProxRegularizer::zero(), v, 3.0), v);
}

TEST(Prox, RandomCasesMatchGridOracle) {
  Rng rng(7);
  for (int i = 0; i < 60; ++i) {
    const Eigen::Index d = 1 + i % 2;
    Vector lo(d), hi(d), c(d), v(d);
    for (Eigen::Index k = 0; k < d; ++k) {
      lo(k) = rng.uniform(-2.0, -0.1);
      hi(k) = rng.uniform(0.1, 2.0);
      c(k) = rng.uniform(-0.5, 0.5);
      v(k) = rng.uniform(-3.0, 3.0);
    }
    const double w = rng.uniform(0.0, 1.0), t = rng.uniform(0.1, 2.0);
    const ProxRegularizer regs[] = {ProxRegularizer::zero(),       ProxRegularizer::l1(w),
                                    ProxRegularizer::ball(c, 1.0), ProxRegularizer::box(lo, hi),
                                    ProxRegularizer::l1_ball(w, 0.8), ProxRegularizer::l1_box(w, lo, hi)};
    for (const auto& reg : regs) {
      const Vector u = prox(reg, v, t);
      ASSERT_TRUE(reg.feasible(u));
      const double gap = checks::prox_objective(reg, v, t, u) - checks::grid_prox(reg, v, t).value;
      EXPECT_LE(gap, 1e-6) << to_string(reg.kind());
    }
  }
}

TEST(Prox, RejectsBadStep) {
  const auto reg = ProxRegularizer::l1(1.0);
  EXPECT_THROW(prox(reg, vec({1.0}), 0.0), InvalidArgument);
  EXPECT_THROW(prox(reg, vec({1.0}), -1.0), InvalidArgument);
  EXPECT_THROW(prox(reg, vec({std::numeric_limits<double>::quiet_NaN()}), 1.0), Error);
}

TEST(Prox, FactoryValidation) {
  EXPECT_THROW(ProxRegularizer::l1(-1.0), InvalidArgument);
  EXPECT_THROW(ProxRegularizer::ball(Vector::Zero(2), 0.0), InvalidArgument);
  EXPECT_THROW(ProxRegularizer::box(vec({1.0}), vec({0.0})), InvalidArgument);
  EXPECT_THROW(ProxRegularizer::box(vec({0.0, 0.0}), vec({1.0})), Error);
}

TEST(Prox, KindNames) {
  for (auto k : {RegularizerKind::Zero, RegularizerKind::L1, RegularizerKind::Ball,
                 RegularizerKind::Box, RegularizerKind::L1Ball, RegularizerKind::L1Box}) {
    EXPECT_EQ(regularizer_kind_from_string(to_string(k)), k);
  }
  EXPECT_THROW(regularizer_kind_from_string("elastic_net"), UnsupportedRegularizer);
}

TEST(Prox, ValueIsInfiniteOutsideDomain) {
  const auto reg = ProxRegularizer::l1_ball(0.5, 1.0);
  EXPECT_DOUBLE_EQ(reg.value(vec({0.6, 0.0})), 0.3);
  EXPECT_TRUE(std::isinf(reg.value(vec({2.0, 0.0}))));
}

TEST(SubdiffDistance, Examples) {
  EXPECT_DOUBLE_EQ(subdiff_distance(ProxRegularizer::l1(0.1), vec({0.0}), vec({0.05})), 0.0);
  EXPECT_DOUBLE_EQ(subdiff_distance(ProxRegularizer::box(vec({0.0}), vec({1.0})), vec({1.0}), vec({-2.0})),
                   0.0);
  EXPECT_NEAR(subdiff_distance(ProxRegularizer::l1_box(0.1, vec({-2.0}), vec({2.0})), vec({0.5}),
                               vec({0.3})),
              0.4, 1e-15);
}

TEST(SubdiffDistance, BoxUpperBoundWrongSign) {
  // g > 0 at the upper bound: the normal cone cannot cancel it.
  EXPECT_DOUBLE_EQ(subdiff_distance(ProxRegularizer::box(vec({0.0}), vec({1.0})), vec({1.0}), vec({2.0})),
                   2.0);
}

TEST(SubdiffDistance, BallBoundary) {
  const auto ball = ProxRegularizer::ball(Vector::Zero(2), 1.0);
  // -g points outward along v: fully absorbed by the normal cone.
  EXPECT_NEAR(subdiff_distance(ball, vec({1.0, 0.0}), vec({-3.0, 0.0})), 0.0, 1e-15);
  // Tangential part survives.
  EXPECT_NEAR(subdiff_distance(ball, vec({1.0, 0.0}), vec({-3.0, 2.0})), 2.0, 1e-15);
  // Interior: plain norm.
  EXPECT_NEAR(subdiff_distance(ball, vec({0.5, 0.0}), vec({3.0, 4.0})), 5.0, 1e-15);
}

TEST(SubdiffDistance, MatchesProxFixedPoint) {
  // u = prox(v, t) implies (v - u)/t is in d reg(u), so dist(0, (u - v)/t + d reg(u)) = 0.
  Rng rng(3);
  const ProxRegularizer regs[] = {ProxRegularizer::l1(0.3), ProxRegularizer::l1_ball(0.3, 1.0),
                                  ProxRegularizer::l1_box(0.3, vec({-1.0, -1.0}), vec({1.0, 1.0}))};
  for (const auto& reg : regs) {
    for (int i = 0; i < 50; ++i) {
      const Vector v = vec({rng.uniform(-3, 3), rng.uniform(-3, 3)});
      const double t = rng.uniform(0.1, 2.0);
      const Vector u = prox(reg, v, t);
      EXPECT_LE(subdiff_distance(reg, u, (u - v) / t), 1e-9) << to_string(reg.kind());
    }
  }
}

TEST(SubdiffDistance, InfeasiblePointThrows) {
  EXPECT_THROW(subdiff_distance(ProxRegularizer::ball(Vector::Zero(1), 1.0), vec({2.0}), vec({0.0})),
               InfeasiblePoint);
}
