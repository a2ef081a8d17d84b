#include <cmath>

#include <gtest/gtest.h>

#include "klminimax/errors.hpp"
#include "klminimax/outer_solver.hpp"

using namespace klminimax;

namespace {

double cp(double v) { return v > 0 ? std::ceil(v) : 0.0; }

// Second implementation, a literal per-constant transcription.
struct Reference {
  double C[8];
  double K_hat, K_bar_f, N_hat;
};

Reference reference(double Ck, double th, double ga, double si, double Lf, double Lg,
                    double lb, double rho, double gap, double eps) {
  Reference out{};
  const double nu = (1 - th) / th;
  const double M = std::pow(Ck, -1 / th) * std::pow(Lg, 1 / th) / (1 - th);
  const double A = Lg * Lg / (Ck * Ck) / ((1 - th) * (1 - th));
  const double Ll = Lg + std::pow(M, 2 / (1 + nu));
  const double a = 8 * (gap + 3 + 2 * A / Ll);
  const double b = 8 * (1.5 + A / Ll);
  const double Mp = std::pow(M, 2 / (1 + nu));
  const double M3 = std::pow(3 * M, 2 / nu);
  const double e1 = (1 + nu) / (2 * nu), e2 = (1 + nu) / 2;

  out.C[0] = std::pow(36 * (1 + nu) / nu * b * Ll * cp(std::log(18 * (1 + nu) / nu * b * Ll)) +
                          72 * (1 + nu) / nu * b * Ll + 1,
                      e1);
  out.C[1] = std::pow(4 * b * (1 + nu) * M3 / Mp * cp(std::log(2 * b * (1 + nu) * M3 / Mp)) +
                          8 * b * (1 + nu) * M3 / (nu * Mp) + 1,
                      e2);
  out.C[2] = std::pow(36 * Ll * a, e1) + std::pow(4 * a * M3, e2) / M;
  out.C[3] = 72 * A;
  out.C[4] = std::pow(144 * (1 + nu) * b * Lg * Lg / Mp * cp(std::log(72 * (1 + nu) * b * Lg * Lg / Mp)) +
                          288 * (1 + nu) * b * Lg * Lg / Mp + 1,
                      e2);
  out.C[5] = std::pow(144 * a * Lg * Lg, e2) / M;
  const double g2 = ga * ga * Mp;
  out.C[6] = std::pow(64 * (1 + nu) * b * Lf * Lf / g2 * cp(std::log(32 * (1 + nu) * b * Lf * Lf / g2)) +
                          128 * si * (1 + nu) * b * Lf * Lf / g2 + 1,
                      e2);
  out.C[7] = std::pow(64 * a * Lf * Lf, e2) / (std::pow(ga, 1 + nu) * M);
  const double le = std::log(1 / eps);
  out.K_hat = std::ceil(out.C[0] * std::pow(eps, -(1 + nu) / nu) * std::pow(le, e1) +
                        out.C[1] * std::pow(eps, -(1 + nu) / nu) * std::pow(le, e2) +
                        out.C[2] * std::pow(eps, -(1 + nu) / nu) + out.C[3] * std::pow(eps, -2.0) +
                        out.C[4] * std::pow(eps, -(1 + nu)) * std::pow(le, e2) +
                        out.C[5] * std::pow(eps, -(1 + nu)) +
                        out.C[6] * std::pow(eps, -(1 + nu) * si) * std::pow(le, e2) +
                        out.C[7] * std::pow(eps, -(1 + nu) * si));

  const double ll = std::min(rho / Lg, lb);
  const double bfl = Ck * Ck / (2 * lb) / std::pow(Lg + 1 / ll, 2);
  const double bfu = Ck * Ck / (2 * ll) / std::pow(Lg + 1 / lb, 2);
  const double ge = ga * std::pow(eps, si);
  const double Lam = std::max(std::pow(ge / 2, -2 * th), std::pow(out.K_hat + 1, th / (1 - th)));
  const double inner = 2 * lb / (Ck * Ck) * std::pow(Lg + 1 / ll, 2);
  if (th == 0.5) {
    out.K_bar_f = cp((1 + bfl) / bfl * std::log(inner * ge * Lam)) + 1;
  } else {
    const double cpf = std::min(0.5, (std::pow(2.0, (2 * th - 1) / (2 * th)) - 1) * std::pow(ge, 1 - 2 * th) /
                                         ((2 * th - 1) * bfu));
    out.K_bar_f = std::ceil(std::pow(inner * Lam, 2 * th - 1) / (cpf * (2 * th - 1) * bfl)) + 1;
  }
  out.N_hat = out.K_hat * (cp(std::log(2 * Lg * lb) / std::log(1 / rho)) + 1) * out.K_bar_f;
  return out;
}

OuterConfig config(double C, double theta, double gamma, double sigma, double lf, double lg,
                   double lambda_bar, double rho, double eps) {
  OuterConfig cfg;
  cfg.kl.C = C;
  cfg.kl.theta = theta;
  cfg.kl.gamma = gamma;
  cfg.kl.sigma = sigma;
  cfg.smooth = {lf, lg};
  cfg.lambda_bar = lambda_bar;
  cfg.rho = rho;
  cfg.epsilon = eps;
  return cfg;
}

// Large theta overflows the inner bounds; both sides must then be infinite.
void expect_close(double got, double want, const char* what) {
  if (std::isinf(want)) {
    EXPECT_TRUE(std::isinf(got)) << what;
  } else {
    EXPECT_NEAR(got, want, 1e-12 * want) << what;
  }
}

void expect_agrees(const OuterConfig& cfg, double gap) {
  const auto d = complexity_bounds(cfg, gap);
  const auto r = reference(cfg.kl.C, cfg.kl.theta, cfg.kl.gamma, cfg.kl.sigma, cfg.smooth.lipschitz_f,
                           cfg.smooth.lipschitz_grad, cfg.lambda_bar, cfg.rho, gap, cfg.epsilon);
  for (int i = 0; i < 8; ++i) expect_close(d.C_hat[i], r.C[i], "C_hat");
  expect_close(d.K_hat, r.K_hat, "K_hat");
  expect_close(d.K_bar_f, r.K_bar_f, "K_bar_f");
  expect_close(d.N_hat, r.N_hat, "N_hat");
}

}  // namespace

TEST(Complexity, FixedParameterSetAgreesWithReference) {
  const auto cfg = config(1, 0.5, 1, 1, 1, 1, 1, 0.5, 0.1);
  expect_agrees(cfg, 1.0);
  const auto d = complexity_bounds(cfg, 1.0);
  const auto r = reference(1, 0.5, 1, 1, 1, 1, 1, 0.5, 1.0, 0.1);
  EXPECT_EQ(d.K_hat, r.K_hat);
  EXPECT_EQ(d.K_bar_f, r.K_bar_f);
  EXPECT_EQ(d.N_hat, r.N_hat);
  EXPECT_GE(d.K_hat, 2.0);
}

TEST(Complexity, RandomParameterSetsAgree) {
  const double thetas[] = {0.5, 0.6, 0.75, 0.9};
  const double eps[] = {0.01, 0.1, std::exp(-1.0)};
  for (double th : thetas)
    for (double e : eps) expect_agrees(config(0.7, th, 0.3, 0.5, 2.0, 3.0, 0.8, 0.9, e), 2.5);
}

TEST(Complexity, MonotoneInEpsilon) {
  double prev = 0.0;
  for (double e : {std::exp(-1.0), 0.1, 0.01}) {
    const double k = complexity_bounds(config(0.2, 0.5, 0.01, 0.1, 1, 1, 1, 0.95, e), 1.0).K_hat;
    EXPECT_GE(k, prev);
    prev = k;
  }
}

TEST(Complexity, HalfThetaGivesUnitNu) {
  const auto d = derive_constants(config(2.0, 0.5, 1, 1, 1, 3.0, 1, 0.5, 0.1));
  EXPECT_DOUBLE_EQ(d.nu, 1.0);
  EXPECT_DOUBLE_EQ(d.M, 2.0 * 9.0 / 4.0);
  EXPECT_DOUBLE_EQ(d.r, 1.0 * 0.1 / 4.0);
}

TEST(Complexity, RejectsEpsilonAboveInverseE) {
  const auto cfg = config(1, 0.5, 1, 1, 1, 1, 1, 0.5, 0.5);
  EXPECT_THROW(complexity_bounds(cfg, 1.0), OutOfRange);
  EXPECT_FALSE(cfg.validate().empty());
  EXPECT_THROW(complexity_bounds(config(1, 0.5, 1, 1, 1, 1, 1, 0.5, 0.1), -1.0), InvalidArgument);
}
