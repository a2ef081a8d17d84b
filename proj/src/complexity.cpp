#include <cmath>

#include "klminimax/errors.hpp"
#include "klminimax/outer_solver.hpp"

namespace klminimax {
namespace {

double ceil_plus(double x) { return std::max(0.0, std::ceil(x)); }

// (c1 ceil(log c2)_+ + c3 + 1)^power, the shape shared by C1, C2, C5 and C7.
double log_term(double c1, double c2, double c3, double power) {
  return std::pow(c1 * ceil_plus(std::log(c2)) + c3 + 1.0, power);
}

}  // namespace

DerivedConstants complexity_bounds(const OuterConfig& cfg, double psi_gap) {
  DerivedConstants d = derive_constants(cfg);
  const double eps = cfg.epsilon;
  if (!(eps > 0.0 && eps <= std::exp(-1.0))) {
    throw OutOfRange("complexity bounds require epsilon in (0, 1/e]");
  }
  if (!(psi_gap >= 0.0)) throw InvalidArgument("psi_gap must be >= 0");

  const auto& kl = cfg.kl;
  const double theta = kl.theta;
  const double C = kl.C;
  const double gamma = kl.gamma;
  const double sigma = kl.sigma;
  const double lg = cfg.smooth.lipschitz_grad;
  const double lf = cfg.smooth.lipschitz_f;
  const double nu = d.nu;
  const double M = d.M;
  const double m_pow = std::pow(M, 2.0 / (1.0 + nu));  // M^{2/(1+nu)}
  const double m3_pow = std::pow(3.0 * M, 2.0 / nu);   // (3M)^{2/nu}

  d.A = lg * lg / ((1.0 - theta) * (1.0 - theta) * C * C);
  d.L_lower = lg + m_pow;
  d.a = 8.0 * (psi_gap + 3.0 + 2.0 * d.A / d.L_lower);
  d.b = 8.0 * (1.5 + d.A / d.L_lower);
  const double a = d.a;
  const double b = d.b;
  const double bl = (1.0 + nu) / nu * b * d.L_lower;
  const double half_nu = (1.0 + nu) / (2.0 * nu);
  const double half = (1.0 + nu) / 2.0;

  d.C_hat[0] = log_term(36.0 * bl, 18.0 * bl, 72.0 * bl, half_nu);
  const double k2 = b * (1.0 + nu) * m3_pow / m_pow;
  d.C_hat[1] = log_term(4.0 * k2, 2.0 * k2, 8.0 * k2 / nu, half);
  d.C_hat[2] = std::pow(36.0 * d.L_lower * a, half_nu) +
               std::pow(4.0 * a * m3_pow, half) / M;
  d.C_hat[3] = 72.0 * d.A;
  const double k5 = (1.0 + nu) * b * lg * lg / m_pow;
  d.C_hat[4] = log_term(144.0 * k5, 72.0 * k5, 288.0 * k5, half);
  d.C_hat[5] = std::pow(144.0 * a * lg * lg, half) / M;
  const double k7 = (1.0 + nu) * b * lf * lf / (gamma * gamma * m_pow);
  d.C_hat[6] = log_term(64.0 * k7, 32.0 * k7, 128.0 * sigma * k7, half);
  d.C_hat[7] = std::pow(64.0 * a * lf * lf, half) / (std::pow(gamma, 1.0 + nu) * M);

  const double log_inv = std::log(1.0 / eps);
  const double e_main = std::pow(eps, -(1.0 + nu) / nu);
  const double e_nu = std::pow(eps, -(1.0 + nu));
  const double e_sigma = std::pow(eps, -(1.0 + nu) * sigma);
  const double log_half_nu = std::pow(log_inv, half_nu);
  const double log_half = std::pow(log_inv, half);
  d.K_hat = std::ceil(d.C_hat[0] * e_main * log_half_nu +
                      d.C_hat[1] * e_main * log_half + d.C_hat[2] * e_main +
                      d.C_hat[3] / (eps * eps) + d.C_hat[4] * e_nu * log_half +
                      d.C_hat[5] * e_nu + d.C_hat[6] * e_sigma * log_half +
                      d.C_hat[7] * e_sigma);

  // Inner-solve bound shared by every call of the subsolver.
  const double lam_bar = cfg.lambda_bar;
  const double lam_low = d.lambda_lower;
  d.beta_f_lower = C * C / (2.0 * lam_bar) * std::pow(lg + 1.0 / lam_low, -2.0);
  d.beta_f_upper = C * C / (2.0 * lam_low) * std::pow(lg + 1.0 / lam_bar, -2.0);
  const double region = gamma * std::pow(eps, sigma);
  d.Lambda = std::max(std::pow(0.5 * region, -2.0 * theta),
                      std::pow(d.K_hat + 1.0, theta / (1.0 - theta)));
  const double scale = 2.0 * lam_bar / (C * C) * std::pow(lg + 1.0 / lam_low, 2.0);
  if (theta == 0.5) {
    d.c_prime_f = std::min(0.5, std::log(2.0) / d.beta_f_upper);
    d.K_bar_f = ceil_plus((1.0 + d.beta_f_lower) / d.beta_f_lower *
                          std::log(scale * region * d.Lambda)) +
                1.0;
  } else {
    const double e = 2.0 * theta - 1.0;
    d.c_prime_f = std::min(0.5, (std::pow(2.0, e / (2.0 * theta)) - 1.0) *
                                    std::pow(region, 1.0 - 2.0 * theta) /
                                    (e * d.beta_f_upper));
    d.K_bar_f = std::ceil(std::pow(scale * d.Lambda, e) /
                          (d.c_prime_f * e * d.beta_f_lower)) +
                1.0;
  }
  const double trials = ceil_plus(std::log(2.0 * lg * lam_bar) / std::log(1.0 / cfg.rho)) + 1.0;
  d.N_hat = d.K_hat * trials * d.K_bar_f;
  return d;
}

}  // namespace klminimax
