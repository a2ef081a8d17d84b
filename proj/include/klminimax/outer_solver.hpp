#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "klminimax/problem.hpp"
#include "klminimax/prox.hpp"
#include "klminimax/subsolver.hpp"

namespace klminimax {

struct OuterConfig {
  KLParams kl;
  SmoothnessParams smooth;
  double epsilon = 1e-2;
  double lambda_bar = 1.0;
  double rho = 0.95;
  std::int64_t max_iters = 1000;
  /// Safety cap for each inner solve.
  std::int64_t inner_max_outer = 1'000'000;

  /// Throws on invalid values; returns warnings (epsilon > 1/e).
  std::vector<std::string> validate() const;
};

/// Step-size constants of the outer method, plus the complexity-bound
/// quantities filled in by complexity_bounds().
struct DerivedConstants {
  double r = 0.0;             ///< trust radius gamma eps^sigma / (4 L_f)
  double M = 0.0;             ///< Hoelder modulus (1-theta)^{-1} C^{-1/theta} L_grad^{1/theta}
  double nu = 0.0;            ///< Hoelder exponent (1-theta)/theta
  double lambda_lower = 0.0;  ///< min(rho / L_grad, lambda_bar)

  double A = 0.0;
  double L_lower = 0.0;
  double a = 0.0;
  double b = 0.0;
  double C_hat[8] = {};
  double K_hat = 0.0;

  double beta_f_lower = 0.0;
  double beta_f_upper = 0.0;
  double c_prime_f = 0.0;
  double Lambda = 0.0;
  double K_bar_f = 0.0;
  double N_hat = 0.0;
};

/// r, M, nu and lambda_lower only.
DerivedConstants derive_constants(const OuterConfig& cfg);

/// Full bound calculator. psi_gap estimates Psi(x0) - Psi*. Throws
/// OutOfRange when epsilon is outside (0, 1/e].
DerivedConstants complexity_bounds(const OuterConfig& cfg, double psi_gap);

struct Schedule {
  double delta = 0.0;
  double eta = 0.0;
  double L = 0.0;
};

/// delta_k = eta_k = 1/(k+1), L_k = L_grad + delta_k^{(nu-1)/(1+nu)} M^{2/(1+nu)}.
Schedule schedule(std::int64_t k, const DerivedConstants& consts,
                  const OuterConfig& cfg);

/// Inner tolerance for the solve that follows step k, with eta_{k+1} = 1/(k+2).
double inner_tolerance(std::int64_t k, const DerivedConstants& consts,
                       const OuterConfig& cfg);

/// argmin over ||u - x|| <= r of <g, u> + (L/2) ||u - x||^2 + p(u).
///
/// The unconstrained minimizer is prox(p, x - g/L, 1/L). When it leaves the
/// ball, the multiplier mu of the ball constraint is found by bisection on
/// ||u(mu) - x|| = r with u(mu) = prox(p, x - g/(L+mu), 1/(L+mu)); the
/// returned point is always inside the ball and its distance to x is within
/// 1e-10 r of the radius.
Vector constrained_prox_step(const Vector& x, const Vector& g, double L,
                             double r, const ProxRegularizer& p);

/// Multiplier reported by the last bisection, exposed for KKT checks.
struct ConstrainedStepResult {
  Vector u;
  double mu = 0.0;
  int bisections = 0;
};
ConstrainedStepResult constrained_prox_step_detailed(const Vector& x, const Vector& g,
                                                     double L, double r,
                                                     const ProxRegularizer& p);

struct OuterIteration {
  std::int64_t k = 0;
  Vector x;  ///< x^k
  double delta = 0.0;
  double eta = 0.0;
  double L = 0.0;
  double tau = 0.0;
  double step_norm = 0.0;  ///< ||x^{k+1} - x^k||
  std::int64_t inner_iters = 0;
  std::int64_t inner_trials = 0;  ///< prox evaluations of q in the inner solve
  double approx_objective = 0.0;  ///< F(x^k, y^k) + p(x^k)
  double stationarity = 0.0;      ///< prox-gradient residual at (x^k, y^k)
};

struct OuterCounters {
  std::int64_t prox_p = 0;  ///< one per constrained step
  std::int64_t prox_q = 0;
  std::int64_t grad_f = 0;
};

struct OuterTrace {
  DerivedConstants constants;
  std::vector<std::string> warnings;
  std::vector<OuterIteration> iterations;
  Vector x_final;
  Vector y_final;
  double final_approx_objective = 0.0;
  double final_stationarity = 0.0;
  /// Index into 0..iterations.size(); the last value denotes the final
  /// iterate.
  std::size_t best_index = 0;
  Vector x_best;
  Vector y_best;
  OuterCounters counters;

  /// "k,step_norm,Lk,tau_k,inner_iters,inner_backtracks,approx_obj,stationarity_surrogate"
  void write_csv(std::ostream& out) const;
};

/// Runs cfg.max_iters iterations of the inexact proximal gradient method from
/// (x0, y0), warm-starting every inner solve from the previous y. The
/// stationarity surrogate uses the step lambda_lower.
OuterTrace solve(const MinimaxProblem& prob, const Vector& x0, const Vector& y0,
                 const OuterConfig& cfg);

}  // namespace klminimax
