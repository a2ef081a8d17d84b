#pragma once

#include <cstdint>
#include <functional>

#include "klminimax/problem.hpp"
#include "klminimax/prox.hpp"

namespace klminimax::checks {

/// Coarse-to-fine grid minimization of a convex function over a box in at
/// most 3 dimensions. Each level keeps a +-3 cell window around the incumbent
/// and shrinks the cell by 5 until it is at most `final_spacing`. Points where
/// fn is infinite are skipped. Uses only function values.
struct GridMin {
  Vector arg;
  double value = 0.0;
};
GridMin grid_minimize(const std::function<double(const Vector&)>& fn, const Vector& lo,
                      const Vector& hi, double final_spacing = 1e-4,
                      int coarse_points = 41);

/// Grid oracle for argmin_u reg(u) + ||u - v||^2 / (2t).
GridMin grid_prox(const ProxRegularizer& reg, const Vector& v, double t,
                  double final_spacing = 1e-4);

/// Objective of the proximal subproblem.
double prox_objective(const ProxRegularizer& reg, const Vector& v, double t,
                      const Vector& u);

/// Grid oracle for the ball-constrained step over B(x, r).
GridMin grid_constrained_step(const Vector& x, const Vector& g, double L, double r,
                              const ProxRegularizer& p, double final_spacing = 1e-4);

double constrained_step_objective(const Vector& x, const Vector& g, double L,
                                  const ProxRegularizer& p, const Vector& u);

/// Central differences of f(., y) and f(x, .) with step h; returns the larger
/// of the two relative errors ||g_fd - g|| / max(||g||, 1).
double gradient_rel_error(const MinimaxProblem& prob, const Vector& x, const Vector& y,
                          double h = 1e-5);

struct LipschitzReport {
  std::int64_t samples = 0;
  std::int64_t grad_norm_violations = 0;
  std::int64_t grad_diff_violations = 0;
  double max_grad_norm_ratio = 0.0;  ///< max ||grad_x f|| / L_f
  double max_grad_diff_ratio = 0.0;  ///< max difference quotient / L_grad
};

/// Samples (x, y) uniformly in dom p x dom q and checks ||grad_x f|| <= L_f
/// and ||grad f(z) - grad f(z')|| <= L_grad ||z - z'|| on random pairs.
LipschitzReport lipschitz_sampling(const MinimaxProblem& prob, const SmoothnessParams& smooth,
                                   std::int64_t samples, std::uint64_t seed);

}  // namespace klminimax::checks
