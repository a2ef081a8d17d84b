#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <limits>
#include <vector>

#include "klminimax/errors.hpp"
#include "klminimax/problem.hpp"
#include "klminimax/prox.hpp"

namespace klminimax {

/// Smooth part g of h = g + q.
struct SmoothFunction {
  std::function<double(const Vector&)> value;
  std::function<Vector(const Vector&)> gradient;
};

struct SubsolverConfig {
  double lambda_bar = 1.0;
  double rho = 0.5;
  double tau = 1e-6;
  std::int64_t max_outer = 1'000'000;

  void validate() const;
};

enum class SubsolverTermination { StepSmall, CapHit };

/// One accepted step z^k -> z^{k+1}.
struct SubsolverStep {
  double lambda = 0.0;
  int trials = 0;  ///< candidates tried, i + 1 for the accepted lambda_bar rho^i
  double step_norm = 0.0;
  double h_value = 0.0;  ///< h(z^{k+1})
};

struct SubsolverTrace {
  double h_initial = 0.0;
  std::vector<SubsolverStep> steps;
  Vector z;
  SubsolverTermination termination = SubsolverTermination::CapHit;
  std::int64_t gradient_evals = 0;
  std::int64_t prox_evals = 0;

  std::int64_t iterations() const { return static_cast<std::int64_t>(steps.size()); }
  int max_trials() const;

  /// CSV rows "k,lambda_k,backtracks,step_norm,h_value" with a header line.
  void write_csv(std::ostream& out) const;
};

struct SubsolverResult {
  Vector z;
  SubsolverTrace trace;
};

/// Raised for non-finite objective or gradient values; keeps the partial
/// trace.
class SubsolverFailure : public NumericFailure {
 public:
  SubsolverFailure(const std::string& what, SubsolverTrace trace)
      : NumericFailure(what), trace_(std::move(trace)) {}
  const SubsolverTrace& trace() const { return trace_; }

 private:
  SubsolverTrace trace_;
};

/// Rounding allowance in the sufficient-decrease test: h(z+) + ||z+ - z||^2 /
/// (2 lambda) is compared against h(z) + acceptance_slack(h(z), h(z+)).
/// Without it, steps whose decrease is below the resolution of h are rejected
/// forever.
inline double acceptance_slack(double h, double h_candidate) {
  return 4.0 * std::numeric_limits<double>::epsilon() *
         std::max(std::abs(h), std::abs(h_candidate));
}

/// Proximal gradient with backtracking for min_z g(z) + q(z). Every outer
/// iteration restarts the step at lambda_bar and shrinks it by rho until
/// h(z+) + ||z+ - z||^2 / (2 lambda) <= h(z); stops once ||z+ - z|| <= tau.
SubsolverResult subsolve(const SmoothFunction& g, const ProxRegularizer& q,
                         const Vector& z0, const SubsolverConfig& cfg);

/// ceil(log(L lambda_bar) / log(1/rho)) clamped at 0.
int backtrack_bound(double L, const SubsolverConfig& cfg);

/// Constants of the termination analysis for smoothness L.
struct SubsolverBoundConstants {
  double lambda_lower = 0.0;
  double beta_lower = 0.0;
  double beta_upper = 0.0;
  double c_prime = 0.0;
  double iterations = 0.0;  ///< K_theta, integral but possibly beyond int64
};

SubsolverBoundConstants termination_constants(const KLParams& kl, double L,
                                              const SubsolverConfig& cfg);

/// Upper bound on outer iterations; uses kl.C, kl.theta and kl.delta.
double termination_bound(const KLParams& kl, double L, const SubsolverConfig& cfg);

/// (C^{-1} (L + 1/lambda_lower) tau)^{1/theta}.
double objective_gap_bound(const KLParams& kl, double L, const SubsolverConfig& cfg);

}  // namespace klminimax
