#include "klminimax/subsolver.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

namespace klminimax {
namespace {

// Line-search trials per outer iteration before giving up; only reachable
// when g is not smooth on dom q or evaluates to garbage.
constexpr int kMaxTrials = 2000;

double ceil_plus(double x) { return std::max(0.0, std::ceil(x)); }

}  // namespace

void SubsolverConfig::validate() const {
  if (!(lambda_bar > 0.0)) throw InvalidArgument("lambda_bar must be > 0");
  if (!(rho > 0.0 && rho < 1.0)) throw InvalidArgument("rho must lie in (0, 1)");
  if (!(tau > 0.0)) throw InvalidArgument("tau must be > 0");
  if (max_outer <= 0) throw InvalidArgument("max_outer must be positive");
}

int SubsolverTrace::max_trials() const {
  int best = 0;
  for (const auto& s : steps) best = std::max(best, s.trials);
  return best;
}

void SubsolverTrace::write_csv(std::ostream& out) const {
  const auto precision = out.precision(17);
  out << "k,lambda_k,backtracks,step_norm,h_value\n";
  for (std::size_t k = 0; k < steps.size(); ++k) {
    const auto& s = steps[k];
    out << k << ',' << s.lambda << ',' << s.trials << ',' << s.step_norm << ','
        << s.h_value << '\n';
  }
  out.precision(precision);
}

SubsolverResult subsolve(const SmoothFunction& g, const ProxRegularizer& q,
                         const Vector& z0, const SubsolverConfig& cfg) {
  cfg.validate();
  if (!q.feasible(z0)) throw InfeasiblePoint("subsolve: z0 is outside dom q");

  SubsolverTrace trace;
  Vector z = z0;
  double h = g.value(z) + q.value(z);
  trace.h_initial = h;
  trace.z = z;
  if (!std::isfinite(h)) {
    throw SubsolverFailure("subsolve: h(z0) is not finite", std::move(trace));
  }

  for (std::int64_t k = 0; k < cfg.max_outer; ++k) {
    const Vector grad = g.gradient(z);
    ++trace.gradient_evals;
    if (!grad.allFinite()) {
      trace.z = z;
      throw SubsolverFailure("subsolve: gradient is not finite at outer iteration " +
                                 std::to_string(k),
                             std::move(trace));
    }

    double lambda = cfg.lambda_bar;
    bool accepted = false;
    SubsolverStep step;
    Vector candidate;
    for (int i = 0; i < kMaxTrials; ++i) {
      candidate = prox(q, z - lambda * grad, lambda);
      ++trace.prox_evals;
      const double h_candidate = g.value(candidate) + q.value(candidate);
      const double dist_sq = (candidate - z).squaredNorm();
      if (std::isnan(h_candidate)) {
        trace.z = z;
        throw SubsolverFailure("subsolve: objective is NaN at a trial point",
                               std::move(trace));
      }
      if (h_candidate + dist_sq / (2.0 * lambda) <= h + acceptance_slack(h, h_candidate)) {
        step.lambda = lambda;
        step.trials = i + 1;
        step.step_norm = std::sqrt(dist_sq);
        step.h_value = h_candidate;
        accepted = true;
        break;
      }
      lambda *= cfg.rho;
    }
    if (!accepted) {
      trace.z = z;
      throw SubsolverFailure("subsolve: line search failed to find a descent step at outer iteration " +
                                 std::to_string(k),
                             std::move(trace));
    }

    z = std::move(candidate);
    h = step.h_value;
    trace.steps.push_back(step);
    if (step.step_norm <= cfg.tau) {
      trace.termination = SubsolverTermination::StepSmall;
      break;
    }
  }
  trace.z = z;
  return {std::move(z), std::move(trace)};
}

int backtrack_bound(double L, const SubsolverConfig& cfg) {
  if (!(L > 0.0)) throw InvalidArgument("backtrack_bound: L must be > 0");
  return static_cast<int>(ceil_plus(std::log(L * cfg.lambda_bar) / std::log(1.0 / cfg.rho)));
}

SubsolverBoundConstants termination_constants(const KLParams& kl, double L,
                                              const SubsolverConfig& cfg) {
  kl.validate();
  cfg.validate();
  if (!(L > 0.0)) throw InvalidArgument("termination_bound: L must be > 0");
  SubsolverBoundConstants k;
  const double lam_bar = cfg.lambda_bar;
  k.lambda_lower = std::min(cfg.rho / L, lam_bar);
  const double c2 = kl.C * kl.C;
  k.beta_lower = c2 / (2.0 * lam_bar) * std::pow(L + 1.0 / k.lambda_lower, -2.0);
  k.beta_upper = c2 / (2.0 * k.lambda_lower) * std::pow(L + 1.0 / lam_bar, -2.0);
  const double theta = kl.theta;
  if (theta == 0.5) {
    // Limit of the expression below as theta -> 1/2; unused by the bound.
    k.c_prime = std::min(0.5, std::log(2.0) / k.beta_upper);
    k.iterations =
        ceil_plus((1.0 + k.beta_lower) / k.beta_lower *
                  std::log(2.0 * lam_bar * kl.delta / (cfg.tau * cfg.tau))) +
        1.0;
  } else {
    const double e = 2.0 * theta - 1.0;
    k.c_prime = std::min(0.5, (std::pow(2.0, e / (2.0 * theta)) - 1.0) *
                                  std::pow(kl.delta, 1.0 - 2.0 * theta) /
                                  (e * k.beta_upper));
    k.iterations = std::ceil(1.0 / (k.c_prime * e * k.beta_lower) *
                             std::pow(2.0 * lam_bar / (cfg.tau * cfg.tau), e)) +
                   1.0;
  }
  return k;
}

double termination_bound(const KLParams& kl, double L, const SubsolverConfig& cfg) {
  return termination_constants(kl, L, cfg).iterations;
}

double objective_gap_bound(const KLParams& kl, double L, const SubsolverConfig& cfg) {
  const double lambda_lower = std::min(cfg.rho / L, cfg.lambda_bar);
  return std::pow((L + 1.0 / lambda_lower) * cfg.tau / kl.C, 1.0 / kl.theta);
}

}  // namespace klminimax
