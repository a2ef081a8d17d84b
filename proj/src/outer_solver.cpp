#include "klminimax/outer_solver.hpp"

#include <cmath>
#include <limits>
#include <ostream>

#include "klminimax/errors.hpp"

namespace klminimax {
namespace {

constexpr int kMaxBisections = 400;
constexpr double kRadiusTol = 1e-10;

double prox_residual(const ProxRegularizer& p, const Vector& x, const Vector& g,
                     double step) {
  return (x - prox(p, x - step * g, step)).norm() / step;
}

}  // namespace

std::vector<std::string> OuterConfig::validate() const {
  kl.validate();
  smooth.validate();
  if (!(epsilon > 0.0)) throw InvalidArgument("epsilon must be > 0");
  if (!(lambda_bar > 0.0)) throw InvalidArgument("lambda_bar must be > 0");
  if (!(rho > 0.0 && rho < 1.0)) throw InvalidArgument("rho must lie in (0, 1)");
  if (max_iters < 0) throw InvalidArgument("max_iters must be >= 0");
  if (inner_max_outer <= 0) throw InvalidArgument("inner_max_outer must be positive");
  std::vector<std::string> warnings;
  if (epsilon > std::exp(-1.0)) {
    warnings.push_back("epsilon exceeds 1/e; complexity guarantees do not apply");
  }
  return warnings;
}

DerivedConstants derive_constants(const OuterConfig& cfg) {
  cfg.validate();
  const auto& kl = cfg.kl;
  const double lg = cfg.smooth.lipschitz_grad;
  DerivedConstants d;
  d.r = kl.gamma * std::pow(cfg.epsilon, kl.sigma) / (4.0 * cfg.smooth.lipschitz_f);
  d.lambda_lower = std::min(cfg.rho / lg, cfg.lambda_bar);
  d.M = std::pow(kl.C, -1.0 / kl.theta) * std::pow(lg, 1.0 / kl.theta) / (1.0 - kl.theta);
  d.nu = (1.0 - kl.theta) / kl.theta;
  return d;
}

Schedule schedule(std::int64_t k, const DerivedConstants& consts,
                  const OuterConfig& cfg) {
  Schedule s;
  s.delta = 1.0 / static_cast<double>(k + 1);
  s.eta = s.delta;
  const double nu = consts.nu;
  s.L = cfg.smooth.lipschitz_grad +
        std::pow(s.delta, (nu - 1.0) / (1.0 + nu)) * std::pow(consts.M, 2.0 / (1.0 + nu));
  return s;
}

double inner_tolerance(std::int64_t k, const DerivedConstants& consts,
                       const OuterConfig& cfg) {
  const auto& kl = cfg.kl;
  const double eta_next = 1.0 / static_cast<double>(k + 2);
  const double region = std::pow(0.5 * kl.gamma * std::pow(cfg.epsilon, kl.sigma), kl.theta);
  const double schedule_term = std::pow(eta_next, kl.theta / (2.0 * (1.0 - kl.theta)));
  return kl.C / (cfg.smooth.lipschitz_grad + 1.0 / consts.lambda_lower) *
         std::min(region, schedule_term);
}

ConstrainedStepResult constrained_prox_step_detailed(const Vector& x, const Vector& g,
                                                     double L, double r,
                                                     const ProxRegularizer& p) {
  if (!(L > 0.0) || !(r > 0.0)) throw InvalidArgument("constrained_prox_step: L and r must be > 0");
  if (x.size() != g.size()) throw DimensionMismatch("constrained_prox_step: x and g differ in size");
  if (!p.feasible(x)) throw InfeasiblePoint("constrained_prox_step: x is outside dom p");

  auto at = [&](double mu) {
    const double t = 1.0 / (L + mu);
    return prox(p, x - t * g, t);
  };

  ConstrainedStepResult res;
  res.u = at(0.0);
  if ((res.u - x).norm() <= r) return res;

  // Grow the bracket until the trial point re-enters the ball.
  double lo = 0.0;
  double hi = L;
  Vector u_hi = at(hi);
  int grow = 0;
  while ((u_hi - x).norm() > r) {
    lo = hi;
    hi *= 2.0;
    u_hi = at(hi);
    if (++grow > 2000 || !std::isfinite(hi)) {
      throw NumericFailure("constrained_prox_step: failed to bracket the ball multiplier");
    }
  }

  for (int it = 0; it < kMaxBisections; ++it) {
    const double dist_hi = (u_hi - x).norm();
    if (dist_hi >= r * (1.0 - kRadiusTol)) {
      res.u = std::move(u_hi);
      res.mu = hi;
      res.bisections = it;
      return res;
    }
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    Vector u_mid = at(mid);
    if ((u_mid - x).norm() > r) {
      lo = mid;
    } else {
      hi = mid;
      u_hi = std::move(u_mid);
    }
  }
  throw NumericFailure(
      "constrained_prox_step: bisection stalled before ||u - x|| reached the radius");
}

Vector constrained_prox_step(const Vector& x, const Vector& g, double L, double r,
                             const ProxRegularizer& p) {
  return constrained_prox_step_detailed(x, g, L, r, p).u;
}

void OuterTrace::write_csv(std::ostream& out) const {
  const auto precision = out.precision(17);
  out << "k,step_norm,Lk,tau_k,inner_iters,inner_backtracks,approx_obj,stationarity_surrogate\n";
  for (const auto& it : iterations) {
    out << it.k << ',' << it.step_norm << ',' << it.L << ',' << it.tau << ','
        << it.inner_iters << ',' << it.inner_trials << ',' << it.approx_objective << ','
        << it.stationarity << '\n';
  }
  out.precision(precision);
}

OuterTrace solve(const MinimaxProblem& prob, const Vector& x0, const Vector& y0,
                 const OuterConfig& cfg) {
  OuterTrace trace;
  trace.warnings = cfg.validate();
  trace.constants = derive_constants(cfg);
  const auto& consts = trace.constants;
  if (x0.size() != prob.n || y0.size() != prob.m) {
    throw DimensionMismatch("solve: starting point has wrong dimensions");
  }
  if (!prob.p.feasible(x0)) throw InfeasiblePoint("solve: x0 is outside dom p");
  if (!prob.q.feasible(y0)) throw InfeasiblePoint("solve: y0 is outside dom q");

  const double residual_step = consts.lambda_lower;
  Vector x = x0;
  Vector y = y0;
  Vector gx = prob.grad_x(x, y);
  ++trace.counters.grad_f;
  trace.iterations.reserve(static_cast<std::size_t>(cfg.max_iters));

  double best_stationarity = std::numeric_limits<double>::infinity();
  for (std::int64_t k = 0; k < cfg.max_iters; ++k) {
    OuterIteration rec;
    rec.k = k;
    rec.x = x;
    const Schedule s = schedule(k, consts, cfg);
    rec.delta = s.delta;
    rec.eta = s.eta;
    rec.L = s.L;
    rec.approx_objective = prob.inner_value(x, y) + prob.p.value(x);
    rec.stationarity = prox_residual(prob.p, x, gx, residual_step);
    if (rec.stationarity < best_stationarity) {
      best_stationarity = rec.stationarity;
      trace.best_index = static_cast<std::size_t>(k);
      trace.x_best = x;
      trace.y_best = y;
    }

    Vector x_next = constrained_prox_step(x, gx, s.L, consts.r, prob.p);
    ++trace.counters.prox_p;
    rec.step_norm = (x_next - x).norm();

    rec.tau = inner_tolerance(k, consts, cfg);
    SubsolverConfig sub;
    sub.lambda_bar = cfg.lambda_bar;
    sub.rho = cfg.rho;
    sub.tau = rec.tau;
    sub.max_outer = cfg.inner_max_outer;
    SmoothFunction g;
    g.value = [&prob, &x_next](const Vector& yy) { return -prob.value(x_next, yy); };
    g.gradient = [&prob, &x_next](const Vector& yy) {
      return Vector(-prob.grad_y(x_next, yy));
    };
    SubsolverResult inner;
    try {
      inner = subsolve(g, prob.q, y, sub);
    } catch (const SubsolverFailure& e) {
      throw NumericFailure("solve: inner solve failed at outer iteration " +
                           std::to_string(k) + ": " + e.what());
    }
    rec.inner_iters = inner.trace.iterations();
    rec.inner_trials = inner.trace.prox_evals;
    trace.counters.grad_f += inner.trace.gradient_evals;
    trace.counters.prox_q += inner.trace.prox_evals;

    x = std::move(x_next);
    y = std::move(inner.z);
    if (k + 1 < cfg.max_iters) {
      gx = prob.grad_x(x, y);
      ++trace.counters.grad_f;
    }
    trace.iterations.push_back(std::move(rec));
  }

  // Diagnostics at the final iterate are not counted as algorithm work.
  if (cfg.max_iters > 0) gx = prob.grad_x(x, y);
  trace.x_final = x;
  trace.y_final = y;
  trace.final_approx_objective = prob.inner_value(x, y) + prob.p.value(x);
  trace.final_stationarity = prox_residual(prob.p, x, gx, residual_step);
  if (trace.final_stationarity < best_stationarity) {
    trace.best_index = trace.iterations.size();
    trace.x_best = x;
    trace.y_best = y;
  }
  return trace;
}

}  // namespace klminimax
