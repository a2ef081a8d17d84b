#include "klminimax/oracle.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "json.hpp"
#include "klminimax/errors.hpp"
#include "klminimax/rng.hpp"

namespace klminimax {
namespace {

struct ScalarMax {
  double arg = 0.0;
  double value = -std::numeric_limits<double>::infinity();
  double spread = 0.0;
};

template <class Fn>
ScalarMax golden_section_max(Fn&& fn, double a, double b, double width) {
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = fn(c);
  double fd = fn(d);
  int guard = 0;
  while (b - a > width && ++guard < 400) {
    if (fc >= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = fn(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = fn(d);
    }
  }
  ScalarMax out;
  out.arg = fc >= fd ? c : d;
  out.value = std::max(fc, fd);
  out.spread = std::abs(fn(a) - fn(b));
  return out;
}

template <class Fn>
ScalarMax maximize_scalar(Fn&& fn, double lo, double hi, const GridParams& grid) {
  ScalarMax best;
  auto consider = [&](double t) {
    const double v = fn(t);
    if (v > best.value) {
      best.value = v;
      best.arg = t;
    }
  };
  if (lo == hi) {
    consider(lo);
    return best;
  }
  const int n = std::max(grid.points, 3);
  const double h = (hi - lo) / static_cast<double>(n - 1);
  int best_j = 0;
  for (int j = 0; j < n; ++j) {
    const double t = j == n - 1 ? hi : lo + h * j;
    const double v = fn(t);
    if (v > best.value) {
      best.value = v;
      best.arg = t;
      best_j = j;
    }
  }
  const double a = best_j == 0 ? lo : lo + h * (best_j - 1);
  const double b = best_j == n - 1 ? hi : lo + h * (best_j + 1);
  const ScalarMax refined = golden_section_max(fn, a, b, grid.refine_width);
  if (refined.value > best.value) {
    best.value = refined.value;
    best.arg = refined.arg;
  }
  best.spread = refined.spread;
  consider(lo);
  consider(hi);
  if (lo < 0.0 && hi > 0.0) consider(0.0);
  return best;
}

// Uniform draw from the indicator part of a bounded regularizer.
Vector sample_domain(const ProxRegularizer& reg, Eigen::Index dim, Rng& rng) {
  Vector v(dim);
  if (reg.has_box()) {
    for (Eigen::Index i = 0; i < dim; ++i) v[i] = rng.uniform(reg.lo()[i], reg.hi()[i]);
    return v;
  }
  if (reg.has_ball()) {
    for (Eigen::Index i = 0; i < dim; ++i) v[i] = rng.normal();
    const double norm = v.norm();
    const double radius =
        reg.radius() * std::pow(rng.uniform(), 1.0 / static_cast<double>(dim));
    v *= radius / norm;
    if (reg.kind() == RegularizerKind::Ball) v += reg.center();
    return v;
  }
  throw InvalidArgument("sampling requires a bounded (ball or box) regularizer");
}

}  // namespace

OracleResult inner_max_separable(const MinimaxProblem& prob, const Vector& x,
                                 const GridParams& grid) {
  if (!prob.separable_inner) {
    throw InvalidArgument("inner_max_separable: problem '" + prob.name +
                          "' has no separable inner structure");
  }
  if (x.size() != prob.n) throw DimensionMismatch("inner_max_separable: x has wrong size");
  const SeparableInner inner = prob.separable_inner(x);
  OracleResult res;
  res.y_star.resize(prob.m);
  double total = inner.constant;
  for (Eigen::Index i = 0; i < prob.m; ++i) {
    auto fn = [&inner, i](double t) { return inner.coordinate(i, t); };
    const ScalarMax best = maximize_scalar(fn, inner.lo[i], inner.hi[i], grid);
    res.y_star[i] = best.arg;
    total += best.value;
    res.residual += best.spread;
  }
  res.F_star = total;
  return res;
}

double value_function(const MinimaxProblem& prob, const Vector& x, const GridParams& grid) {
  if (!prob.p.feasible(x)) throw InfeasiblePoint("value_function: x is outside dom p");
  return inner_max_separable(prob, x, grid).F_star + prob.p.value(x);
}

StationarityReport stationarity_surrogate(const MinimaxProblem& prob, const Vector& x,
                                          double step, const GridParams& grid) {
  if (!(step > 0.0)) throw InvalidArgument("stationarity_surrogate: step must be > 0");
  StationarityReport rep;
  rep.y_star = inner_max_separable(prob, x, grid).y_star;
  rep.gradient = prob.grad_x(x, rep.y_star);
  rep.residual = (x - prox(prob.p, x - step * rep.gradient, step)).norm() / step;
  rep.exact_distance = subdiff_distance(prob.p, x, rep.gradient);
  return rep;
}

std::string KLReport::to_json() const {
  nlohmann::json j;
  j["x"] = std::vector<double>(x.data(), x.data() + x.size());
  j["F_star"] = F_star;
  j["violations"] = violations;
  j["worst_margin"] = worst_margin;
  j["samples_in_level_set"] = samples_in_level_set;
  j["draws"] = draws;
  j["level_bound"] = level_bound;
  j["distance_source"] = distance_source;
  j["inconclusive"] = inconclusive();
  return j.dump();
}

KLReport kl_verify(const MinimaxProblem& prob, const Vector& x, const KLParams& kl,
                   std::int64_t samples, std::uint64_t seed, const GridParams& grid,
                   std::int64_t max_draws) {
  kl.validate();
  if (samples <= 0) throw InvalidArgument("kl_verify: samples must be positive");
  if (max_draws <= 0) max_draws = 100 * samples;

  const StationarityReport stat = stationarity_surrogate(prob, x, 1.0, grid);
  const OracleResult oracle = inner_max_separable(prob, x, grid);
  KLReport rep;
  rep.x = x;
  rep.F_star = oracle.F_star;
  rep.distance_source = "exact";
  rep.level_bound = kl.gamma * std::pow(stat.exact_distance, kl.sigma);
  rep.worst_margin = std::numeric_limits<double>::infinity();

  Rng rng(seed);
  while (rep.draws < max_draws && rep.samples_in_level_set < samples) {
    ++rep.draws;
    const Vector y = sample_domain(prob.q, prob.m, rng);
    const double gap = oracle.F_star - prob.inner_value(x, y);
    if (!(gap > 0.0 && gap <= rep.level_bound)) continue;
    ++rep.samples_in_level_set;
    // d_y F = grad_y f - dq(y).
    const double dist = subdiff_distance(prob.q, y, -prob.grad_y(x, y));
    const double margin = dist - kl.C * std::pow(gap, kl.theta);
    rep.worst_margin = std::min(rep.worst_margin, margin);
    if (margin < -1e-12 * std::max(1.0, dist)) ++rep.violations;
  }
  if (rep.samples_in_level_set == 0) rep.worst_margin = 0.0;
  return rep;
}

HolderReport holder_verify(const MinimaxProblem& prob, const SmoothnessParams& smooth,
                           const KLParams& kl, double epsilon, std::int64_t pairs,
                           std::uint64_t seed, const GridParams& grid) {
  kl.validate();
  smooth.validate();
  HolderReport rep;
  rep.radius = kl.gamma * std::pow(epsilon, kl.sigma) / (2.0 * smooth.lipschitz_f);
  const double lg = smooth.lipschitz_grad;
  const double M =
      std::pow(kl.C, -1.0 / kl.theta) * std::pow(lg, 1.0 / kl.theta) / (1.0 - kl.theta);
  const double nu = (1.0 - kl.theta) / kl.theta;

  Rng rng(seed);
  const std::int64_t max_attempts = 1000 * pairs;
  for (std::int64_t attempt = 0; attempt < max_attempts && rep.pairs < pairs; ++attempt) {
    const Vector x = sample_domain(prob.p, prob.n, rng);
    Vector dir(prob.n);
    for (Eigen::Index i = 0; i < prob.n; ++i) dir[i] = rng.normal();
    dir.normalize();
    const Vector xp = x + rng.uniform() * rep.radius * dir;
    if (!prob.p.feasible(xp) || (xp - x).norm() == 0.0) continue;
    const auto sx = stationarity_surrogate(prob, x, 1.0, grid);
    if (!(sx.exact_distance > epsilon)) continue;
    const auto sxp = stationarity_surrogate(prob, xp, 1.0, grid);
    if (!(sxp.exact_distance > epsilon)) continue;
    ++rep.pairs;
    const double d = (x - xp).norm();
    const double lhs = (sx.gradient - sxp.gradient).norm();
    const double rhs = lg * d + M * std::pow(d, nu);
    rep.worst_ratio = std::max(rep.worst_ratio, lhs / rhs);
    if (lhs > rhs * (1.0 + 1e-12)) ++rep.violations;
  }
  return rep;
}

}  // namespace klminimax
