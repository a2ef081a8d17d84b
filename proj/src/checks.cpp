#include "klminimax/checks.hpp"

#include <cmath>
#include <limits>

#include "klminimax/errors.hpp"
#include "klminimax/rng.hpp"

namespace klminimax::checks {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

Vector draw(const ProxRegularizer& reg, Eigen::Index dim, Rng& rng) {
  Vector v(dim);
  if (reg.has_box()) {
    for (Eigen::Index i = 0; i < dim; ++i) v[i] = rng.uniform(reg.lo()[i], reg.hi()[i]);
    return v;
  }
  if (reg.has_ball()) {
    for (Eigen::Index i = 0; i < dim; ++i) v[i] = rng.normal();
    v *= reg.radius() * std::pow(rng.uniform(), 1.0 / static_cast<double>(dim)) / v.norm();
    if (reg.kind() == RegularizerKind::Ball) v += reg.center();
    return v;
  }
  throw InvalidArgument("sampling requires a bounded (ball or box) regularizer");
}

// Bounding box of dom reg intersected with a box around `around`.
void search_box(const ProxRegularizer& reg, const Vector& around, double half_width,
                Vector& lo, Vector& hi) {
  const Eigen::Index d = around.size();
  lo = around.array() - half_width;
  hi = around.array() + half_width;
  if (reg.has_box()) {
    lo = lo.cwiseMax(reg.lo());
    hi = hi.cwiseMin(reg.hi());
  }
  if (reg.has_ball()) {
    const Vector c = reg.kind() == RegularizerKind::Ball ? reg.center() : Vector::Zero(d);
    lo = lo.cwiseMax((c.array() - reg.radius()).matrix());
    hi = hi.cwiseMin((c.array() + reg.radius()).matrix());
  }
}

}  // namespace

GridMin grid_minimize(const std::function<double(const Vector&)>& fn, const Vector& lo,
                      const Vector& hi, double final_spacing, int coarse_points) {
  const Eigen::Index d = lo.size();
  if (d < 1 || d > 3) throw InvalidArgument("grid_minimize supports 1 to 3 dimensions");
  GridMin best;
  best.value = kInf;
  best.arg = lo;

  Vector cell(d);
  std::vector<int> counts(d);
  Vector win_lo = lo;
  Vector win_hi = hi;
  for (Eigen::Index i = 0; i < d; ++i) {
    counts[i] = hi[i] > lo[i] ? coarse_points : 1;
    cell[i] = hi[i] > lo[i] ? (hi[i] - lo[i]) / (coarse_points - 1) : 0.0;
  }

  while (true) {
    std::vector<int> idx(d, 0);
    Vector u(d);
    while (true) {
      for (Eigen::Index i = 0; i < d; ++i) {
        u[i] = std::min(win_lo[i] + cell[i] * idx[i], hi[i]);
      }
      const double v = fn(u);
      if (v < best.value) {
        best.value = v;
        best.arg = u;
      }
      Eigen::Index k = 0;
      while (k < d && ++idx[k] >= counts[k]) idx[k++] = 0;
      if (k == d) break;
    }
    if (cell.maxCoeff() <= final_spacing) break;
    if (!std::isfinite(best.value)) {
      throw NumericFailure("grid_minimize: no finite point found on the coarse grid");
    }
    for (Eigen::Index i = 0; i < d; ++i) {
      if (cell[i] == 0.0) continue;
      win_lo[i] = std::max(lo[i], best.arg[i] - 3.0 * cell[i]);
      win_hi[i] = std::min(hi[i], best.arg[i] + 3.0 * cell[i]);
      const double next = std::max(cell[i] / 5.0, std::min(cell[i], final_spacing));
      cell[i] = next;
      counts[i] = static_cast<int>(std::floor((win_hi[i] - win_lo[i]) / cell[i])) + 2;
    }
  }
  return best;
}

double prox_objective(const ProxRegularizer& reg, const Vector& v, double t, const Vector& u) {
  return reg.value(u) + (u - v).squaredNorm() / (2.0 * t);
}

GridMin grid_prox(const ProxRegularizer& reg, const Vector& v, double t, double final_spacing) {
  // The l1 part moves each coordinate by at most t * weight; indicators keep
  // the minimizer inside their bounding box.
  const double half = (reg.has_l1() ? t * reg.weight() : 0.0) + 1.0 +
                      (reg.has_ball() || reg.has_box() ? 1e6 : 0.0);
  Vector lo;
  Vector hi;
  search_box(reg, v, half, lo, hi);
  if (!reg.has_ball() && !reg.has_box()) {
    lo = v.array() - half;
    hi = v.array() + half;
  }
  return grid_minimize([&](const Vector& u) { return prox_objective(reg, v, t, u); }, lo, hi,
                       final_spacing);
}

double constrained_step_objective(const Vector& x, const Vector& g, double L,
                                  const ProxRegularizer& p, const Vector& u) {
  return g.dot(u) + 0.5 * L * (u - x).squaredNorm() + p.value(u);
}

GridMin grid_constrained_step(const Vector& x, const Vector& g, double L, double r,
                              const ProxRegularizer& p, double final_spacing) {
  Vector lo;
  Vector hi;
  search_box(p, x, r, lo, hi);
  auto fn = [&](const Vector& u) {
    if ((u - x).norm() > r) return kInf;
    return constrained_step_objective(x, g, L, p, u);
  };
  return grid_minimize(fn, lo, hi, final_spacing);
}

double gradient_rel_error(const MinimaxProblem& prob, const Vector& x, const Vector& y,
                          double h) {
  const Vector gx = prob.grad_x(x, y);
  const Vector gy = prob.grad_y(x, y);
  Vector fx(x.size());
  Vector fy(y.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    Vector xp = x;
    Vector xm = x;
    xp[i] += h;
    xm[i] -= h;
    fx[i] = (prob.value(xp, y) - prob.value(xm, y)) / (2.0 * h);
  }
  for (Eigen::Index i = 0; i < y.size(); ++i) {
    Vector yp = y;
    Vector ym = y;
    yp[i] += h;
    ym[i] -= h;
    fy[i] = (prob.value(x, yp) - prob.value(x, ym)) / (2.0 * h);
  }
  const double ex = (fx - gx).norm() / std::max(gx.norm(), 1.0);
  const double ey = (fy - gy).norm() / std::max(gy.norm(), 1.0);
  return std::max(ex, ey);
}

LipschitzReport lipschitz_sampling(const MinimaxProblem& prob, const SmoothnessParams& smooth,
                                   std::int64_t samples, std::uint64_t seed) {
  Rng rng(seed);
  LipschitzReport rep;
  for (std::int64_t s = 0; s < samples; ++s) {
    const Vector x = draw(prob.p, prob.n, rng);
    const Vector y = draw(prob.q, prob.m, rng);
    const Vector x2 = draw(prob.p, prob.n, rng);
    const Vector y2 = draw(prob.q, prob.m, rng);
    ++rep.samples;

    const Vector gx = prob.grad_x(x, y);
    const double norm_ratio = gx.norm() / smooth.lipschitz_f;
    rep.max_grad_norm_ratio = std::max(rep.max_grad_norm_ratio, norm_ratio);
    if (norm_ratio > 1.0) ++rep.grad_norm_violations;

    Vector g1(prob.n + prob.m);
    Vector g2(prob.n + prob.m);
    g1 << gx, prob.grad_y(x, y);
    g2 << prob.grad_x(x2, y2), prob.grad_y(x2, y2);
    const double dz = std::sqrt((x - x2).squaredNorm() + (y - y2).squaredNorm());
    if (dz == 0.0) continue;
    const double diff_ratio = (g1 - g2).norm() / (dz * smooth.lipschitz_grad);
    rep.max_grad_diff_ratio = std::max(rep.max_grad_diff_ratio, diff_ratio);
    if (diff_ratio > 1.0) ++rep.grad_diff_violations;
  }
  return rep;
}

}  // namespace klminimax::checks
