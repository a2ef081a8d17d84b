#include "klminimax/prox.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>

#include "klminimax/errors.hpp"

namespace klminimax {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double soft_threshold(double x, double threshold) {
  // |x| == threshold resolves to 0.
  if (x > threshold) return x - threshold;
  if (x < -threshold) return x + threshold;
  return 0.0;
}

Vector soft_threshold(const Vector& v, double threshold) {
  Vector out(v.size());
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    out[i] = soft_threshold(v[i], threshold);
  }
  return out;
}

Vector project_ball(const Vector& v, const Vector& center, double radius) {
  const Vector d = v - center;
  const double norm = d.norm();
  if (norm <= radius) return v;
  return center + (radius / norm) * d;
}

Vector project_box(const Vector& v, const Vector& lo, const Vector& hi) {
  return v.cwiseMax(lo).cwiseMin(hi);
}

double bound_slack(double bound) {
  return ProxRegularizer::kFeasibilityTol * std::max(1.0, std::abs(bound));
}

// Subdifferential of the coordinate-wise part of a separable regularizer at
// v_i, as a closed interval (endpoints may be infinite).
std::pair<double, double> separable_subdiff(const ProxRegularizer& reg,
                                            Eigen::Index i, double vi) {
  double lo = 0.0;
  double hi = 0.0;
  if (reg.has_l1()) {
    const double w = reg.weight();
    if (vi > 0.0) {
      lo = hi = w;
    } else if (vi < 0.0) {
      lo = hi = -w;
    } else {
      lo = -w;
      hi = w;
    }
  }
  if (reg.has_box()) {
    const double b_lo = reg.lo()[i];
    const double b_hi = reg.hi()[i];
    const bool at_lo = std::abs(vi - b_lo) <= bound_slack(b_lo);
    const bool at_hi = std::abs(vi - b_hi) <= bound_slack(b_hi);
    if (at_lo) lo = -kInf;
    if (at_hi) hi = kInf;
  }
  return {lo, hi};
}

double distance_to_interval(double x, double lo, double hi) {
  if (x < lo) return lo - x;
  if (x > hi) return x - hi;
  return 0.0;
}

}  // namespace

std::string_view to_string(RegularizerKind kind) {
  switch (kind) {
    case RegularizerKind::Zero:
      return "zero";
    case RegularizerKind::L1:
      return "l1";
    case RegularizerKind::Ball:
      return "ball";
    case RegularizerKind::Box:
      return "box";
    case RegularizerKind::L1Ball:
      return "l1_ball";
    case RegularizerKind::L1Box:
      return "l1_box";
  }
  return "unknown";
}

RegularizerKind regularizer_kind_from_string(std::string_view name) {
  for (auto kind : {RegularizerKind::Zero, RegularizerKind::L1,
                    RegularizerKind::Ball, RegularizerKind::Box,
                    RegularizerKind::L1Ball, RegularizerKind::L1Box}) {
    if (to_string(kind) == name) return kind;
  }
  throw UnsupportedRegularizer("unsupported regularizer kind '" +
                               std::string(name) + "'");
}

ProxRegularizer ProxRegularizer::zero() { return ProxRegularizer{}; }

ProxRegularizer ProxRegularizer::l1(double weight) {
  if (!(weight >= 0.0)) throw InvalidArgument("l1 weight must be >= 0");
  ProxRegularizer r;
  r.kind_ = RegularizerKind::L1;
  r.weight_ = weight;
  return r;
}

ProxRegularizer ProxRegularizer::ball(Vector center, double radius) {
  if (!(radius > 0.0)) throw InvalidArgument("ball radius must be > 0");
  ProxRegularizer r;
  r.kind_ = RegularizerKind::Ball;
  r.center_ = std::move(center);
  r.radius_ = radius;
  return r;
}

ProxRegularizer ProxRegularizer::box(Vector lo, Vector hi) {
  if (lo.size() != hi.size()) throw DimensionMismatch("box bounds differ in size");
  if ((lo.array() > hi.array()).any()) throw InvalidArgument("box requires lo <= hi");
  ProxRegularizer r;
  r.kind_ = RegularizerKind::Box;
  r.lo_ = std::move(lo);
  r.hi_ = std::move(hi);
  return r;
}

ProxRegularizer ProxRegularizer::l1_ball(double weight, double radius) {
  if (!(weight >= 0.0)) throw InvalidArgument("l1 weight must be >= 0");
  if (!(radius > 0.0)) throw InvalidArgument("ball radius must be > 0");
  ProxRegularizer r;
  r.kind_ = RegularizerKind::L1Ball;
  r.weight_ = weight;
  r.radius_ = radius;
  return r;
}

ProxRegularizer ProxRegularizer::l1_box(double weight, Vector lo, Vector hi) {
  if (!(weight >= 0.0)) throw InvalidArgument("l1 weight must be >= 0");
  ProxRegularizer r = box(std::move(lo), std::move(hi));
  r.kind_ = RegularizerKind::L1Box;
  r.weight_ = weight;
  return r;
}

bool ProxRegularizer::has_l1() const {
  return kind_ == RegularizerKind::L1 || kind_ == RegularizerKind::L1Ball ||
         kind_ == RegularizerKind::L1Box;
}

bool ProxRegularizer::has_ball() const {
  return kind_ == RegularizerKind::Ball || kind_ == RegularizerKind::L1Ball;
}

bool ProxRegularizer::has_box() const {
  return kind_ == RegularizerKind::Box || kind_ == RegularizerKind::L1Box;
}

void ProxRegularizer::check_dims(const Vector& v) const {
  if (kind_ == RegularizerKind::Ball && center_.size() != v.size()) {
    throw DimensionMismatch("ball center has dimension " +
                            std::to_string(center_.size()) + ", point has " +
                            std::to_string(v.size()));
  }
  if (has_box() && lo_.size() != v.size()) {
    throw DimensionMismatch("box has dimension " + std::to_string(lo_.size()) +
                            ", point has " + std::to_string(v.size()));
  }
}

bool ProxRegularizer::feasible(const Vector& v) const {
  check_dims(v);
  if (!v.allFinite()) return false;
  if (has_ball()) {
    const double norm =
        kind_ == RegularizerKind::Ball ? (v - center_).norm() : v.norm();
    return norm <= radius_ * (1.0 + kFeasibilityTol);
  }
  if (has_box()) {
    for (Eigen::Index i = 0; i < v.size(); ++i) {
      if (v[i] < lo_[i] - bound_slack(lo_[i]) ||
          v[i] > hi_[i] + bound_slack(hi_[i])) {
        return false;
      }
    }
  }
  return true;
}

double ProxRegularizer::l1_value(const Vector& v) const {
  return has_l1() ? weight_ * v.lpNorm<1>() : 0.0;
}

double ProxRegularizer::value(const Vector& v) const {
  if (!feasible(v)) return kInf;
  return l1_value(v);
}

Vector prox(const ProxRegularizer& reg, const Vector& v, double t) {
  if (!(t > 0.0)) throw InvalidArgument("prox step t must be > 0");
  if (!v.allFinite()) throw NumericFailure("prox input is not finite");
  switch (reg.kind()) {
    case RegularizerKind::Zero:
      return v;
    case RegularizerKind::L1:
      return soft_threshold(v, t * reg.weight());
    case RegularizerKind::Ball:
      if (reg.center().size() != v.size()) {
        throw DimensionMismatch("ball center dimension differs from input");
      }
      return project_ball(v, reg.center(), reg.radius());
    case RegularizerKind::Box:
      if (reg.lo().size() != v.size()) {
        throw DimensionMismatch("box dimension differs from input");
      }
      return project_box(v, reg.lo(), reg.hi());
    case RegularizerKind::L1Ball:
      return project_ball(soft_threshold(v, t * reg.weight()),
                          Vector::Zero(v.size()), reg.radius());
    case RegularizerKind::L1Box:
      if (reg.lo().size() != v.size()) {
        throw DimensionMismatch("box dimension differs from input");
      }
      return project_box(soft_threshold(v, t * reg.weight()), reg.lo(),
                         reg.hi());
  }
  throw UnsupportedRegularizer("prox: unsupported regularizer kind");
}

double subdiff_distance(const ProxRegularizer& reg, const Vector& v,
                        const Vector& g) {
  if (v.size() != g.size()) throw DimensionMismatch("subdiff_distance: v and g differ in size");
  if (!reg.feasible(v)) {
    throw InfeasiblePoint("subdiff_distance: point outside the regularizer's domain");
  }
  switch (reg.kind()) {
    case RegularizerKind::Zero:
      return g.norm();
    case RegularizerKind::L1:
    case RegularizerKind::Box:
    case RegularizerKind::L1Box: {
      double sq = 0.0;
      for (Eigen::Index i = 0; i < v.size(); ++i) {
        const auto [lo, hi] = separable_subdiff(reg, i, v[i]);
        const double d = distance_to_interval(-g[i], lo, hi);
        sq += d * d;
      }
      return std::sqrt(sq);
    }
    case RegularizerKind::Ball:
    case RegularizerKind::L1Ball: {
      const Vector offset = reg.kind() == RegularizerKind::Ball
                                ? Vector(v - reg.center())
                                : v;
      const bool on_boundary =
          offset.norm() >= reg.radius() * (1.0 - ProxRegularizer::kFeasibilityTol);
      // Closest point of g + d(l1) to 0 with the l1 part resolved per
      // coordinate; coordinates with v_i != 0 carry a fixed value a_i and
      // respond to the normal-cone term mu * v_i.
      const double w = reg.kind() == RegularizerKind::L1Ball ? reg.weight() : 0.0;
      Vector fixed = g;
      double free_sq = 0.0;
      for (Eigen::Index i = 0; i < v.size(); ++i) {
        if (w > 0.0 && v[i] == 0.0) {
          const double d = std::max(0.0, std::abs(g[i]) - w);
          free_sq += d * d;
          fixed[i] = 0.0;
        } else if (w > 0.0) {
          fixed[i] = g[i] + w * (v[i] > 0.0 ? 1.0 : -1.0);
        }
      }
      if (!on_boundary) return std::sqrt(fixed.squaredNorm() + free_sq);
      // The normal cone at a boundary point is {mu * offset : mu >= 0}; it
      // only acts on coordinates with offset_i != 0.
      Vector dir = offset;
      if (w > 0.0) {
        for (Eigen::Index i = 0; i < v.size(); ++i) {
          if (v[i] == 0.0) dir[i] = 0.0;
        }
      }
      const double dir_sq = dir.squaredNorm();
      double mu = 0.0;
      if (dir_sq > 0.0) mu = std::max(0.0, -fixed.dot(dir) / dir_sq);
      // A ball boundary point with v_i == 0 but offset_i != 0 only occurs
      // for an off-centre Ball, which has no l1 part.
      return std::sqrt((fixed + mu * dir).squaredNorm() + free_sq);
    }
  }
  throw UnsupportedRegularizer("subdiff_distance: unsupported regularizer kind");
}

}  // namespace klminimax
