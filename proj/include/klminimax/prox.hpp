#pragma once

#include <Eigen/Dense>
#include <string>
#include <string_view>

namespace klminimax {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

enum class RegularizerKind { Zero, L1, Ball, Box, L1Ball, L1Box };

std::string_view to_string(RegularizerKind kind);
/// Throws UnsupportedRegularizer for unknown names.
RegularizerKind regularizer_kind_from_string(std::string_view name);

/// Closed convex regularizer with an exact proximal operator: zero, weighted
/// l1, indicators of a Euclidean ball or a box, and the l1 + indicator sums
/// used by the benchmark problem. The l1 + ball variant is centred at 0.
class ProxRegularizer {
 public:
  static ProxRegularizer zero();
  static ProxRegularizer l1(double weight);
  static ProxRegularizer ball(Vector center, double radius);
  static ProxRegularizer box(Vector lo, Vector hi);
  static ProxRegularizer l1_ball(double weight, double radius);
  static ProxRegularizer l1_box(double weight, Vector lo, Vector hi);

  RegularizerKind kind() const { return kind_; }
  double weight() const { return weight_; }
  double radius() const { return radius_; }
  const Vector& center() const { return center_; }
  const Vector& lo() const { return lo_; }
  const Vector& hi() const { return hi_; }

  bool has_l1() const;
  bool has_ball() const;
  bool has_box() const;

  /// True when v lies in the indicator's set (relative slack
  /// kFeasibilityTol for the ball, exact comparison for boxes).
  bool feasible(const Vector& v) const;

  /// reg(v); +infinity outside the indicator's set.
  double value(const Vector& v) const;

  /// Weighted l1 part only; finite everywhere.
  double l1_value(const Vector& v) const;

  static constexpr double kFeasibilityTol = 1e-10;

 private:
  ProxRegularizer() = default;
  void check_dims(const Vector& v) const;

  RegularizerKind kind_ = RegularizerKind::Zero;
  double weight_ = 0.0;
  double radius_ = 0.0;
  Vector center_;
  Vector lo_;
  Vector hi_;
};

/// argmin_u { reg(u) + ||u - v||^2 / (2 t) }.
Vector prox(const ProxRegularizer& reg, const Vector& v, double t);

/// dist(0, g + d reg(v)) computed exactly. Throws InfeasiblePoint when v is
/// outside the regularizer's domain.
double subdiff_distance(const ProxRegularizer& reg, const Vector& v,
                        const Vector& g);

}  // namespace klminimax
