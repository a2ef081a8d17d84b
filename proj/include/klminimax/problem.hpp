#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>

#include "klminimax/prox.hpp"

namespace klminimax {

/// Lipschitz constant of f(., y) and of the full gradient of f.
struct SmoothnessParams {
  double lipschitz_f = 1.0;
  double lipschitz_grad = 1.0;

  void validate() const;
};

/// Local KL constants of the inner problem: C (F* - F)^theta <= dist(0, d_y F)
/// on the level set {0 < F* - F <= gamma dist(0, dPsi)^sigma}. `delta` is the
/// KL region size used by the standalone subsolver bound.
struct KLParams {
  double C = 1.0;
  double theta = 0.5;
  double gamma = 1.0;
  double sigma = 1.0;
  double delta = 1.0;

  void validate() const;
};

/// Separable view of y -> F(x, y) = f(x, y) - q(y) at a fixed x:
/// F(x, y) = constant + sum_i coordinate(i, y_i) with y_i in [lo_i, hi_i].
struct SeparableInner {
  double constant = 0.0;
  std::function<double(Eigen::Index, double)> coordinate;
  Vector lo;
  Vector hi;
};

/// min_x max_y f(x, y) + p(x) - q(y) with a smooth coupling f.
struct MinimaxProblem {
  std::string name;
  Eigen::Index n = 0;
  Eigen::Index m = 0;
  std::function<double(const Vector&, const Vector&)> value;
  std::function<Vector(const Vector&, const Vector&)> grad_x;
  std::function<Vector(const Vector&, const Vector&)> grad_y;
  ProxRegularizer p = ProxRegularizer::zero();
  ProxRegularizer q = ProxRegularizer::zero();
  /// Present when the inner problem decomposes per coordinate of y.
  std::function<SeparableInner(const Vector&)> separable_inner;

  /// F(x, y) = f(x, y) - q(y).
  double inner_value(const Vector& x, const Vector& y) const;
  /// f(x, y) + p(x) - q(y).
  double objective(const Vector& x, const Vector& y) const;
};

/// min_{1<=x<=2} max_{pi/4<=y<=pi} x (cos y - 1).
MinimaxProblem toy_problem();
/// L_f = 2 and L_grad_f = 2 on [1, 2] x [pi/4, pi].
SmoothnessParams toy_smoothness();

/// Random benchmark instance with A, B (m x n) and c (n) drawn i.i.d. standard
/// normal from a seeded stream (A row-major, then B, then c).
struct HadamardInstance {
  Eigen::Index m = 0;
  Eigen::Index n = 0;
  std::uint64_t seed = 0;
  std::string rng_name;
  Matrix A;
  Matrix B;
  Vector c;

  static HadamardInstance generate(Eigen::Index m, Eigen::Index n,
                                   std::uint64_t seed);
  /// Wraps explicit data; seed is informational.
  static HadamardInstance from_data(Matrix A, Matrix B, Vector c,
                                    std::uint64_t seed = 0);

  std::string to_json() const;
  /// Regenerates the matrices from {m, n, seed, rng_name}.
  static HadamardInstance from_json(const std::string& text);
};

/// f(x, y) = -||(y + Ax) o (y + Bx)||^2 + 0.01 ||x - c||^2,
/// p = 0.01 ||x||_1 + I_{||x|| <= 1}, q = 0.1 ||y||_1 + I_{[-2,2]^m}.
MinimaxProblem hadamard_problem(const HadamardInstance& inst);

/// Closed-form majorants of ||grad_x f|| and of the Lipschitz constant of
/// grad f over the unit ball times [-2, 2]^m.
SmoothnessParams hadamard_lipschitz(const HadamardInstance& inst);

/// Largest singular value by power iteration on M^T M from the normalized
/// all-ones vector.
double spectral_norm(const Matrix& M, int max_iters = 10000, double tol = 1e-10);

}  // namespace klminimax
