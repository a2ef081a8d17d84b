#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "klminimax/problem.hpp"

namespace klminimax {

struct GridParams {
  int points = 10000;          ///< grid points per coordinate, endpoints included
  double refine_width = 1e-12; ///< golden-section stopping width
};

struct OracleResult {
  Vector y_star;
  double F_star = 0.0;
  /// Sum over coordinates of the value spread inside the final refinement
  /// bracket; bounds how far F_star may sit below the bracketed maximum.
  double residual = 0.0;
};

/// Global maximization of y -> F(x, y) for problems that expose a separable
/// inner structure: dense grid per coordinate, then golden-section search on
/// the bracket around the best grid point. Endpoints and y_i = 0 are also
/// evaluated as candidates.
OracleResult inner_max_separable(const MinimaxProblem& prob, const Vector& x,
                                 const GridParams& grid = {});

/// Psi(x) = F*(x) + p(x). Throws InfeasiblePoint when x is outside dom p.
double value_function(const MinimaxProblem& prob, const Vector& x,
                      const GridParams& grid = {});

struct StationarityReport {
  Vector gradient;  ///< grad_x f(x, y*) = grad F*(x)
  Vector y_star;
  double residual = 0.0;  ///< ||x - prox(p, x - step g, step)|| / step
  double exact_distance = 0.0;  ///< dist(0, g + dp(x))
};

StationarityReport stationarity_surrogate(const MinimaxProblem& prob, const Vector& x,
                                          double step, const GridParams& grid = {});

struct KLReport {
  Vector x;
  double F_star = 0.0;
  double level_bound = 0.0;  ///< gamma dist(0, dPsi(x))^sigma
  std::string distance_source;
  std::int64_t draws = 0;
  std::int64_t samples_in_level_set = 0;
  std::int64_t violations = 0;
  /// min over retained samples of dist(0, d_y F) - C gap^theta.
  double worst_margin = 0.0;

  bool inconclusive() const { return samples_in_level_set == 0; }
  std::string to_json() const;
};

/// Samples y uniformly in dom q until `samples` points fall in the level set
/// {0 < F*(x) - F(x, y) <= gamma dist(0, dPsi(x))^sigma} (or max_draws is
/// reached; 0 means 100 * samples) and checks the KL inequality at each.
/// Can falsify the condition, never certify it.
KLReport kl_verify(const MinimaxProblem& prob, const Vector& x, const KLParams& kl,
                   std::int64_t samples, std::uint64_t seed,
                   const GridParams& grid = {}, std::int64_t max_draws = 0);

struct HolderReport {
  std::int64_t pairs = 0;
  std::int64_t violations = 0;
  double worst_ratio = 0.0;  ///< max lhs / rhs
  double radius = 0.0;
};

/// Samples pairs of points with dist(0, dPsi) > epsilon at distance at most
/// gamma eps^sigma / (2 L_f) and checks
/// ||grad F*(x) - grad F*(x')|| <= L_grad d + M d^{(1-theta)/theta}.
HolderReport holder_verify(const MinimaxProblem& prob, const SmoothnessParams& smooth,
                           const KLParams& kl, double epsilon, std::int64_t pairs,
                           std::uint64_t seed, const GridParams& grid = {});

}  // namespace klminimax
