#include "klminimax/problem.hpp"

#include <cmath>
#include "json.hpp"
#include <numbers>

#include "klminimax/errors.hpp"
#include "klminimax/rng.hpp"

namespace klminimax {

void SmoothnessParams::validate() const {
  if (!(lipschitz_f > 0.0) || !(lipschitz_grad > 0.0)) {
    throw InvalidArgument("Lipschitz constants must be strictly positive");
  }
}

void KLParams::validate() const {
  if (!(C > 0.0)) throw InvalidArgument("KL constant C must be > 0");
  if (!(theta >= 0.5 && theta < 1.0)) throw InvalidArgument("KL exponent theta must lie in [1/2, 1)");
  if (!(gamma > 0.0)) throw InvalidArgument("gamma must be > 0");
  if (!(sigma > 0.0)) throw InvalidArgument("sigma must be > 0");
  if (!(delta > 0.0)) throw InvalidArgument("delta must be > 0");
}

double MinimaxProblem::inner_value(const Vector& x, const Vector& y) const {
  return value(x, y) - q.value(y);
}

double MinimaxProblem::objective(const Vector& x, const Vector& y) const {
  return value(x, y) + p.value(x) - q.value(y);
}

MinimaxProblem toy_problem() {
  using std::numbers::pi;
  MinimaxProblem prob;
  prob.name = "toy";
  prob.n = 1;
  prob.m = 1;
  prob.value = [](const Vector& x, const Vector& y) {
    return x[0] * (std::cos(y[0]) - 1.0);
  };
  prob.grad_x = [](const Vector&, const Vector& y) {
    return Vector::Constant(1, std::cos(y[0]) - 1.0);
  };
  prob.grad_y = [](const Vector& x, const Vector& y) {
    return Vector::Constant(1, -x[0] * std::sin(y[0]));
  };
  prob.p = ProxRegularizer::box(Vector::Constant(1, 1.0), Vector::Constant(1, 2.0));
  prob.q = ProxRegularizer::box(Vector::Constant(1, pi / 4.0), Vector::Constant(1, pi));
  prob.separable_inner = [](const Vector& x) {
    SeparableInner inner;
    const double xv = x[0];
    inner.coordinate = [xv](Eigen::Index, double y) { return xv * (std::cos(y) - 1.0); };
    inner.lo = Vector::Constant(1, pi / 4.0);
    inner.hi = Vector::Constant(1, pi);
    return inner;
  };
  return prob;
}

SmoothnessParams toy_smoothness() {
  // |cos y - 1| <= 2; the Hessian [[0, -sin y], [-sin y, -x cos y]] has
  // spectral norm (x|cos y| + sqrt(x^2 cos^2 y + 4 sin^2 y)) / 2 <= 1 + |cos y|.
  return {2.0, 2.0};
}

HadamardInstance HadamardInstance::generate(Eigen::Index m, Eigen::Index n,
                                            std::uint64_t seed) {
  if (m <= 0 || n <= 0) throw InvalidArgument("instance dimensions must be positive");
  HadamardInstance inst;
  inst.m = m;
  inst.n = n;
  inst.seed = seed;
  inst.rng_name = std::string(Rng::kName);
  Rng rng(seed);
  inst.A.resize(m, n);
  inst.B.resize(m, n);
  inst.c.resize(n);
  for (Eigen::Index i = 0; i < m; ++i)
    for (Eigen::Index j = 0; j < n; ++j) inst.A(i, j) = rng.normal();
  for (Eigen::Index i = 0; i < m; ++i)
    for (Eigen::Index j = 0; j < n; ++j) inst.B(i, j) = rng.normal();
  for (Eigen::Index j = 0; j < n; ++j) inst.c[j] = rng.normal();
  return inst;
}

HadamardInstance HadamardInstance::from_data(Matrix A, Matrix B, Vector c,
                                             std::uint64_t seed) {
  if (A.rows() != B.rows() || A.cols() != B.cols() || A.cols() != c.size()) {
    throw DimensionMismatch("A, B must both be m x n and c must have n entries");
  }
  HadamardInstance inst;
  inst.m = A.rows();
  inst.n = A.cols();
  inst.seed = seed;
  inst.rng_name = "explicit";
  inst.A = std::move(A);
  inst.B = std::move(B);
  inst.c = std::move(c);
  return inst;
}

std::string HadamardInstance::to_json() const {
  nlohmann::json j{{"m", m}, {"n", n}, {"seed", seed}, {"rng_name", rng_name}};
  return j.dump();
}

HadamardInstance HadamardInstance::from_json(const std::string& text) {
  const auto j = nlohmann::json::parse(text);
  const auto name = j.value("rng_name", std::string(Rng::kName));
  if (name != Rng::kName) {
    throw InvalidArgument("unknown rng '" + name + "', expected '" +
                          std::string(Rng::kName) + "'");
  }
  return generate(j.at("m").get<Eigen::Index>(), j.at("n").get<Eigen::Index>(),
                  j.at("seed").get<std::uint64_t>());
}

MinimaxProblem hadamard_problem(const HadamardInstance& inst) {
  if (inst.A.rows() != inst.m || inst.A.cols() != inst.n ||
      inst.B.rows() != inst.m || inst.B.cols() != inst.n ||
      inst.c.size() != inst.n) {
    throw DimensionMismatch("inconsistent Hadamard instance dimensions");
  }
  auto data = std::make_shared<const HadamardInstance>(inst);
  const Eigen::Index n = inst.n;
  const Eigen::Index m = inst.m;
  auto check = [n, m](const Vector& x, const Vector& y) {
    if (x.size() != n || y.size() != m) {
      throw DimensionMismatch("expected x in R^" + std::to_string(n) +
                              " and y in R^" + std::to_string(m));
    }
  };

  MinimaxProblem prob;
  prob.name = "hadamard";
  prob.n = n;
  prob.m = m;
  prob.value = [data, check](const Vector& x, const Vector& y) {
    check(x, y);
    const Vector u = y + data->A * x;
    const Vector v = y + data->B * x;
    const Vector w = u.cwiseProduct(v);
    return -w.squaredNorm() + 0.01 * (x - data->c).squaredNorm();
  };
  prob.grad_x = [data, check](const Vector& x, const Vector& y) {
    check(x, y);
    const Vector u = y + data->A * x;
    const Vector v = y + data->B * x;
    const Vector w = u.cwiseProduct(v);
    // -2 sum_i w_i (v_i a^i + u_i b^i) = -2 (A^T (w o v) + B^T (w o u)).
    Vector g = -2.0 * (data->A.transpose() * w.cwiseProduct(v) +
                       data->B.transpose() * w.cwiseProduct(u));
    g += 0.02 * (x - data->c);
    return g;
  };
  prob.grad_y = [data, check](const Vector& x, const Vector& y) {
    check(x, y);
    const Vector u = y + data->A * x;
    const Vector v = y + data->B * x;
    return Vector(-2.0 * (u + v).cwiseProduct(u.cwiseProduct(v)));
  };
  prob.p = ProxRegularizer::l1_ball(0.01, 1.0);
  prob.q = ProxRegularizer::l1_box(0.1, Vector::Constant(m, -2.0), Vector::Constant(m, 2.0));
  prob.separable_inner = [data](const Vector& x) {
    SeparableInner inner;
    inner.constant = 0.01 * (x - data->c).squaredNorm();
    const Vector u0 = data->A * x;
    const Vector v0 = data->B * x;
    inner.coordinate = [u0, v0](Eigen::Index i, double y) {
      const double w = (y + u0[i]) * (y + v0[i]);
      return -w * w - 0.1 * std::abs(y);
    };
    inner.lo = Vector::Constant(data->m, -2.0);
    inner.hi = Vector::Constant(data->m, 2.0);
    return inner;
  };
  return prob;
}

double spectral_norm(const Matrix& M, int max_iters, double tol) {
  if (M.size() == 0) return 0.0;
  Vector v = Vector::Ones(M.cols()).normalized();
  double sigma = (M * v).norm();
  for (int it = 0; it < max_iters; ++it) {
    Vector next = M.transpose() * (M * v);
    const double norm = next.norm();
    if (norm == 0.0) return 0.0;
    v = next / norm;
    const double updated = (M * v).norm();
    const bool done = std::abs(updated - sigma) <= tol * std::max(updated, 1e-300);
    sigma = updated;
    if (done) break;
  }
  return sigma;
}

SmoothnessParams hadamard_lipschitz(const HadamardInstance& inst) {
  const double ma = inst.m > 0 ? inst.A.rowwise().norm().maxCoeff() : 0.0;
  const double mb = inst.m > 0 ? inst.B.rowwise().norm().maxCoeff() : 0.0;
  const double norm_a = spectral_norm(inst.A);
  const double norm_b = spectral_norm(inst.B);
  const double m = static_cast<double>(inst.m);
  const double ab = ma * mb;

  SmoothnessParams out;
  out.lipschitz_f = 4.0 * m * (ab + 2.0 * ma + 2.0 * mb + 4.0) * (ab + ma + mb) +
                    0.02 * (1.0 + inst.c.norm());
  const double s = ab + ma + mb;
  out.lipschitz_grad =
      4.0 * m * (2.0 * s * s + ab * (ab + 2.0 * ma + 2.0 * mb + 4.0)) +
      2.0 * (norm_a * (mb + 2.0) * (2.0 * ma + mb + 6.0) +
             norm_b * (ma + 2.0) * (ma + 2.0 * mb + 6.0)) +
      2.0 * ((ma + mb + 4.0) * (ma + mb + 4.0) + 2.0 * (ma + 2.0) * (mb + 2.0)) +
      0.02;
  return out;
}

}  // namespace klminimax
