// klminimax_cli: experiment runner, bound calculator and verification checks.

#include <cmath>
#include <cstdint>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"
#include "klminimax/checks.hpp"
#include "klminimax/errors.hpp"
#include "klminimax/harness.hpp"
#include "klminimax/oracle.hpp"
#include "klminimax/rng.hpp"

using namespace klminimax;

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot read '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct Common {
  std::string config;
  std::string preset = "desk";
  std::string out;
  std::uint64_t seed = 0;
  bool seed_set = false;
  int workers = 1;
};

int cmd_run(const Common& c, const std::string& trace_dir, int instances) {
  ExperimentSpec spec = ExperimentSpec::preset(c.preset);
  if (!c.config.empty()) spec.apply_json(read_file(c.config));
  if (c.seed_set) spec.seed_base = c.seed;
  if (!c.out.empty()) spec.output = c.out;
  if (!trace_dir.empty()) spec.trace_dir = trace_dir;
  if (instances > 0) spec.instances_per_pair = instances;
  spec.workers = c.workers;
  const ExperimentReport report = run_experiment(spec);
  write_report_files(spec, report);
  if (spec.output.empty()) write_rows_csv(std::cout, report.rows);
  print_aggregate_table(spec.output.empty() ? std::cerr : std::cout, report.aggregates);
  int failed = 0;
  for (const auto& r : report.rows) failed += r.ok() ? 0 : 1;
  if (failed) std::cerr << failed << " instance(s) failed; see status column\n";
  return 0;
}

int cmd_bounds(const Common& c, const std::string& problem, Eigen::Index n, Eigen::Index m,
               double psi_gap, const std::string& trace_path, bool run) {
  SolverSettings settings = problem == "toy" ? toy_settings() : ExperimentSpec::preset(c.preset).solver;
  nlohmann::json j = nlohmann::json::object();
  if (!c.config.empty()) {
    const std::string text = read_file(c.config);
    ExperimentSpec tmp;
    tmp.solver = settings;
    tmp.apply_json(text);
    settings = tmp.solver;
    j = nlohmann::json::parse(text);
  }
  MinimaxProblem prob;
  SmoothnessParams smooth{};
  Vector x0, y0;
  if (problem == "toy") {
    prob = toy_problem();
    smooth = toy_smoothness();
    x0 = Vector::Constant(1, 1.5);
    y0 = Vector::Constant(1, std::numbers::pi / 4.0);
  } else {
    const auto inst = HadamardInstance::generate(m, n, c.seed);
    prob = hadamard_problem(inst);
    smooth = hadamard_lipschitz(inst);
    x0 = Vector::Zero(n);
    y0 = Vector::Zero(m);
  }
  smooth.lipschitz_f = j.value("L_f", smooth.lipschitz_f);
  smooth.lipschitz_grad = j.value("L_grad_f", smooth.lipschitz_grad);
  const OuterConfig cfg = settings.outer_config(smooth);
  for (const auto& w : cfg.validate()) std::cerr << "warning: " << w << '\n';

  EmpiricalCounters counters;
  const EmpiricalCounters* shown = nullptr;
  std::optional<OuterTrace> trace;
  if (!trace_path.empty()) {
    std::ifstream in(trace_path);
    if (!in) throw InvalidArgument("cannot read trace '" + trace_path + "'");
    counters = counters_from_trace_csv(in);
    shown = &counters;
  } else if (run) {
    trace = solve(prob, x0, y0, cfg);
    counters = counters_from_trace(*trace);
    shown = &counters;
  }

  if (psi_gap < 0 && j.contains("psi_gap")) psi_gap = j.at("psi_gap").get<double>();
  if (psi_gap < 0) {
    if (problem == "toy") {
      psi_gap = value_function(prob, x0) - (std::sqrt(2.0) - 2.0);
    } else if (trace) {
      // Crude estimate: decrease actually achieved by the run.
      psi_gap = std::max(0.0, prob.objective(x0, y0) - value_function(prob, trace->x_best));
      std::cerr << "psi_gap estimated from the run: " << psi_gap << '\n';
    } else {
      psi_gap = 1.0;
      std::cerr << "psi_gap not given; using 1\n";
    }
  }
  print_bounds(std::cout, cfg, psi_gap, bounds_table(cfg, psi_gap), shown);
  return 0;
}

std::string sci(double v) {
  std::ostringstream os;
  os << std::scientific << std::setprecision(3) << v;
  return os.str();
}

struct Tally {
  int failures = 0;
  void line(bool ok, const std::string& name, const std::string& detail) {
    std::cout << (ok ? "PASS " : "FAIL ") << name << "  " << detail << '\n';
    if (!ok) ++failures;
  }
};

int cmd_verify(const Common& c, bool quick) {
  Tally t;
  const int scale = quick ? 10 : 1;
  Rng rng(c.seed);
  {
    double worst = 0.0;
    const int count = 100 / scale;
    for (int i = 0; i < count; ++i) {
      const auto n = static_cast<Eigen::Index>(1 + rng.uniform() * 10);
      const auto m = static_cast<Eigen::Index>(1 + rng.uniform() * 10);
      const auto prob = hadamard_problem(HadamardInstance::generate(std::min<Eigen::Index>(n, 10),
                                                                    std::min<Eigen::Index>(m, 10),
                                                                    c.seed + i));
      Vector x(prob.n), y(prob.m);
      for (Eigen::Index k = 0; k < prob.n; ++k) x(k) = rng.uniform(-0.5, 0.5) / prob.n;
      for (Eigen::Index k = 0; k < prob.m; ++k) y(k) = rng.uniform(-2.0, 2.0);
      worst = std::max(worst, checks::gradient_rel_error(prob, x, y));
    }
    t.line(worst <= 1e-6, "gradient", "max relative error " + sci(worst));
  }
  {
    std::int64_t violations = 0;
    const int count = 20 / scale;
    for (int i = 0; i < count; ++i) {
      const auto inst = HadamardInstance::generate(1 + (i % 10), 1 + ((3 * i) % 10), c.seed + 1000 + i);
      const auto rep = checks::lipschitz_sampling(hadamard_problem(inst), hadamard_lipschitz(inst),
                                                  10000 / scale, c.seed + i);
      violations += rep.grad_norm_violations + rep.grad_diff_violations;
    }
    t.line(violations == 0, "lipschitz", std::to_string(violations) + " violations");
  }
  const auto toy = toy_problem();
  const SolverSettings ts = toy_settings();
  const OuterConfig toy_cfg = ts.outer_config(toy_smoothness());
  {
    std::int64_t violations = 0, retained = 0;
    for (int i = 0; i < 100; i += quick ? 10 : 1) {
      Vector x(1);
      x << 1.0 + i / 100.0;
      const auto rep = kl_verify(toy, x, toy_cfg.kl, 100000 / (scale * scale), c.seed + i);
      violations += rep.violations;
      retained += rep.samples_in_level_set;
    }
    t.line(violations == 0 && retained > 0, "kl-toy",
           std::to_string(violations) + " violations over " + std::to_string(retained) + " samples");
  }
  {
    const auto rep = holder_verify(toy, toy_smoothness(), toy_cfg.kl, ts.epsilon, 10000 / scale, c.seed);
    t.line(rep.violations == 0 && rep.pairs > 0, "holder-toy",
           std::to_string(rep.violations) + " violations over " + std::to_string(rep.pairs) + " pairs");
  }
  return t.failures == 0 ? 0 : 1;
}

ProxRegularizer random_regularizer(Rng& rng, Eigen::Index d, int kind) {
  Vector lo(d), hi(d), center(d);
  for (Eigen::Index i = 0; i < d; ++i) {
    lo(i) = rng.uniform(-2.0, 0.0);
    hi(i) = rng.uniform(0.0, 2.0);
    center(i) = rng.uniform(-1.0, 1.0);
  }
  const double w = rng.uniform(0.0, 1.0);
  const double radius = rng.uniform(0.2, 2.0);
  switch (kind) {
    case 0: return ProxRegularizer::zero();
    case 1: return ProxRegularizer::l1(w);
    case 2: return ProxRegularizer::ball(center, radius);
    case 3: return ProxRegularizer::box(lo, hi);
    case 4: return ProxRegularizer::l1_ball(w, radius);
    default: return ProxRegularizer::l1_box(w, lo, hi);
  }
}

int cmd_prox_test(const Common& c, int count) {
  Tally t;
  Rng rng(c.seed);
  double worst_prox = 0.0;
  for (int i = 0; i < count; ++i) {
    const auto d = static_cast<Eigen::Index>(1 + i % 3);
    const ProxRegularizer reg = random_regularizer(rng, d, i % 6);
    Vector v(d);
    for (Eigen::Index k = 0; k < d; ++k) v(k) = rng.uniform(-3.0, 3.0);
    const double step = rng.uniform(0.05, 2.0);
    const Vector u = prox(reg, v, step);
    const auto grid = checks::grid_prox(reg, v, step);
    worst_prox = std::max(worst_prox, checks::prox_objective(reg, v, step, u) - grid.value);
  }
  t.line(worst_prox <= 1e-6, "prox", "max objective gap " + sci(worst_prox));

  const ProxRegularizer p = ProxRegularizer::l1_ball(0.01, 1.0);
  double worst_step = 0.0;
  for (int i = 0; i < count; ++i) {
    Vector x(2), g(2);
    for (;;) {
      x << rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0);
      if (x.norm() <= 0.95) break;
    }
    g << rng.normal(), rng.normal();
    const double L = rng.uniform(0.5, 5.0);
    double r = rng.uniform(0.01, 0.5);
    if (i % 3 != 0) {
      const double dist = (prox(p, x - g / L, 1.0 / L) - x).norm();
      if (dist > 0) r = dist / (i % 3 == 1 ? 0.99 : 1.01);
    }
    const Vector u = constrained_prox_step(x, g, L, r, p);
    const auto grid = checks::grid_constrained_step(x, g, L, r, p);
    worst_step = std::max(worst_step, checks::constrained_step_objective(x, g, L, p, u) - grid.value);
  }
  t.line(worst_step <= 1e-6, "constrained-step", "max objective gap " + sci(worst_step));
  return t.failures == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"KL minimax solver: experiments, bounds and checks"};
  app.require_subcommand(1);
  Common c;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", c.config, "JSON configuration file");
    sub->add_option("--seed", c.seed, "seed")->each([&](const std::string&) { c.seed_set = true; });
    sub->add_option("--out", c.out, "output CSV path");
    sub->add_option("--workers", c.workers, "concurrent instances")->check(CLI::PositiveNumber);
    sub->add_option("--preset", c.preset, "parameter preset")->check(CLI::IsMember({"paper", "desk"}));
  };

  auto* run = app.add_subcommand("run", "run a batch of random instances");
  add_common(run);
  std::string trace_dir;
  int instances = 0;
  run->add_option("--trace-dir", trace_dir, "write per-instance outer traces here");
  run->add_option("--instances", instances, "instances per (n, m) pair");

  auto* bounds = app.add_subcommand("bounds", "print complexity bounds");
  add_common(bounds);
  std::string problem = "toy", trace_path;
  Eigen::Index n = 50, m = 50;
  double psi_gap = -1.0;
  bool run_toy = false;
  bounds->add_option("--problem", problem, "toy or hadamard")->check(CLI::IsMember({"toy", "hadamard"}));
  bounds->add_option("--n", n, "x dimension (hadamard)");
  bounds->add_option("--m", m, "y dimension (hadamard)");
  bounds->add_option("--psi-gap", psi_gap, "Psi(x0) - inf Psi");
  bounds->add_option("--trace", trace_path, "outer trace CSV for empirical counters");
  bounds->add_flag("--run", run_toy, "solve the problem from its default start and compare counters");

  auto* verify = app.add_subcommand("verify", "gradient, Lipschitz, KL and Hoelder checks");
  add_common(verify);
  bool quick = false;
  verify->add_flag("--quick", quick, "reduced sample counts");

  auto* prox_test = app.add_subcommand("prox-test", "compare prox operators with grid oracles");
  add_common(prox_test);
  int count = 1000;
  prox_test->add_option("--count", count, "random cases per check");

  CLI11_PARSE(app, argc, argv);
  try {
    if (*run) return cmd_run(c, trace_dir, instances);
    if (*bounds) return cmd_bounds(c, problem, n, m, psi_gap, trace_path, run_toy);
    if (*verify) return cmd_verify(c, quick);
    if (*prox_test) return cmd_prox_test(c, count);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
