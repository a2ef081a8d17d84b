#include "klminimax/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <thread>

#include "json.hpp"
#include "klminimax/errors.hpp"

namespace klminimax {
namespace {

std::string fmt(double v) {
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}

}  // namespace

OuterConfig SolverSettings::outer_config(const SmoothnessParams& smooth) const {
  OuterConfig cfg;
  cfg.kl.C = C;
  cfg.kl.theta = theta;
  cfg.kl.gamma = gamma;
  cfg.kl.sigma = sigma;
  cfg.kl.delta = gamma * std::pow(epsilon, sigma);
  cfg.smooth = smooth;
  cfg.epsilon = epsilon;
  cfg.lambda_bar = lambda_bar;
  cfg.rho = rho;
  cfg.max_iters = max_iters;
  return cfg;
}

SolverSettings toy_settings() {
  SolverSettings s;
  s.C = std::pow(2.0, 0.25);
  s.theta = 0.5;
  s.sigma = 0.1;
  // dist(0, dPsi(x)) = 1 - sqrt(2)/2 on [1, 2).
  s.gamma = (std::sqrt(2.0) / 2.0) / std::pow(1.0 - std::sqrt(2.0) / 2.0, s.sigma);
  s.epsilon = 1e-3;
  s.lambda_bar = 1.0;
  s.rho = 0.95;
  s.max_iters = 500;
  return s;
}

ExperimentSpec ExperimentSpec::preset(std::string_view name) {
  ExperimentSpec spec;
  if (name == "paper") {
    for (Eigen::Index n : {100, 200, 300})
      for (Eigen::Index m : {100, 200, 300}) spec.pairs.emplace_back(n, m);
    spec.solver.max_iters = 10000;
  } else if (name == "desk") {
    spec.pairs = {{50, 50}};
    spec.solver.max_iters = 2000;
  } else {
    throw InvalidArgument("unknown preset '" + std::string(name) + "' (expected paper or desk)");
  }
  return spec;
}

void ExperimentSpec::apply_json(const std::string& text) {
  const auto j = nlohmann::json::parse(text);
  if (j.contains("pairs")) {
    pairs.clear();
    for (const auto& p : j.at("pairs")) {
      pairs.emplace_back(p.at(0).get<Eigen::Index>(), p.at(1).get<Eigen::Index>());
    }
  }
  instances_per_pair = j.value("instances_per_pair", instances_per_pair);
  seed_base = j.value("seed_base", seed_base);
  output = j.value("output", output);
  trace_dir = j.value("trace_dir", trace_dir);
  workers = j.value("workers", workers);
  grid.points = j.value("grid_points", grid.points);
  solver.epsilon = j.value("epsilon", solver.epsilon);
  solver.C = j.value("C", solver.C);
  solver.theta = j.value("theta", solver.theta);
  solver.gamma = j.value("gamma", solver.gamma);
  solver.sigma = j.value("sigma", solver.sigma);
  solver.lambda_bar = j.value("lambda_bar", solver.lambda_bar);
  solver.rho = j.value("rho", solver.rho);
  solver.max_iters = j.value("max_iters", solver.max_iters);
}

void ExperimentSpec::validate() const {
  for (const auto& [n, m] : pairs) {
    if (n <= 0 || m <= 0) throw InvalidArgument("experiment dimensions must be positive");
  }
  if (instances_per_pair <= 0) throw InvalidArgument("instances_per_pair must be positive");
  if (workers <= 0) throw InvalidArgument("workers must be positive");
  if (grid.points < 3) throw InvalidArgument("grid_points must be at least 3");
  solver.outer_config({1.0, 1.0}).validate();
}

ReportRow run_instance(Eigen::Index n, Eigen::Index m, std::uint64_t seed,
                       const SolverSettings& solver, const GridParams& grid,
                       OuterTrace* trace_out) {
  ReportRow row;
  row.n = n;
  row.m = m;
  row.seed = seed;
  const auto start = std::chrono::steady_clock::now();
  try {
    const auto inst = HadamardInstance::generate(m, n, seed);
    const auto prob = hadamard_problem(inst);
    const OuterConfig cfg = solver.outer_config(hadamard_lipschitz(inst));
    const Vector x0 = Vector::Zero(n);
    const Vector y0 = Vector::Zero(m);
    row.initial = prob.objective(x0, y0);
    row.initial_gap = inner_max_separable(prob, x0, grid).F_star - prob.inner_value(x0, y0);

    OuterTrace trace = solve(prob, x0, y0, cfg);
    const OracleResult oracle = inner_max_separable(prob, trace.x_final, grid);
    row.actual = oracle.F_star + prob.p.value(trace.x_final);
    row.oracle_residual = oracle.residual;
    row.approximate = trace.final_approx_objective;
    row.iterations = static_cast<std::int64_t>(trace.iterations.size());
    for (const auto& it : trace.iterations) row.inner_grad_evals += it.inner_iters;
    row.prox_p = trace.counters.prox_p;
    row.prox_q = trace.counters.prox_q;
    row.grad_f = trace.counters.grad_f;
    row.best_index = trace.best_index;
    if (trace_out) *trace_out = std::move(trace);
  } catch (const std::exception& e) {
    row.status = std::string("failed: ") + e.what();
    std::replace(row.status.begin(), row.status.end(), ',', ';');
    std::replace(row.status.begin(), row.status.end(), '\n', ' ');
  }
  row.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return row;
}

ExperimentReport run_experiment(const ExperimentSpec& spec) {
  spec.validate();
  struct Task {
    Eigen::Index n, m;
    std::uint64_t seed;
  };
  std::vector<Task> tasks;
  for (const auto& [n, m] : spec.pairs) {
    for (int i = 0; i < spec.instances_per_pair; ++i) {
      tasks.push_back({n, m, spec.seed_base + static_cast<std::uint64_t>(i)});
    }
  }
  std::sort(tasks.begin(), tasks.end(), [](const Task& a, const Task& b) {
    return std::tie(a.n, a.m, a.seed) < std::tie(b.n, b.m, b.seed);
  });
  tasks.erase(std::unique(tasks.begin(), tasks.end(),
                          [](const Task& a, const Task& b) {
                            return a.n == b.n && a.m == b.m && a.seed == b.seed;
                          }),
              tasks.end());
  if (!spec.trace_dir.empty()) std::filesystem::create_directories(spec.trace_dir);

  ExperimentReport report;
  report.rows.resize(tasks.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    for (std::size_t i = next++; i < tasks.size(); i = next++) {
      const Task& t = tasks[i];
      OuterTrace trace;
      report.rows[i] = run_instance(t.n, t.m, t.seed, spec.solver, spec.grid,
                                    spec.trace_dir.empty() ? nullptr : &trace);
      if (!spec.trace_dir.empty() && report.rows[i].ok()) {
        std::ofstream out(std::filesystem::path(spec.trace_dir) /
                          ("trace_n" + std::to_string(t.n) + "_m" + std::to_string(t.m) +
                           "_s" + std::to_string(t.seed) + ".csv"));
        trace.write_csv(out);
      }
    }
  };
  const int threads = std::min<int>(spec.workers, std::max<std::size_t>(tasks.size(), 1));
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int i = 0; i < threads; ++i) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }

  std::map<std::pair<Eigen::Index, Eigen::Index>, AggregateRow> agg;
  for (const auto& row : report.rows) {
    if (!row.ok()) continue;
    auto& a = agg[{row.n, row.m}];
    a.n = row.n;
    a.m = row.m;
    ++a.count;
    a.initial += row.initial;
    a.actual += row.actual;
    a.approximate += row.approximate;
  }
  for (auto& [key, a] : agg) {
    a.initial /= a.count;
    a.actual /= a.count;
    a.approximate /= a.count;
    report.aggregates.push_back(a);
  }
  return report;
}

void write_rows_csv(std::ostream& out, const std::vector<ReportRow>& rows) {
  out << kReportSchema << '\n';
  out << "n,m,seed,initial,initial_gap,actual,approximate,oracle_residual,iterations,"
         "inner_grad_evals,prox_p,prox_q,grad_f,best_index,status\n";
  for (const auto& r : rows) {
    out << r.n << ',' << r.m << ',' << r.seed << ',' << fmt(r.initial) << ','
        << fmt(r.initial_gap) << ',' << fmt(r.actual) << ',' << fmt(r.approximate) << ','
        << fmt(r.oracle_residual) << ',' << r.iterations << ',' << r.inner_grad_evals << ','
        << r.prox_p << ',' << r.prox_q << ',' << r.grad_f << ',' << r.best_index << ','
        << r.status << '\n';
  }
}

void write_aggregate_csv(std::ostream& out, const std::vector<AggregateRow>& rows) {
  out << kReportSchema << '\n';
  out << "n,m,count,mean_initial,mean_actual,mean_approximate\n";
  for (const auto& a : rows) {
    out << a.n << ',' << a.m << ',' << a.count << ',' << fmt(a.initial) << ','
        << fmt(a.actual) << ',' << fmt(a.approximate) << '\n';
  }
}

void write_timing_csv(std::ostream& out, const std::vector<ReportRow>& rows) {
  out << "n,m,seed,wall_seconds\n";
  for (const auto& r : rows) {
    out << r.n << ',' << r.m << ',' << r.seed << ',' << fmt(r.wall_seconds) << '\n';
  }
}

void print_aggregate_table(std::ostream& out, const std::vector<AggregateRow>& rows) {
  out << std::setw(6) << "n" << std::setw(6) << "m" << std::setw(8) << "count"
      << std::setw(18) << "initial" << std::setw(18) << "actual final" << std::setw(18)
      << "approx final" << '\n';
  out << std::fixed << std::setprecision(4);
  for (const auto& a : rows) {
    out << std::setw(6) << a.n << std::setw(6) << a.m << std::setw(8) << a.count
        << std::setw(18) << a.initial << std::setw(18) << a.actual << std::setw(18)
        << a.approximate << '\n';
  }
  out.unsetf(std::ios::fixed);
}

void write_report_files(const ExperimentSpec& spec, const ExperimentReport& report) {
  if (spec.output.empty()) return;
  const std::filesystem::path out_path(spec.output);
  if (out_path.has_parent_path()) std::filesystem::create_directories(out_path.parent_path());
  {
    std::ofstream out(spec.output);
    if (!out) throw InvalidArgument("cannot open '" + spec.output + "' for writing");
    write_rows_csv(out, report.rows);
  }
  {
    std::ofstream out(spec.output + ".agg.csv");
    write_aggregate_csv(out, report.aggregates);
  }
  {
    std::ofstream out(spec.output + ".timing.csv");
    write_timing_csv(out, report.rows);
  }
}

EmpiricalCounters counters_from_trace(const OuterTrace& trace) {
  EmpiricalCounters c;
  c.iterations = static_cast<std::int64_t>(trace.iterations.size());
  c.prox_p = trace.counters.prox_p;
  c.prox_q = trace.counters.prox_q;
  c.grad_f = trace.counters.grad_f;
  for (const auto& it : trace.iterations) c.max_inner_iters = std::max(c.max_inner_iters, it.inner_iters);
  return c;
}

EmpiricalCounters counters_from_trace_csv(std::istream& in) {
  EmpiricalCounters c;
  std::string line;
  if (!std::getline(in, line)) throw InvalidArgument("empty trace file");
  if (line.rfind("k,step_norm", 0) != 0) throw InvalidArgument("unrecognized trace header: " + line);
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> cols;
    std::stringstream ss(line);
    for (std::string cell; std::getline(ss, cell, ',');) cols.push_back(cell);
    if (cols.size() < 6) throw InvalidArgument("malformed trace row: " + line);
    const std::int64_t inner_iters = std::stoll(cols[4]);
    const std::int64_t inner_trials = std::stoll(cols[5]);
    ++c.iterations;
    ++c.prox_p;
    c.prox_q += inner_trials;
    c.grad_f += 1 + inner_iters;
    c.max_inner_iters = std::max(c.max_inner_iters, inner_iters);
  }
  return c;
}

std::vector<BoundRow> bounds_table(const OuterConfig& cfg, double psi_gap) {
  std::vector<BoundRow> rows;
  const DerivedConstants d = derive_constants(cfg);
  SubsolverConfig sub;
  sub.lambda_bar = cfg.lambda_bar;
  sub.rho = cfg.rho;
  sub.tau = inner_tolerance(0, d, cfg);
  const double lg = cfg.smooth.lipschitz_grad;
  rows.push_back({"i_bar", static_cast<double>(backtrack_bound(lg, sub)), true,
                  "line-search trials per inner iteration <= i_bar + 1"});
  KLParams kl = cfg.kl;
  kl.delta = cfg.kl.gamma * std::pow(cfg.epsilon, cfg.kl.sigma);
  rows.push_back({"K_theta", termination_bound(kl, lg, sub), true,
                  "inner iterations of the first solve (delta = gamma eps^sigma, tau = tau_0)"});
  try {
    const DerivedConstants full = complexity_bounds(cfg, psi_gap);
    rows.push_back({"K_hat", full.K_hat, true, "outer iterations / prox-p evaluations"});
    rows.push_back({"K_bar_f", full.K_bar_f, true, "inner iterations per solve"});
    rows.push_back({"N_hat", full.N_hat, true, "prox-q evaluations"});
  } catch (const OutOfRange& e) {
    for (const char* name : {"K_hat", "K_bar_f", "N_hat"}) {
      rows.push_back({name, 0.0, false, e.what()});
    }
  }
  return rows;
}

void print_bounds(std::ostream& out, const OuterConfig& cfg, double psi_gap,
                  const std::vector<BoundRow>& rows, const EmpiricalCounters* counters) {
  const DerivedConstants d = derive_constants(cfg);
  out << std::setprecision(10);
  out << "inputs: C=" << cfg.kl.C << " theta=" << cfg.kl.theta << " gamma=" << cfg.kl.gamma
      << " sigma=" << cfg.kl.sigma << " L_f=" << cfg.smooth.lipschitz_f
      << " L_grad_f=" << cfg.smooth.lipschitz_grad << " epsilon=" << cfg.epsilon
      << " lambda_bar=" << cfg.lambda_bar << " rho=" << cfg.rho << " psi_gap=" << psi_gap
      << '\n';
  out << "derived: r=" << d.r << " M=" << d.M << " nu=" << d.nu
      << " lambda_lower=" << d.lambda_lower << '\n';
  for (const auto& r : rows) {
    out << std::left << std::setw(10) << r.name << std::right;
    if (r.applicable) {
      out << std::setw(24) << r.value;
    } else {
      out << std::setw(24) << "inapplicable";
    }
    out << "  " << r.note << '\n';
  }
  if (!counters) return;
  auto find = [&](const std::string& name) -> const BoundRow* {
    for (const auto& r : rows)
      if (r.name == name) return &r;
    return nullptr;
  };
  auto compare = [&](const std::string& label, double value, const BoundRow* bound,
                     double extra = 0.0) {
    out << "empirical " << std::left << std::setw(18) << label << std::right << std::setw(14)
        << value;
    if (bound && bound->applicable) {
      const double limit = bound->value + extra;
      out << "  bound " << std::setw(22) << limit << (value <= limit ? "  ok" : "  EXCEEDS");
    } else {
      out << "  bound inapplicable";
    }
    out << '\n';
  };
  compare("iterations", static_cast<double>(counters->iterations), find("K_hat"));
  compare("prox_p", static_cast<double>(counters->prox_p), find("K_hat"));
  compare("max_inner_iters", static_cast<double>(counters->max_inner_iters), find("K_bar_f"));
  compare("prox_q", static_cast<double>(counters->prox_q), find("N_hat"));
  const BoundRow* k_hat = find("K_hat");
  compare("grad_f", static_cast<double>(counters->grad_f), find("N_hat"),
          k_hat && k_hat->applicable ? k_hat->value : 0.0);
  out << "accounting: prox_p " << (counters->prox_p == counters->iterations ? "==" : "!=")
      << " iterations; grad_f " << (counters->grad_f <= counters->prox_p + counters->prox_q ? "<=" : ">")
      << " prox_p + prox_q\n";
}

}  // namespace klminimax
