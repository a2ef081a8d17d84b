#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "klminimax/oracle.hpp"
#include "klminimax/outer_solver.hpp"

namespace klminimax {

/// Tunable inputs of the outer method; Lipschitz constants come from the
/// instance.
struct SolverSettings {
  double epsilon = 1e-2;
  double C = 0.2;
  double theta = 0.5;
  double gamma = 0.01;
  double sigma = 0.1;
  double lambda_bar = 1.0;
  double rho = 0.95;
  std::int64_t max_iters = 10000;

  OuterConfig outer_config(const SmoothnessParams& smooth) const;
};

struct ExperimentSpec {
  std::vector<std::pair<Eigen::Index, Eigen::Index>> pairs;  ///< (n, m)
  int instances_per_pair = 10;
  std::uint64_t seed_base = 0;
  SolverSettings solver;
  std::string output;
  std::string trace_dir;
  int workers = 1;
  GridParams grid;

  /// "paper": the nine (n, m) pairs of the benchmark table, 10000 iterations.
  /// "desk": (50, 50) with 2000 iterations.
  static ExperimentSpec preset(std::string_view name);
  /// Overrides fields present in a JSON object (see README for keys).
  void apply_json(const std::string& text);
  void validate() const;
};

/// Solver settings for the toy problem: C = 2^{1/4}, theta = 1/2, sigma =
/// 0.1, and gamma chosen so the level-set bound equals sqrt(2)/2 on [1, 2).
SolverSettings toy_settings();

struct ReportRow {
  Eigen::Index n = 0;
  Eigen::Index m = 0;
  std::uint64_t seed = 0;
  double initial = 0.0;      ///< f + p - q at (x0, y0)
  double initial_gap = 0.0;  ///< F*(x0) - F(x0, y0)
  double actual = 0.0;       ///< Psi(x_eps) from the oracle
  double approximate = 0.0;  ///< F(x_eps, y_eps) + p(x_eps)
  double oracle_residual = 0.0;
  std::int64_t iterations = 0;
  std::int64_t inner_grad_evals = 0;
  std::int64_t prox_p = 0;
  std::int64_t prox_q = 0;
  std::int64_t grad_f = 0;
  std::size_t best_index = 0;
  double wall_seconds = 0.0;
  std::string status = "ok";

  bool ok() const { return status == "ok"; }
};

struct AggregateRow {
  Eigen::Index n = 0;
  Eigen::Index m = 0;
  int count = 0;
  double initial = 0.0;
  double actual = 0.0;
  double approximate = 0.0;
};

struct ExperimentReport {
  std::vector<ReportRow> rows;  ///< ordered by (n, m, seed)
  std::vector<AggregateRow> aggregates;
};

ReportRow run_instance(Eigen::Index n, Eigen::Index m, std::uint64_t seed,
                       const SolverSettings& solver, const GridParams& grid,
                       OuterTrace* trace_out = nullptr);

ExperimentReport run_experiment(const ExperimentSpec& spec);

/// Writes `output` (rows), `<output>.agg.csv` (means) and
/// `<output>.timing.csv` (wall times) when spec.output is set.
void write_report_files(const ExperimentSpec& spec, const ExperimentReport& report);

inline constexpr std::string_view kReportSchema = "# klminimax-report v1";
void write_rows_csv(std::ostream& out, const std::vector<ReportRow>& rows);
void write_aggregate_csv(std::ostream& out, const std::vector<AggregateRow>& rows);
void write_timing_csv(std::ostream& out, const std::vector<ReportRow>& rows);
void print_aggregate_table(std::ostream& out, const std::vector<AggregateRow>& rows);

/// Counters recoverable from an outer trace.
struct EmpiricalCounters {
  std::int64_t iterations = 0;
  std::int64_t prox_p = 0;
  std::int64_t prox_q = 0;
  std::int64_t grad_f = 0;
  std::int64_t max_inner_iters = 0;
};

EmpiricalCounters counters_from_trace(const OuterTrace& trace);
/// Parses the CSV written by OuterTrace::write_csv.
EmpiricalCounters counters_from_trace_csv(std::istream& in);

struct BoundRow {
  std::string name;
  double value = 0.0;
  bool applicable = true;
  std::string note;
};

/// i_bar and K_theta of the inner solver (delta = gamma eps^sigma, tau =
/// tau_0), then K_hat, K_bar_f and N_hat, each marked inapplicable when
/// epsilon > 1/e.
std::vector<BoundRow> bounds_table(const OuterConfig& cfg, double psi_gap);

void print_bounds(std::ostream& out, const OuterConfig& cfg, double psi_gap,
                  const std::vector<BoundRow>& rows, const EmpiricalCounters* counters);

}  // namespace klminimax
