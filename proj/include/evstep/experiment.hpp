#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "evstep/baselines.hpp"
#include "evstep/csv.hpp"
#include "evstep/dataset.hpp"
#include "evstep/event_driven.hpp"

// Benchmark harness: expand a config into a deterministic grid of runs over
// problems x methods x step sizes x starting points, execute them (optionally
// in parallel), and emit one CSV record per run plus aggregate summaries.

namespace evstep {

struct ExperimentConfig {
  std::vector<VarianceFunction> variances{
      VarianceFunction::V1, VarianceFunction::V2, VarianceFunction::V3,
      VarianceFunction::V4};
  std::vector<long> n_set{10};
  std::vector<long> m_set{100};
  std::vector<std::string> methods{"fixed",     "diminishing", "bb-long",
                                   "bb-short",  "lipschitz",   "nesterov",
                                   "wngrad",    "event"};
  std::vector<double> step_grid{1e-4, 1.0, 2.0, 4.0, 6.0, 8.0, 10.0};
  long iteration_cap = 5000;  ///< gradient-step budget for every method
  double grad_tol = 1e-3;
  std::uint64_t master_seed = 0;
  long parallelism = 1;
  long num_starts = 10;

  // The event-driven method runs with these fixed parameters; it takes no
  // entry from step_grid.
  double event_armijo = 1e-4;
  double event_initial_scale = 1.0;
  double event_scale_cap = 1.0;

  void validate() const;  // throws std::invalid_argument
};

/// Parse the flat `key = value` config format ('#' starts a comment, lists
/// are comma-separated). Unknown keys are errors; missing keys keep their
/// defaults. Keys: variances, n, m, methods, steps, iteration_cap, grad_tol,
/// master_seed, parallelism, starts.
ExperimentConfig parse_config(std::istream& in);
ExperimentConfig parse_config_file(const std::string& path);

struct RunRecord {
  std::string problem_name;  ///< variance id, "v1".."v4"
  long n = 0;
  long m = 0;
  std::string algorithm;
  std::string hyperparams;
  long start_idx = 0;  ///< 1-based
  double start_objective = std::numeric_limits<double>::quiet_NaN();
  double end_objective = std::numeric_limits<double>::quiet_NaN();
  double start_grad_norm = std::numeric_limits<double>::quiet_NaN();
  double end_grad_norm = std::numeric_limits<double>::quiet_NaN();
  long iterations = 0;
  long objective_evals = 0;
  long gradient_evals = 0;
  double wall_time_s = 0.0;
};

extern const char* const kRunRecordHeader;

void write_run_record(std::ostream& out, const RunRecord& record);
std::vector<RunRecord> read_run_records(std::istream& in);  // SchemaMismatchError

/// One grid point of the experiment.
struct RunTask {
  VarianceFunction variance = VarianceFunction::V1;
  long n = 0;
  long m = 0;
  std::string algorithm;
  double step = 0.0;      ///< unused for the event-driven method
  bool is_event = false;
  long start_idx = 0;     ///< 1-based
  std::uint64_t dataset_seed = 0;
};

/// Deterministic dataset seed for one (variance, n, m) cell; independent of
/// the method list by construction.
std::uint64_t cell_seed(std::uint64_t master_seed, VarianceFunction variance,
                        long n, long m);

/// Expand the config into its full task list in emission order.
std::vector<RunTask> enumerate_runs(const ExperimentConfig& config);

/// Aggregate diagnostics from one experiment invocation.
struct ExperimentStats {
  long records = 0;
  double min_step_size = std::numeric_limits<double>::infinity();
  double max_step_size = 0.0;
  long step_bound_violations = 0;  ///< event-driven step sizes outside bounds
  long quadrature_failures = 0;
};

/// Run the whole grid, writing records (with header) to `out` in enumeration
/// order regardless of parallelism. Individual run failures produce records
/// with NaN fields; they never abort the grid.
ExperimentStats run_experiment(const ExperimentConfig& config,
                               std::ostream& out);

struct SummaryRow {
  std::string algorithm;
  std::string hyperparams;
  std::string problem_name;
  double pct_approx_stationary = 0.0;  ///< end grad norm finite and <= 1e-3
  double pct_achieved_descent = 0.0;   ///< among runs with finite objectives
  long n_records = 0;
  long n_nan_filtered = 0;  ///< runs dropped from the descent rate
};

/// Group records by (algorithm, hyperparams, problem_name) and compute both
/// rates. The stationarity rate uses the fixed 1e-3 threshold over all
/// records in the group; the descent rate first drops records whose start or
/// end objective is NaN and is NaN itself if nothing survives.
std::vector<SummaryRow> summarize(const std::vector<RunRecord>& records);

extern const char* const kSummaryRowHeader;

void write_summary_csv(std::ostream& out, const std::vector<SummaryRow>& rows);

}  // namespace evstep
