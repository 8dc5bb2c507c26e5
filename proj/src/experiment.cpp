#include "evstep/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <condition_variable>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>
#include <tuple>

#include "evstep/quasi_likelihood.hpp"
#include "evstep/rng.hpp"

namespace evstep {

namespace {

std::string format_param(double x) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%g", x);
  return buf;
}

bool is_known_method(const std::string& name) {
  if (name == "event") return true;
  try {
    method_from_name(name);
    return true;
  } catch (const std::invalid_argument&) {
    return false;
  }
}

}  // namespace

void ExperimentConfig::validate() const {
  if (variances.empty())
    throw std::invalid_argument("ExperimentConfig: variances is empty");
  if (n_set.empty() || m_set.empty())
    throw std::invalid_argument("ExperimentConfig: n/m sets must be non-empty");
  for (long n : n_set)
    if (n < 2) throw std::invalid_argument("ExperimentConfig: n must be >= 2");
  for (long m : m_set)
    if (m < 1) throw std::invalid_argument("ExperimentConfig: m must be >= 1");
  if (methods.empty())
    throw std::invalid_argument("ExperimentConfig: methods is empty");
  for (const std::string& name : methods)
    if (!is_known_method(name))
      throw std::invalid_argument("ExperimentConfig: unknown method " + name);
  bool needs_steps = false;
  for (const std::string& name : methods)
    if (name != "event") needs_steps = true;
  if (needs_steps && step_grid.empty())
    throw std::invalid_argument("ExperimentConfig: step grid is empty");
  for (double s : step_grid)
    if (!(s > 0.0) || !std::isfinite(s))
      throw std::invalid_argument("ExperimentConfig: steps must be positive");
  if (iteration_cap < 1)
    throw std::invalid_argument("ExperimentConfig: iteration_cap must be >= 1");
  if (!(grad_tol > 0.0))
    throw std::invalid_argument("ExperimentConfig: grad_tol must be positive");
  if (parallelism < 1)
    throw std::invalid_argument("ExperimentConfig: parallelism must be >= 1");
  if (num_starts < 1)
    throw std::invalid_argument("ExperimentConfig: starts must be >= 1");
  SolverParams event_params;
  event_params.armijo = event_armijo;
  event_params.initial_scale = event_initial_scale;
  event_params.scale_cap = event_scale_cap;
  event_params.grad_tol = grad_tol;
  event_params.outer_budget = iteration_cap;
  event_params.step_budget = iteration_cap;
  event_params.validate();
}

namespace {

std::vector<std::string> split_list(const std::string& value) {
  std::vector<std::string> items;
  std::string current;
  for (char c : value) {
    if (c == ',') {
      items.push_back(current);
      current.clear();
    } else {
      current.push_back(c);
    }
  }
  items.push_back(current);
  for (std::string& item : items) {
    const auto begin = item.find_first_not_of(" \t");
    const auto end = item.find_last_not_of(" \t");
    item = begin == std::string::npos ? std::string()
                                      : item.substr(begin, end - begin + 1);
    if (item.empty())
      throw std::invalid_argument("config: empty list element");
  }
  return items;
}

std::string trim(const std::string& text) {
  const auto begin = text.find_first_not_of(" \t\r");
  const auto end = text.find_last_not_of(" \t\r");
  return begin == std::string::npos ? std::string()
                                    : text.substr(begin, end - begin + 1);
}

std::uint64_t parse_seed(const std::string& text) {
  errno = 0;
  char* end = nullptr;
  const unsigned long long value = std::strtoull(text.c_str(), &end, 10);
  if (text.empty() || end != text.c_str() + text.size() || errno == ERANGE)
    throw std::invalid_argument("config: malformed seed: " + text);
  return static_cast<std::uint64_t>(value);
}

}  // namespace

ExperimentConfig parse_config(std::istream& in) {
  ExperimentConfig config;
  std::string line;
  long line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const std::string stripped = trim(line);
    if (stripped.empty()) continue;
    const auto eq = stripped.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("config line " + std::to_string(line_no) +
                                  ": expected key = value");
    const std::string key = trim(stripped.substr(0, eq));
    const std::string value = trim(stripped.substr(eq + 1));
    if (key.empty() || value.empty())
      throw std::invalid_argument("config line " + std::to_string(line_no) +
                                  ": empty key or value");

    if (key == "variances") {
      config.variances.clear();
      for (const std::string& item : split_list(value))
        config.variances.push_back(variance_from_name(item));
    } else if (key == "n") {
      config.n_set.clear();
      for (const std::string& item : split_list(value))
        config.n_set.push_back(parse_long(item));
    } else if (key == "m") {
      config.m_set.clear();
      for (const std::string& item : split_list(value))
        config.m_set.push_back(parse_long(item));
    } else if (key == "methods") {
      config.methods = split_list(value);
    } else if (key == "steps") {
      config.step_grid.clear();
      for (const std::string& item : split_list(value))
        config.step_grid.push_back(parse_double(item));
    } else if (key == "iteration_cap") {
      config.iteration_cap = parse_long(value);
    } else if (key == "grad_tol") {
      config.grad_tol = parse_double(value);
    } else if (key == "master_seed") {
      config.master_seed = parse_seed(value);
    } else if (key == "parallelism") {
      config.parallelism = parse_long(value);
    } else if (key == "starts") {
      config.num_starts = parse_long(value);
    } else {
      throw std::invalid_argument("config line " + std::to_string(line_no) +
                                  ": unknown key " + key);
    }
  }
  config.validate();
  return config;
}

ExperimentConfig parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config: " + path);
  return parse_config(in);
}

const char* const kRunRecordHeader =
    "problem_name,n,m,algorithm,hyperparams,start_idx,start_objective,"
    "end_objective,start_grad_norm,end_grad_norm,iterations,objective_evals,"
    "gradient_evals,wall_time_s";

void write_run_record(std::ostream& out, const RunRecord& r) {
  out << r.problem_name << ',' << r.n << ',' << r.m << ',' << r.algorithm
      << ',' << r.hyperparams << ',' << r.start_idx << ','
      << format_double(r.start_objective) << ','
      << format_double(r.end_objective) << ','
      << format_double(r.start_grad_norm) << ','
      << format_double(r.end_grad_norm) << ',' << r.iterations << ','
      << r.objective_evals << ',' << r.gradient_evals << ','
      << format_double(r.wall_time_s) << '\n';
}

std::vector<RunRecord> read_run_records(std::istream& in) {
  std::string line;
  if (!std::getline(in, line))
    throw SchemaMismatchError("run record CSV: missing header");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kRunRecordHeader)
    throw SchemaMismatchError("run record CSV: unexpected header: " + line);
  std::vector<RunRecord> records;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const std::vector<std::string> f = split_fields(line);
    if (f.size() != 14)
      throw SchemaMismatchError("run record CSV: expected 14 fields, got " +
                                std::to_string(f.size()));
    RunRecord r;
    r.problem_name = f[0];
    r.n = parse_long(f[1]);
    r.m = parse_long(f[2]);
    r.algorithm = f[3];
    r.hyperparams = f[4];
    r.start_idx = parse_long(f[5]);
    r.start_objective = parse_double(f[6]);
    r.end_objective = parse_double(f[7]);
    r.start_grad_norm = parse_double(f[8]);
    r.end_grad_norm = parse_double(f[9]);
    r.iterations = parse_long(f[10]);
    r.objective_evals = parse_long(f[11]);
    r.gradient_evals = parse_long(f[12]);
    r.wall_time_s = parse_double(f[13]);
    records.push_back(std::move(r));
  }
  return records;
}

std::uint64_t cell_seed(std::uint64_t master_seed, VarianceFunction variance,
                        long n, long m) {
  std::uint64_t s = master_seed;
  s = mix64(s ^ mix64(static_cast<std::uint64_t>(variance) + 1));
  s = mix64(s ^ mix64(static_cast<std::uint64_t>(n)));
  s = mix64(s ^ mix64(static_cast<std::uint64_t>(m)));
  return s;
}

std::vector<RunTask> enumerate_runs(const ExperimentConfig& config) {
  config.validate();
  std::vector<RunTask> tasks;
  for (VarianceFunction variance : config.variances) {
    for (long n : config.n_set) {
      for (long m : config.m_set) {
        const std::uint64_t seed = cell_seed(config.master_seed, variance, n, m);
        for (const std::string& method : config.methods) {
          const bool is_event = method == "event";
          const std::vector<double> steps =
              is_event ? std::vector<double>{0.0} : config.step_grid;
          for (double step : steps) {
            for (long start = 1; start <= config.num_starts; ++start) {
              RunTask task;
              task.variance = variance;
              task.n = n;
              task.m = m;
              task.algorithm = method;
              task.step = step;
              task.is_event = is_event;
              task.start_idx = start;
              task.dataset_seed = seed;
              tasks.push_back(std::move(task));
            }
          }
        }
      }
    }
  }
  return tasks;
}

namespace {

std::string event_hyperparams(const ExperimentConfig& config) {
  return "rho=" + format_param(config.event_armijo) +
         ";delta0=" + format_param(config.event_initial_scale) +
         ";deltabar=" + format_param(config.event_scale_cap);
}

RunRecord execute_task(const RunTask& task, const Dataset& dataset,
                       const ExperimentConfig& config, ExperimentStats& stats) {
  RunRecord rec;
  rec.problem_name = variance_name(task.variance);
  rec.n = task.n;
  rec.m = task.m;
  rec.algorithm = task.algorithm;
  rec.hyperparams = task.is_event ? event_hyperparams(config)
                                  : "step=" + format_param(task.step);
  rec.start_idx = task.start_idx;

  const auto t0 = std::chrono::steady_clock::now();
  try {
    QLProblem problem(dataset.X, dataset.y, task.variance);
    const Vector& theta0 = dataset.starts.at(task.start_idx - 1);
    if (task.is_event) {
      SolverParams params;
      params.grad_tol = config.grad_tol;
      params.armijo = config.event_armijo;
      params.initial_scale = config.event_initial_scale;
      params.scale_cap = config.event_scale_cap;
      params.outer_budget = config.iteration_cap;
      params.step_budget = config.iteration_cap;
      const SolveReport report = solve(problem, theta0, params);
      rec.start_objective = report.start_objective();
      rec.end_objective = report.end_objective();
      rec.start_grad_norm = report.start_grad_norm();
      rec.end_grad_norm = report.end_grad_norm();
      rec.iterations = report.iterations;
      rec.objective_evals = report.objective_evals;
      rec.gradient_evals = report.gradient_evals;
      stats.min_step_size = std::min(stats.min_step_size, report.min_step_size);
      stats.max_step_size = std::max(stats.max_step_size, report.max_step_size);
      stats.step_bound_violations += report.step_bound_violations;
    } else {
      BaselineSpec spec;
      spec.method = method_from_name(task.algorithm);
      spec.step_param = task.step;
      spec.budget = config.iteration_cap;
      spec.grad_tol = config.grad_tol;
      rec.start_objective = problem.objective(theta0);
      const SolveReport report = run_baseline(problem, theta0, spec);
      rec.end_objective = problem.objective(report.final_iterate);
      rec.start_grad_norm = report.start_grad_norm();
      rec.end_grad_norm = report.end_grad_norm();
      rec.iterations = report.iterations;
      rec.objective_evals = problem.objective_evals();
      rec.gradient_evals = problem.gradient_evals();
    }
    stats.quadrature_failures += problem.quadrature_failures();
  } catch (const std::exception&) {
    // The record keeps its NaN fields; the grid keeps going.
  }
  rec.wall_time_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();
  return rec;
}

}  // namespace

ExperimentStats run_experiment(const ExperimentConfig& config,
                               std::ostream& out) {
  config.validate();
  const std::vector<RunTask> tasks = enumerate_runs(config);

  using CellKey = std::tuple<int, long, long>;
  std::map<CellKey, Dataset> datasets;
  for (const RunTask& task : tasks) {
    const CellKey key{static_cast<int>(task.variance), task.n, task.m};
    if (datasets.find(key) == datasets.end()) {
      DatasetSpec spec;
      spec.n = task.n;
      spec.m = task.m;
      spec.variance = task.variance;
      spec.seed = task.dataset_seed;
      spec.num_starts = config.num_starts;
      datasets.emplace(key, generate_dataset(spec));
    }
  }

  out << kRunRecordHeader << '\n';

  const long worker_count =
      std::min<long>(config.parallelism, std::max<std::size_t>(tasks.size(), 1));
  std::vector<RunRecord> records(tasks.size());
  std::vector<ExperimentStats> worker_stats(worker_count);
  std::vector<char> ready(tasks.size(), 0);
  std::atomic<std::size_t> next_task{0};
  std::mutex ready_mutex;
  std::condition_variable ready_cv;

  auto worker = [&](long worker_idx) {
    while (true) {
      const std::size_t i = next_task.fetch_add(1);
      if (i >= tasks.size()) break;
      const RunTask& task = tasks[i];
      const CellKey key{static_cast<int>(task.variance), task.n, task.m};
      RunRecord rec = execute_task(task, datasets.at(key), config,
                                   worker_stats[worker_idx]);
      {
        std::lock_guard<std::mutex> lock(ready_mutex);
        records[i] = std::move(rec);
        ready[i] = 1;
      }
      ready_cv.notify_all();
    }
  };

  std::vector<std::thread> threads;
  threads.reserve(worker_count);
  for (long w = 0; w < worker_count; ++w) threads.emplace_back(worker, w);

  for (std::size_t i = 0; i < tasks.size(); ++i) {
    std::unique_lock<std::mutex> lock(ready_mutex);
    ready_cv.wait(lock, [&] { return ready[i] != 0; });
    write_run_record(out, records[i]);
  }
  for (std::thread& t : threads) t.join();
  out.flush();

  ExperimentStats stats;
  stats.records = static_cast<long>(tasks.size());
  for (const ExperimentStats& ws : worker_stats) {
    stats.min_step_size = std::min(stats.min_step_size, ws.min_step_size);
    stats.max_step_size = std::max(stats.max_step_size, ws.max_step_size);
    stats.step_bound_violations += ws.step_bound_violations;
    stats.quadrature_failures += ws.quadrature_failures;
  }
  return stats;
}

}  // namespace evstep
