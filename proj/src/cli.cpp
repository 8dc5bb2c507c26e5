#include "evstep/cli.hpp"

#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "evstep/dataset.hpp"
#include "evstep/divergence.hpp"
#include "evstep/experiment.hpp"
#include "evstep/quasi_likelihood.hpp"
#include "evstep/rng.hpp"

namespace evstep {

namespace {

constexpr double kGradCheckBudget = 1e-5;
constexpr double kGradCheckStep = 1e-6;
constexpr double kJunctionMargin = 1e-3;

std::uint64_t parse_seed_text(const std::string& text) {
  errno = 0;
  char* end = nullptr;
  const unsigned long long value = std::strtoull(text.c_str(), &end, 10);
  if (text.empty() || end != text.c_str() + text.size() || errno == ERANGE)
    throw std::invalid_argument("malformed seed: " + text);
  return static_cast<std::uint64_t>(value);
}

std::ofstream open_output(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open output file: " + path);
  return out;
}

int run_command(const std::string& config_path, const std::string& out_path,
                bool seed_given, std::uint64_t seed, long parallel) {
  ExperimentConfig config = parse_config_file(config_path);
  if (seed_given) {
    config.master_seed = seed;
  } else if (const char* env = std::getenv("EVSTEP_SEED")) {
    config.master_seed = parse_seed_text(env);
  }
  if (parallel > 0) config.parallelism = parallel;

  std::ofstream out = open_output(out_path);
  const ExperimentStats stats = run_experiment(config, out);

  std::cout << "records written: " << stats.records << '\n';
  if (stats.min_step_size <= stats.max_step_size) {
    std::cout << "event step size range: [" << format_double(stats.min_step_size)
              << ", " << format_double(stats.max_step_size) << "]\n";
  } else {
    std::cout << "event step size range: (no event runs)\n";
  }
  std::cout << "step bound violations: " << stats.step_bound_violations << '\n'
            << "quadrature failures: " << stats.quadrature_failures << '\n';
  return 0;
}

int summarize_command(const std::string& in_path, const std::string& out_path) {
  std::ifstream in(in_path);
  if (!in) throw std::runtime_error("cannot open input file: " + in_path);
  const std::vector<SummaryRow> rows = summarize(read_run_records(in));
  if (out_path.empty()) {
    write_summary_csv(std::cout, rows);
  } else {
    std::ofstream out = open_output(out_path);
    write_summary_csv(out, rows);
  }
  return 0;
}

int anticonv_command(const std::string& method_name, double step, long horizon,
                     const std::string& out_path) {
  const BaselineMethod method = method_from_name(method_name);
  const DivergenceCheck check = verify_anti_convergence(method, step, horizon);

  if (!out_path.empty()) {
    std::ofstream out = open_output(out_path);
    out << "k,theta,objective,grad_abs\n";
    for (std::size_t k = 0; k < check.iterates.size(); ++k) {
      out << k << ',' << format_double(check.iterates[k]) << ','
          << format_double(check.objectives[k]) << ','
          << format_double(check.grad_norms[k]) << '\n';
    }
  }

  std::cout << "method: " << method_name << ", step: " << format_double(step)
            << ", horizon: " << horizon << '\n'
            << "max iterate error vs closed form: "
            << format_double(check.max_iterate_error) << '\n'
            << "min objective growth margin: "
            << format_double(check.min_growth_margin) << '\n'
            << "min gradient magnitude: " << format_double(check.min_grad_norm)
            << '\n';
  if (check.ok) {
    std::cout << "anti-convergence checks passed\n";
    return 0;
  }
  std::cout << "anti-convergence checks FAILED: " << check.failure << '\n';
  return 1;
}

/// Interior sample points for the piecewise problem, kept clear of every
/// piece junction so the finite-difference stencil never straddles one.
std::vector<double> piecewise_sample_points(
    const std::vector<double>& breakpoints, const std::vector<double>& descents,
    long count, std::uint64_t seed) {
  std::vector<double> walls;
  for (std::size_t j = 0; j + 1 < breakpoints.size(); ++j) {
    const double d = descents[j];
    const double delta = descents[j + 1];
    const double a = std::max(std::abs(d), 1.0);
    const double b = std::max(std::abs(delta), 1.0);
    const double width = breakpoints[j + 1] - breakpoints[j];
    const double cuts[] = {0.0,
                           1.0 / (16.0 * a),
                           1.0 / (8.0 * a),
                           1.0 / 8.0,
                           3.0 / 16.0,
                           0.5,
                           13.0 / 16.0,
                           7.0 / 8.0,
                           (16.0 * b - 2.0) / (16.0 * b),
                           (16.0 * b - 1.0) / (16.0 * b),
                           1.0};
    for (double t : cuts) walls.push_back(breakpoints[j] + t * width);
  }

  std::mt19937_64 rng = substream(seed, 977);
  std::vector<double> points;
  points.reserve(count);
  long attempts = 0;
  while (static_cast<long>(points.size()) < count) {
    if (++attempts > 100000)
      throw std::runtime_error("piecewise sampling failed to avoid junctions");
    const double x =
        uniform_range(rng, breakpoints.front(), breakpoints.back());
    bool clear = true;
    for (double w : walls) {
      if (std::abs(x - w) <= kJunctionMargin) {
        clear = false;
        break;
      }
    }
    if (clear) points.push_back(x);
  }
  return points;
}

struct GradCheckOutcome {
  long points = 0;
  double worst = 0.0;
};

GradCheckOutcome gradcheck_points(const Problem& problem,
                                  const std::vector<Vector>& points) {
  GradCheckOutcome outcome;
  for (const Vector& theta : points) {
    const Vector analytic = problem.gradient(theta);
    const Vector numeric =
        finite_difference_gradient(problem, theta, kGradCheckStep);
    const double rel =
        (numeric - analytic).norm() / std::max(1.0, analytic.norm());
    outcome.worst = std::max(outcome.worst, rel);
    ++outcome.points;
  }
  return outcome;
}

int gradcheck_command(const std::string& problem_name, long count,
                      std::uint64_t seed) {
  if (count < 1) throw std::invalid_argument("gradcheck: points must be >= 1");
  GradCheckOutcome outcome;

  if (problem_name.rfind("ql-", 0) == 0) {
    DatasetSpec spec;
    spec.variance = variance_from_name(problem_name.substr(3));
    spec.n = 10;
    spec.m = 100;
    spec.seed = seed;
    spec.num_starts = 0;
    const Dataset dataset = generate_dataset(spec);
    // A quadrature tolerance far below the finite-difference budget keeps
    // integration error out of the comparison: noise of size tol in the
    // objective shows up as tol / (2h) in a central difference.
    QuadratureConfig quadrature;
    quadrature.abs_tol = 1e-14;
    const QLProblem problem(dataset.X, dataset.y, spec.variance, quadrature);

    std::mt19937_64 rng = substream(seed, 977);
    std::vector<Vector> points;
    points.reserve(count);
    for (long i = 0; i < count; ++i) {
      Vector theta(spec.n);
      for (long j = 0; j < spec.n; ++j) theta[j] = standard_normal(rng);
      points.push_back(std::move(theta));
    }
    outcome = gradcheck_points(problem, points);
  } else if (problem_name == "piecewise") {
    const std::vector<double> breakpoints{0.0, 1.0, 2.0, 3.0, 4.0, 5.0,
                                          6.0, 7.0, 8.0, 9.0, 10.0};
    const std::vector<double> descents{2.0,  -1.0, 3.0,  0.5,  -2.0, 1.5,
                                       -0.5, 2.5,  -3.0, 1.0,  -1.5};
    const PiecewiseProblem problem(
        build_divergence_objective(breakpoints, descents));
    std::vector<Vector> points;
    points.reserve(count);
    for (double x : piecewise_sample_points(breakpoints, descents, count, seed)) {
      Vector theta(1);
      theta[0] = x;
      points.push_back(std::move(theta));
    }
    outcome = gradcheck_points(problem, points);
  } else {
    throw std::invalid_argument(
        "gradcheck: unknown problem (expected ql-v1..ql-v4 or piecewise): " +
        problem_name);
  }

  std::cout << "checked " << outcome.points
            << " points, max relative gradient error "
            << format_double(outcome.worst) << " (budget "
            << format_double(kGradCheckBudget) << ")\n";
  return outcome.worst <= kGradCheckBudget ? 0 : 1;
}

int dataset_command(const std::string& variance_id, long n, long m,
                    std::uint64_t seed, long starts,
                    const std::string& prefix) {
  DatasetSpec spec;
  spec.variance = variance_from_name(variance_id);
  spec.n = n;
  spec.m = m;
  spec.seed = seed;
  spec.num_starts = starts;
  const Dataset dataset = generate_dataset(spec);
  write_dataset_csv(dataset, prefix);
  std::cout << "wrote " << prefix << "_{X,y,theta_star,starts}.csv (n=" << n
            << ", m=" << m << ")\n";
  return 0;
}

}  // namespace

int cli_main(int argc, char** argv) {
  CLI::App app{"Event-driven first-order optimization benchmark harness"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_path;
  std::uint64_t seed = 0;
  long parallel = 0;
  CLI::App* run = app.add_subcommand("run", "Run an experiment grid");
  run->add_option("--config", config_path, "Experiment config file")
      ->required();
  run->add_option("--out", out_path, "Output CSV path")->required();
  CLI::Option* seed_opt =
      run->add_option("--seed", seed, "Override the master seed");
  run->add_option("--parallel", parallel, "Override worker count");

  std::string sum_in;
  std::string sum_out;
  CLI::App* sum =
      app.add_subcommand("summarize", "Aggregate a run CSV into group rates");
  sum->add_option("--in", sum_in, "Run record CSV")->required();
  sum->add_option("--out", sum_out, "Summary CSV path (default stdout)");

  std::string ac_method;
  double ac_step = 1.0;
  long ac_horizon = 50;
  std::string ac_out;
  CLI::App* anticonv = app.add_subcommand(
      "anticonv", "Verify a method fails to converge on its engineered objective");
  anticonv->add_option("--method", ac_method, "Baseline method id")->required();
  anticonv->add_option("--step", ac_step, "Step parameter");
  anticonv->add_option("--horizon", ac_horizon, "Number of gradient steps")
      ->check(CLI::NonNegativeNumber);
  anticonv->add_option("--out", ac_out, "Trace CSV path");

  std::string gc_problem;
  long gc_points = 20;
  std::uint64_t gc_seed = 7;
  CLI::App* gradcheck = app.add_subcommand(
      "gradcheck", "Compare analytic gradients against finite differences");
  gradcheck->add_option("--problem", gc_problem,
                        "ql-v1, ql-v2, ql-v3, ql-v4, or piecewise")
      ->required();
  gradcheck->add_option("--points", gc_points, "Number of sample points");
  gradcheck->add_option("--seed", gc_seed, "Sampling seed");

  std::string ds_variance;
  long ds_n = 10;
  long ds_m = 100;
  std::uint64_t ds_seed = 0;
  long ds_starts = 10;
  std::string ds_prefix;
  CLI::App* dataset =
      app.add_subcommand("dataset", "Generate and export a synthetic dataset");
  dataset->add_option("--variance", ds_variance, "v1, v2, v3, or v4")
      ->required();
  dataset->add_option("--n", ds_n, "Parameters per observation");
  dataset->add_option("--m", ds_m, "Observations");
  dataset->add_option("--seed", ds_seed, "Dataset seed");
  dataset->add_option("--starts", ds_starts, "Starting points to draw");
  dataset->add_option("--prefix", ds_prefix, "Output path prefix")->required();

  try {
    app.parse(argc, argv);
    if (run->parsed())
      return run_command(config_path, out_path, seed_opt->count() > 0, seed,
                         parallel);
    if (sum->parsed()) return summarize_command(sum_in, sum_out);
    if (anticonv->parsed())
      return anticonv_command(ac_method, ac_step, ac_horizon, ac_out);
    if (gradcheck->parsed())
      return gradcheck_command(gc_problem, gc_points, gc_seed);
    if (dataset->parsed())
      return dataset_command(ds_variance, ds_n, ds_m, ds_seed, ds_starts,
                             ds_prefix);
    return 2;
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
}

}  // namespace evstep
