#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "evstep/quasi_likelihood.hpp"

// Synthetic regression data for the quasi-likelihood experiments, generated
// from named substreams of a master seed so each ingredient (coefficients,
// design, noise, starting points) is reproducible independently of the
// others.

namespace evstep {

struct DatasetSpec {
  long n = 10;   ///< parameters per observation, including the intercept
  long m = 100;  ///< observations
  VarianceFunction variance = VarianceFunction::V1;
  std::uint64_t seed = 0;
  long num_starts = 10;

  void validate() const;  // throws std::invalid_argument
};

struct Dataset {
  Matrix X;  ///< m x n, first column identically 1
  Vector y;
  Vector true_coefficients;
  std::vector<Vector> starts;  ///< entries uniform on [-10, 10]
};

/// Draw a dataset: coefficients theta* ~ N(mu, I) with mu ~ N(0, I); design
/// rows ~ N(0, I) scaled by 1/sqrt(n-1) before the intercept overwrite;
/// responses y = g(x . theta*) + sqrt(V(g)) * eps with eps a centered, unit
/// variance arcsine draw; starting points uniform. Same spec, same bits.
Dataset generate_dataset(const DatasetSpec& spec);

/// Write X, y, theta_star, starts as `<prefix>_X.csv` etc.
void write_dataset_csv(const Dataset& dataset, const std::string& prefix);

/// Read back what write_dataset_csv wrote.
Dataset read_dataset_csv(const std::string& prefix);

}  // namespace evstep
