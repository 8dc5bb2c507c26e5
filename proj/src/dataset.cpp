#include "evstep/dataset.hpp"

#include <cmath>

#include "evstep/csv.hpp"
#include "evstep/rng.hpp"

namespace evstep {

namespace {

// Purpose tags for the per-ingredient substreams.
constexpr std::uint64_t kCoefficientsTag = 1;
constexpr std::uint64_t kDesignTag = 2;
constexpr std::uint64_t kNoiseTag = 3;
constexpr std::uint64_t kStartsTag = 4;

}  // namespace

void DatasetSpec::validate() const {
  if (n < 2)
    throw std::invalid_argument(
        "DatasetSpec: n must be >= 2 (row normalization uses n - 1)");
  if (m < 1) throw std::invalid_argument("DatasetSpec: m must be >= 1");
  if (num_starts < 0)
    throw std::invalid_argument("DatasetSpec: num_starts must be >= 0");
}

Dataset generate_dataset(const DatasetSpec& spec) {
  spec.validate();
  Dataset ds;

  auto coeff_rng = substream(spec.seed, kCoefficientsTag);
  Vector mean(spec.n);
  for (long i = 0; i < spec.n; ++i) mean[i] = standard_normal(coeff_rng);
  ds.true_coefficients.resize(spec.n);
  for (long i = 0; i < spec.n; ++i)
    ds.true_coefficients[i] = mean[i] + standard_normal(coeff_rng);

  auto design_rng = substream(spec.seed, kDesignTag);
  ds.X.resize(spec.m, spec.n);
  const double row_norm = std::sqrt(static_cast<double>(spec.n - 1));
  for (long i = 0; i < spec.m; ++i) {
    for (long j = 0; j < spec.n; ++j)
      ds.X(i, j) = standard_normal(design_rng) / row_norm;
    ds.X(i, 0) = 1.0;
  }

  auto noise_rng = substream(spec.seed, kNoiseTag);
  const double noise_scale = std::sqrt(1.0 / 8.0);
  ds.y.resize(spec.m);
  for (long i = 0; i < spec.m; ++i) {
    const double eps = (arcsine_unit(noise_rng) - 0.5) / noise_scale;
    const double mu = logistic_link(ds.X.row(i).dot(ds.true_coefficients));
    ds.y[i] = mu + std::sqrt(variance_value(spec.variance, mu)) * eps;
  }

  auto starts_rng = substream(spec.seed, kStartsTag);
  ds.starts.resize(spec.num_starts);
  for (long s = 0; s < spec.num_starts; ++s) {
    ds.starts[s].resize(spec.n);
    for (long j = 0; j < spec.n; ++j)
      ds.starts[s][j] = uniform_range(starts_rng, -10.0, 10.0);
  }
  return ds;
}

void write_dataset_csv(const Dataset& dataset, const std::string& prefix) {
  write_matrix_csv(prefix + "_X.csv", dataset.X);
  write_matrix_csv(prefix + "_y.csv", dataset.y);
  write_matrix_csv(prefix + "_theta_star.csv", dataset.true_coefficients);
  Matrix starts(static_cast<Index>(dataset.starts.size()),
                dataset.X.cols());
  for (Index s = 0; s < starts.rows(); ++s)
    starts.row(s) = dataset.starts[s].transpose();
  write_matrix_csv(prefix + "_starts.csv", starts);
}

Dataset read_dataset_csv(const std::string& prefix) {
  Dataset ds;
  ds.X = read_matrix_csv(prefix + "_X.csv");
  ds.y = read_matrix_csv(prefix + "_y.csv");
  ds.true_coefficients = read_matrix_csv(prefix + "_theta_star.csv");
  const Matrix starts = read_matrix_csv(prefix + "_starts.csv");
  ds.starts.resize(starts.rows());
  for (Index s = 0; s < starts.rows(); ++s)
    ds.starts[s] = starts.row(s).transpose();
  return ds;
}

}  // namespace evstep
