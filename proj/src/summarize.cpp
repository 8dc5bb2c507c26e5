#include "evstep/experiment.hpp"

#include <cmath>
#include <limits>
#include <map>
#include <ostream>
#include <tuple>

namespace evstep {

namespace {

constexpr double kStationaryThreshold = 1e-3;

struct GroupCounts {
  long total = 0;
  long stationary = 0;
  long descent = 0;
  long with_objectives = 0;
};

}  // namespace

std::vector<SummaryRow> summarize(const std::vector<RunRecord>& records) {
  using Key = std::tuple<std::string, std::string, std::string>;
  std::map<Key, GroupCounts> groups;
  for (const RunRecord& rec : records) {
    GroupCounts& g =
        groups[Key{rec.algorithm, rec.hyperparams, rec.problem_name}];
    ++g.total;
    if (std::isfinite(rec.end_grad_norm) &&
        rec.end_grad_norm <= kStationaryThreshold)
      ++g.stationary;
    if (!std::isnan(rec.start_objective) && !std::isnan(rec.end_objective)) {
      ++g.with_objectives;
      if (rec.end_objective < rec.start_objective) ++g.descent;
    }
  }

  std::vector<SummaryRow> rows;
  rows.reserve(groups.size());
  for (const auto& [key, g] : groups) {
    SummaryRow row;
    row.algorithm = std::get<0>(key);
    row.hyperparams = std::get<1>(key);
    row.problem_name = std::get<2>(key);
    row.n_records = g.total;
    row.n_nan_filtered = g.total - g.with_objectives;
    row.pct_approx_stationary =
        static_cast<double>(g.stationary) / static_cast<double>(g.total);
    row.pct_achieved_descent =
        g.with_objectives > 0
            ? static_cast<double>(g.descent) /
                  static_cast<double>(g.with_objectives)
            : std::numeric_limits<double>::quiet_NaN();
    rows.push_back(std::move(row));
  }
  return rows;
}

const char* const kSummaryRowHeader =
    "algorithm,hyperparams,problem_name,pct_approx_stationary,"
    "pct_achieved_descent,n_records,n_nan_filtered";

void write_summary_csv(std::ostream& out, const std::vector<SummaryRow>& rows) {
  out << kSummaryRowHeader << '\n';
  for (const SummaryRow& row : rows) {
    out << row.algorithm << ',' << row.hyperparams << ',' << row.problem_name
        << ',' << format_double(row.pct_approx_stationary) << ','
        << format_double(row.pct_achieved_descent) << ',' << row.n_records
        << ',' << row.n_nan_filtered << '\n';
  }
}

}  // namespace evstep
