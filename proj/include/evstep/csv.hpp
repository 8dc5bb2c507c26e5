#pragma once

#include <string>
#include <vector>

#include "evstep/problem.hpp"

// Minimal numeric CSV plumbing shared by the dataset exporter and the
// experiment harness. All values are plain numbers or bare strings without
// quoting; doubles round-trip exactly through 17 significant digits and NaN
// is spelled "NaN".

namespace evstep {

struct SchemaMismatchError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string format_double(double x);
double parse_double(const std::string& text);  // throws SchemaMismatchError
long parse_long(const std::string& text);      // throws SchemaMismatchError

std::vector<std::string> split_fields(const std::string& line);
std::string join_fields(const std::vector<std::string>& fields);

void write_matrix_csv(const std::string& path, const Matrix& matrix);
Matrix read_matrix_csv(const std::string& path);  // throws on ragged rows

}  // namespace evstep
