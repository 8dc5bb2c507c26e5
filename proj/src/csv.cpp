#include "evstep/csv.hpp"

#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace evstep {

std::string format_double(double x) {
  if (std::isnan(x)) return "NaN";
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

double parse_double(const std::string& text) {
  if (text.empty()) throw SchemaMismatchError("empty numeric field");
  errno = 0;
  char* end = nullptr;
  const double value = std::strtod(text.c_str(), &end);
  if (end != text.c_str() + text.size())
    throw SchemaMismatchError("malformed numeric field: " + text);
  return value;
}

long parse_long(const std::string& text) {
  if (text.empty()) throw SchemaMismatchError("empty integer field");
  errno = 0;
  char* end = nullptr;
  const long value = std::strtol(text.c_str(), &end, 10);
  if (end != text.c_str() + text.size() || errno == ERANGE)
    throw SchemaMismatchError("malformed integer field: " + text);
  return value;
}

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> fields;
  std::string current;
  for (char c : line) {
    if (c == ',') {
      fields.push_back(std::move(current));
      current.clear();
    } else {
      current.push_back(c);
    }
  }
  fields.push_back(std::move(current));
  return fields;
}

std::string join_fields(const std::vector<std::string>& fields) {
  std::string line;
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i > 0) line.push_back(',');
    line += fields[i];
  }
  return line;
}

void write_matrix_csv(const std::string& path, const Matrix& matrix) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  for (Index i = 0; i < matrix.rows(); ++i) {
    for (Index j = 0; j < matrix.cols(); ++j) {
      if (j > 0) out << ',';
      out << format_double(matrix(i, j));
    }
    out << '\n';
  }
  if (!out) throw std::runtime_error("write failed: " + path);
}

Matrix read_matrix_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open for reading: " + path);
  std::vector<std::vector<double>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const std::vector<std::string> fields = split_fields(line);
    std::vector<double> row;
    row.reserve(fields.size());
    for (const std::string& f : fields) row.push_back(parse_double(f));
    if (!rows.empty() && row.size() != rows.front().size())
      throw SchemaMismatchError("ragged rows in " + path);
    rows.push_back(std::move(row));
  }
  if (rows.empty()) return Matrix(0, 0);
  Matrix matrix(static_cast<Index>(rows.size()),
                static_cast<Index>(rows.front().size()));
  for (Index i = 0; i < matrix.rows(); ++i)
    for (Index j = 0; j < matrix.cols(); ++j)
      matrix(i, j) = rows[i][j];
  return matrix;
}

}  // namespace evstep
