#pragma once

#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "sbal/errors.hpp"
#include "sbal/spectral.hpp"

namespace sbal {

inline constexpr double kMatrixFileSymmetryTolerance = 1e-9;

namespace detail {

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

inline std::vector<std::string> split_csv_line(std::string_view line) {
  std::vector<std::string> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    const std::string_view field = line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start);
    fields.emplace_back(trim(field));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return fields;
}

inline bool parse_double(const std::string& s, double& out) {
  if (s.empty()) return false;
  std::size_t used = 0;
  try {
    out = std::stod(s, &used);
  } catch (const std::exception&) {
    return false;
  }
  return used == s.size();
}

// Shortest round-trippable representation.
inline std::string format_exact(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

// Twelve significant digits, used by the tabular reports.
inline std::string format12(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

}  // namespace detail

// Matrix CSV: a header row of n agent labels followed by n rows of n numbers.
// Symmetry is checked to kMatrixFileSymmetryTolerance and then enforced by averaging.
inline FriendlinessMatrix read_matrix_csv(std::istream& in) {
  std::string line;
  std::size_t line_no = 0;
  std::vector<std::string> labels;
  while (std::getline(in, line)) {
    ++line_no;
    if (detail::trim(line).empty()) continue;
    labels = detail::split_csv_line(line);
    break;
  }
  if (labels.empty()) throw ParseError("missing header row of agent labels", line_no);
  const std::size_t n = labels.size();
  for (const auto& l : labels)
    if (l.empty()) throw ParseError("empty agent label in header", line_no);

  Matrix m(n, n);
  std::size_t row = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (detail::trim(line).empty()) continue;
    if (row == n) throw ParseError("more than " + std::to_string(n) + " data rows", line_no);
    const auto fields = detail::split_csv_line(line);
    if (fields.size() != n)
      throw ParseError("expected " + std::to_string(n) + " entries, found " + std::to_string(fields.size()), line_no);
    for (std::size_t j = 0; j < n; ++j) {
      double x = 0.0;
      if (!detail::parse_double(fields[j], x)) throw ParseError("non-numeric entry '" + fields[j] + "'", line_no);
      m(row, j) = x;
    }
    ++row;
  }
  if (row != n) throw ParseError("expected " + std::to_string(n) + " data rows, found " + std::to_string(row), line_no);
  return FriendlinessMatrix::symmetrized(std::move(m), std::move(labels), kMatrixFileSymmetryTolerance);
}

inline FriendlinessMatrix read_matrix_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open matrix file '" + path + "'");
  return read_matrix_csv(in);
}

inline void write_matrix_csv(std::ostream& out, const FriendlinessMatrix& x) {
  const auto& labels = x.labels();
  for (std::size_t j = 0; j < labels.size(); ++j) out << (j ? "," : "") << labels[j];
  out << '\n';
  for (std::size_t i = 0; i < x.size(); ++i) {
    for (std::size_t j = 0; j < x.size(); ++j) out << (j ? "," : "") << detail::format_exact(x(i, j));
    out << '\n';
  }
}

}  // namespace sbal
