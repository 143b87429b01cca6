// Copyright 2026 The mcomplete Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "mcomplete/io.h"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <vector>

#include "mcomplete/error.h"

namespace mcomplete {
namespace {

constexpr const char* kMatrixMarketHeader =
    "%%MatrixMarket matrix coordinate real general";

std::string lowercase(std::string s) {
  for (char& c : s) c = static_cast<char>(std::tolower(c));
  return s;
}

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r\n");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r\n");
  return s.substr(begin, end - begin + 1);
}

std::vector<double> parse_row(const std::string& line, int line_no) {
  std::vector<double> row;
  std::istringstream fields(line);
  std::string token;
  while (fields >> token) {
    char* end = nullptr;
    const double value = std::strtod(token.c_str(), &end);
    if (end == token.c_str() || *end != '\0') {
      throw DataError("line " + std::to_string(line_no) + ": bad number '" +
                      token + "'");
    }
    row.push_back(value);
  }
  return row;
}

DenseMatrix rows_to_matrix(const std::vector<std::vector<double>>& rows) {
  if (rows.empty()) return DenseMatrix(0, 0);
  const std::size_t width = rows.front().size();
  DenseMatrix out(rows.size(), width);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != width) {
      throw DataError("dense text: ragged rows (" +
                      std::to_string(rows[i].size()) + " vs " +
                      std::to_string(width) + " values)");
    }
    for (std::size_t j = 0; j < width; ++j) out(i, j) = rows[i][j];
  }
  return out;
}

std::ifstream open_input(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open '" + path + "' for reading");
  return in;
}

std::ofstream open_output(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot open '" + path + "' for writing");
  return out;
}

}  // namespace

std::string format_double(double value) {
  char buf[32];
  for (int precision = 15; precision <= 17; ++precision) {
    std::snprintf(buf, sizeof(buf), "%.*g", precision, value);
    if (std::strtod(buf, nullptr) == value) break;
  }
  return buf;
}

void write_matrix_market(std::ostream& out, const SparseObserved& a) {
  out << kMatrixMarketHeader << '\n';
  out << a.rows() << ' ' << a.cols() << ' ' << a.size() << '\n';
  for (const Entry& e : a.entries()) {
    out << e.row + 1 << ' ' << e.col + 1 << ' ' << format_double(e.value)
        << '\n';
  }
}

SparseObserved read_matrix_market(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw DataError("MatrixMarket: empty input");
  std::istringstream banner(lowercase(line));
  std::string tag, object, format, field, symmetry;
  banner >> tag >> object >> format >> field >> symmetry;
  if (tag != "%%matrixmarket" || object != "matrix" || format != "coordinate") {
    throw DataError("MatrixMarket: expected a coordinate matrix header");
  }
  if ((field != "real" && field != "integer") || symmetry != "general") {
    throw DataError("MatrixMarket: only real/integer general is supported");
  }
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string t = trim(line);
    if (!t.empty() && t[0] != '%') break;
  }
  long long rows = 0, cols = 0, nnz = 0;
  {
    std::istringstream size_line(line);
    if (!(size_line >> rows >> cols >> nnz) || rows <= 0 || cols <= 0 ||
        nnz < 0) {
      throw DataError("MatrixMarket: bad size line " + std::to_string(line_no));
    }
  }
  std::vector<Entry> entries;
  entries.reserve(nnz);
  while (static_cast<long long>(entries.size()) < nnz &&
         std::getline(in, line)) {
    ++line_no;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '%') continue;
    std::istringstream fields(t);
    long long i = 0, j = 0;
    double value = 0.0;
    if (!(fields >> i >> j >> value)) {
      throw DataError("MatrixMarket: bad entry on line " +
                      std::to_string(line_no));
    }
    if (i < 1 || i > rows || j < 1 || j > cols) {
      throw DataError("MatrixMarket: index out of range on line " +
                      std::to_string(line_no));
    }
    entries.push_back(
        {static_cast<int>(i - 1), static_cast<int>(j - 1), value});
  }
  if (static_cast<long long>(entries.size()) != nnz) {
    throw DataError("MatrixMarket: expected " + std::to_string(nnz) +
                    " entries, found " + std::to_string(entries.size()));
  }
  try {
    return SparseObserved(static_cast<int>(rows), static_cast<int>(cols),
                          std::move(entries));
  } catch (const std::invalid_argument& e) {
    throw DataError(std::string("MatrixMarket: ") + e.what());
  }
}

void write_matrix_market_file(const std::string& path,
                              const SparseObserved& a) {
  std::ofstream out = open_output(path);
  write_matrix_market(out, a);
  if (!out) throw DataError("write failed for '" + path + "'");
}

SparseObserved read_matrix_market_file(const std::string& path) {
  std::ifstream in = open_input(path);
  return read_matrix_market(in);
}

void write_dense(std::ostream& out, const DenseMatrix& a) {
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      if (j > 0) out << ' ';
      out << format_double(a(i, j));
    }
    out << '\n';
  }
}

DenseMatrix read_dense(std::istream& in) {
  std::vector<std::vector<double>> rows;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    rows.push_back(parse_row(line, line_no));
  }
  return rows_to_matrix(rows);
}

void write_factors(std::ostream& out, const LowRankFactors& f) {
  out << "U:\n";
  write_dense(out, f.u);
  out << "sigma:\n";
  write_dense(out, f.sigma.transpose());
  out << "V:\n";
  write_dense(out, f.v);
}

LowRankFactors read_factors(std::istream& in) {
  std::vector<std::vector<double>> sections[3];
  int current = -1;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string t = trim(line);
    if (t.empty()) continue;
    if (t == "U:") {
      current = 0;
    } else if (t == "sigma:") {
      current = 1;
    } else if (t == "V:") {
      current = 2;
    } else {
      if (current < 0) {
        throw DataError("factors: data before the first section header");
      }
      sections[current].push_back(parse_row(t, line_no));
    }
  }
  LowRankFactors f;
  f.u = rows_to_matrix(sections[0]);
  const DenseMatrix sigma = rows_to_matrix(sections[1]);
  f.v = rows_to_matrix(sections[2]);
  if (f.u.size() == 0 || sigma.rows() != 1 || f.v.size() == 0) {
    throw DataError("factors: missing or malformed U:, sigma: or V: section");
  }
  f.sigma = sigma.row(0).transpose();
  if (f.u.cols() != f.sigma.size() || f.v.cols() != f.sigma.size()) {
    throw DataError("factors: section widths disagree with sigma");
  }
  return f;
}

void write_factors_file(const std::string& path, const LowRankFactors& f) {
  std::ofstream out = open_output(path);
  write_factors(out, f);
  if (!out) throw DataError("write failed for '" + path + "'");
}

LowRankFactors read_factors_file(const std::string& path) {
  std::ifstream in = open_input(path);
  return read_factors(in);
}

}  // namespace mcomplete
