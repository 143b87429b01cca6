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

#ifndef MCOMPLETE_IO_H_
#define MCOMPLETE_IO_H_

#include <iosfwd>
#include <string>

#include "mcomplete/low_rank.h"
#include "mcomplete/sparse.h"

namespace mcomplete {

// MatrixMarket "coordinate real general" with 1-based indices. Values are
// written with 17 significant digits so files round-trip exactly.
void write_matrix_market(std::ostream& out, const SparseObserved& a);
SparseObserved read_matrix_market(std::istream& in);
void write_matrix_market_file(const std::string& path, const SparseObserved& a);
SparseObserved read_matrix_market_file(const std::string& path);

// Whitespace-delimited dense text, one matrix row per line.
void write_dense(std::ostream& out, const DenseMatrix& a);
DenseMatrix read_dense(std::istream& in);

// Factors file: sections "U:", "sigma:", "V:", each followed by dense text.
void write_factors(std::ostream& out, const LowRankFactors& f);
LowRankFactors read_factors(std::istream& in);
void write_factors_file(const std::string& path, const LowRankFactors& f);
LowRankFactors read_factors_file(const std::string& path);

// Shortest text for `value` that parses back to the same double.
std::string format_double(double value);

}  // namespace mcomplete

#endif  // MCOMPLETE_IO_H_
