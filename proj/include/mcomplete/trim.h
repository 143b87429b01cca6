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

#ifndef MCOMPLETE_TRIM_H_
#define MCOMPLETE_TRIM_H_

#include <cstdint>
#include <map>
#include <vector>

#include "mcomplete/low_rank.h"
#include "mcomplete/sparse.h"
#include "mcomplete/svd.h"

namespace mcomplete {

struct TrimReport {
  std::vector<int> kept_rows;
  std::vector<int> kept_cols;
  double row_threshold = 0.0;  // 2|E| / m
  double col_threshold = 0.0;  // 2|E| / n
  int zeroed_rows = 0;
  int zeroed_cols = 0;
  std::size_t entries_before = 0;
  std::size_t entries_after = 0;
  // degree -> number of rows (columns) with that degree, on the input.
  std::map<int, int> row_degree_histogram;
  std::map<int, int> col_degree_histogram;

  friend bool operator==(const TrimReport&, const TrimReport&) = default;
};

struct TrimResult {
  SparseObserved trimmed;
  TrimReport report;
};

// Zeroes every row with degree > 2|E|/m and every column with degree
// > 2|E|/n. Degrees are measured once on the input; a degree equal to the
// threshold is kept. Throws std::invalid_argument on an empty input.
TrimResult trim(const SparseObserved& a);

// Single pass with caller-supplied thresholds.
TrimResult trim_with_thresholds(const SparseObserved& a, double row_threshold,
                                double col_threshold);

// Rescaled rank-r projection (mn / |E|) * sum_{i<=r} sigma_i x_i y_i^T of
// the trimmed matrix, with |E| the size of the untrimmed reveal. The result
// is in frame normalization: u = sqrt(m) x, v = sqrt(n) y and
// sigma_i = sqrt(mn) * sigma_i(trimmed) / |E|.
LowRankFactors project_tr(const SparseObserved& trimmed, int r,
                          std::int64_t num_revealed_original,
                          const SvdOptions& options = {});

// Spectrum of the trimmed matrix against the ground truth.
struct SpectralDiagnostics {
  std::vector<double> singular_values;  // sigma_1 .. sigma_{r+1}
  std::vector<double> rescaled;         // sigma_q / eps
  std::vector<double> deviations;       // |sigma_q / eps - Sigma_q|
  double max_deviation = 0.0;
  // || (eps / sqrt(mn)) M - trimmed ||_2
  double operator_norm_deviation = 0.0;
  // operator_norm_deviation / (M_max sqrt(alpha eps))
  double normalized_deviation = 0.0;
  double m_max = 0.0;
  double eps = 0.0;
  double alpha = 0.0;
  bool converged = true;

  friend bool operator==(const SpectralDiagnostics&,
                         const SpectralDiagnostics&) = default;
};

// The operator norm is estimated by subspace iteration on
// v -> (eps / sqrt(mn)) U S V^T v - trimmed v, with M kept in factored form.
SpectralDiagnostics spectral_diagnostics(const LowRankFactors& truth,
                                         const SparseObserved& trimmed, int r,
                                         double eps,
                                         const SvdOptions& options = {});

// Freedman-Diaconis histogram; a single bin when the spread is zero.
struct Histogram {
  std::vector<double> edges;  // counts.size() + 1 edges
  std::vector<int> counts;
};
Histogram freedman_diaconis(std::vector<double> values);

// Linear-interpolation quantile (q in [0, 1]) of unsorted data.
double quantile(std::vector<double> values, double q);

}  // namespace mcomplete

#endif  // MCOMPLETE_TRIM_H_
