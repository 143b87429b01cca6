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

#include "mcomplete/trim.h"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "mcomplete/sampling.h"

namespace mcomplete {
namespace {

// (scale * U S V^T) - sparse, applied without densifying either term.
class FactoredMinusSparse final : public LinearOperator {
 public:
  FactoredMinusSparse(const LowRankFactors& f, double scale,
                      const SparseObserved& sparse)
      : us_(f.u * f.sigma.asDiagonal() * scale), v_(f.v), sparse_(sparse) {}

  int rows() const override { return static_cast<int>(us_.rows()); }
  int cols() const override { return static_cast<int>(v_.rows()); }

  DenseMatrix apply(const DenseMatrix& x) const override {
    return us_ * (v_.transpose() * x) - sparse_.apply(x);
  }
  DenseMatrix apply_transpose(const DenseMatrix& y) const override {
    return v_ * (us_.transpose() * y) - sparse_.apply_transpose(y);
  }

 private:
  DenseMatrix us_;
  DenseMatrix v_;
  const SparseObserved& sparse_;
};

std::map<int, int> histogram_of(const std::vector<int>& degrees) {
  std::map<int, int> h;
  for (int d : degrees) ++h[d];
  return h;
}

}  // namespace

TrimResult trim_with_thresholds(const SparseObserved& a, double row_threshold,
                                double col_threshold) {
  const std::vector<int> row_deg = a.row_degrees();
  const std::vector<int> col_deg = a.col_degrees();
  TrimReport report;
  report.row_threshold = row_threshold;
  report.col_threshold = col_threshold;
  report.entries_before = a.size();
  std::vector<char> keep_row(a.rows()), keep_col(a.cols());
  for (int i = 0; i < a.rows(); ++i) {
    keep_row[i] = row_deg[i] <= row_threshold;
    if (keep_row[i]) {
      report.kept_rows.push_back(i);
    } else {
      ++report.zeroed_rows;
    }
  }
  for (int j = 0; j < a.cols(); ++j) {
    keep_col[j] = col_deg[j] <= col_threshold;
    if (keep_col[j]) {
      report.kept_cols.push_back(j);
    } else {
      ++report.zeroed_cols;
    }
  }
  report.row_degree_histogram = histogram_of(row_deg);
  report.col_degree_histogram = histogram_of(col_deg);

  std::vector<Entry> kept;
  kept.reserve(a.size());
  for (const Entry& e : a.entries()) {
    if (keep_row[e.row] && keep_col[e.col]) kept.push_back(e);
  }
  report.entries_after = kept.size();
  return {SparseObserved(a.rows(), a.cols(), std::move(kept)),
          std::move(report)};
}

TrimResult trim(const SparseObserved& a) {
  if (a.empty()) throw std::invalid_argument("trim: no revealed entries");
  const double count = static_cast<double>(a.size());
  return trim_with_thresholds(a, 2.0 * count / a.rows(),
                              2.0 * count / a.cols());
}

LowRankFactors project_tr(const SparseObserved& trimmed, int r,
                          std::int64_t num_revealed_original,
                          const SvdOptions& options) {
  if (num_revealed_original < 1) {
    throw std::invalid_argument("project_tr: |E| must be positive");
  }
  const SvdTriplet svd = top_r_svd(trimmed, r, options);
  const double m = trimmed.rows();
  const double n = trimmed.cols();
  LowRankFactors out;
  out.u = svd.left * std::sqrt(m);
  out.v = svd.right * std::sqrt(n);
  out.sigma = svd.values * (std::sqrt(m * n) /
                            static_cast<double>(num_revealed_original));
  return out;
}

SpectralDiagnostics spectral_diagnostics(const LowRankFactors& truth,
                                         const SparseObserved& trimmed, int r,
                                         double eps,
                                         const SvdOptions& options) {
  if (truth.rows() != trimmed.rows() || truth.cols() != trimmed.cols()) {
    throw std::invalid_argument("spectral_diagnostics: dimension mismatch");
  }
  if (!(eps > 0.0)) {
    throw std::invalid_argument("spectral_diagnostics: eps must be positive");
  }
  const int m = trimmed.rows();
  const int n = trimmed.cols();
  const int count = std::min(r + 1, std::min(m, n));

  SpectralDiagnostics d;
  d.eps = eps;
  d.alpha = static_cast<double>(m) / n;
  const SvdTriplet svd = top_r_svd(trimmed, count, options);
  d.converged = svd.converged;
  for (int q = 0; q < count; ++q) {
    const double s = svd.values(q);
    const double truth_q = q < truth.rank() ? truth.sigma(q) : 0.0;
    d.singular_values.push_back(s);
    d.rescaled.push_back(s / eps);
    d.deviations.push_back(std::abs(s / eps - truth_q));
    d.max_deviation = std::max(d.max_deviation, d.deviations.back());
  }

  const double scale = eps / std::sqrt(static_cast<double>(m) * n);
  const FactoredMinusSparse difference(truth, scale, trimmed);
  const SvdTriplet top = top_singular_triplets(difference, 1, options);
  d.converged = d.converged && top.converged;
  d.operator_norm_deviation = top.values(0);
  d.m_max = max_abs_entry(truth);
  const double denom = d.m_max * std::sqrt(d.alpha * eps);
  d.normalized_deviation = denom > 0.0 ? d.operator_norm_deviation / denom : 0.0;
  return d;
}

double quantile(std::vector<double> values, double q) {
  if (values.empty()) throw std::invalid_argument("quantile: empty data");
  std::sort(values.begin(), values.end());
  const double pos = q * (values.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, values.size() - 1);
  return values[lo] + (pos - lo) * (values[hi] - values[lo]);
}

Histogram freedman_diaconis(std::vector<double> values) {
  Histogram h;
  if (values.empty()) return h;
  std::sort(values.begin(), values.end());
  const double lo = values.front();
  const double hi = values.back();
  const double iqr = quantile(values, 0.75) - quantile(values, 0.25);
  const double width =
      2.0 * iqr / std::cbrt(static_cast<double>(values.size()));
  int bins = 1;
  if (width > 0.0 && hi > lo) {
    bins = std::max(1, static_cast<int>(std::ceil((hi - lo) / width)));
  }
  const double step = bins > 1 ? (hi - lo) / bins : std::max(hi - lo, 0.0);
  for (int b = 0; b <= bins; ++b) {
    h.edges.push_back(b == bins ? hi : lo + b * step);
  }
  h.counts.assign(bins, 0);
  for (double v : values) {
    int b = step > 0.0 ? static_cast<int>((v - lo) / step) : 0;
    h.counts[std::clamp(b, 0, bins - 1)]++;
  }
  return h;
}

}  // namespace mcomplete
