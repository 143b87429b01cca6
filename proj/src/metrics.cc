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

#include "mcomplete/metrics.h"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "mcomplete/rng.h"
#include "mcomplete/sampling.h"

namespace mcomplete {

ErrorReport rmse(const LowRankFactors& truth, const LowRankFactors& approx,
                 const MetricsOptions& options) {
  if (truth.rows() != approx.rows() || truth.cols() != approx.cols()) {
    throw std::invalid_argument("rmse: shape mismatch");
  }
  const double m = truth.rows();
  const double n = truth.cols();
  ErrorReport report;
  double norm_truth = 0.0;
  double diff = 0.0;
  if (m * n <= kDenseMetricLimit && !options.force_factored) {
    const DenseMatrix a = truth.dense();
    const DenseMatrix b = approx.dense();
    report.m_max = a.cwiseAbs().maxCoeff();
    report.max_abs_error = (a - b).cwiseAbs().maxCoeff();
    norm_truth = a.norm();
    diff = (a - b).norm();
  } else {
    report.factored = true;
    norm_truth = factored_frobenius_norm(truth);
    diff = factored_frobenius_distance(truth, approx);
    if (m * n <= kDenseMetricLimit) {
      for (int j = 0; j < truth.cols(); ++j) {
        for (int i = 0; i < truth.rows(); ++i) {
          const double t = truth.entry(i, j);
          report.m_max = std::max(report.m_max, std::abs(t));
          report.max_abs_error =
              std::max(report.max_abs_error, std::abs(t - approx.entry(i, j)));
        }
      }
    } else {
      report.exact = false;
      Philox4x32 rng(options.sample_seed, 0x3e);
      for (std::int64_t s = 0; s < kIncoherenceSamples; ++s) {
        const int i = static_cast<int>(rng.uniform_index(truth.rows()));
        const int j = static_cast<int>(rng.uniform_index(truth.cols()));
        const double t = truth.entry(i, j);
        report.m_max = std::max(report.m_max, std::abs(t));
        report.max_abs_error =
            std::max(report.max_abs_error, std::abs(t - approx.entry(i, j)));
      }
    }
  }
  if (!(report.m_max > 0.0)) {
    throw std::invalid_argument("rmse: ground truth has M_max = 0");
  }
  report.rmse = diff / (std::sqrt(m * n) * report.m_max);
  report.rel_frobenius = diff / norm_truth;
  if (options.num_revealed > 0) {
    const double alpha = m / n;
    report.rmse_sq_bound = options.bound_constant * std::pow(alpha, 1.5) *
                           truth.rank() * n /
                           static_cast<double>(options.num_revealed);
  }
  return report;
}

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) {
    throw std::invalid_argument("loglog_slope: need two or more paired points");
  }
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0.0) || !(y[i] > 0.0)) {
      throw std::invalid_argument("loglog_slope: values must be positive");
    }
    mx += std::log(x[i]);
    my += std::log(y[i]);
  }
  mx /= x.size();
  my /= y.size();
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = std::log(x[i]) - mx;
    sxy += dx * (std::log(y[i]) - my);
    sxx += dx * dx;
  }
  if (sxx == 0.0) throw std::invalid_argument("loglog_slope: x is constant");
  return sxy / sxx;
}

double median(std::vector<double> values) {
  if (values.empty()) throw std::invalid_argument("median: empty input");
  std::sort(values.begin(), values.end());
  const std::size_t h = values.size() / 2;
  return values.size() % 2 ? values[h] : 0.5 * (values[h - 1] + values[h]);
}

}  // namespace mcomplete
