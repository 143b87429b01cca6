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

#ifndef MCOMPLETE_METRICS_H_
#define MCOMPLETE_METRICS_H_

#include <cstdint>
#include <vector>

#include "mcomplete/low_rank.h"

namespace mcomplete {

struct ErrorReport {
  // sqrt(||M - M_hat||_F^2 / (mn M_max^2))
  double rmse = 0.0;
  // ||M - M_hat||_F / ||M||_F
  double rel_frobenius = 0.0;
  double max_abs_error = 0.0;
  double m_max = 0.0;
  // C alpha^{3/2} r n / |E|, the bound on rmse^2; 0 when |E| is not given.
  double rmse_sq_bound = 0.0;
  // False when the max entries come from sampled positions.
  bool exact = true;
  bool factored = false;

  friend bool operator==(const ErrorReport&, const ErrorReport&) = default;
};

struct MetricsOptions {
  // Constant C and reveal size |E| of the bound; num_revealed <= 0 skips it.
  double bound_constant = 1.0;
  std::int64_t num_revealed = 0;
  // Use the factored path even below the dense limit.
  bool force_factored = false;
  std::uint64_t sample_seed = 1;
};

// Below this many entries the error is computed on dense copies.
inline constexpr double kDenseMetricLimit = 1e7;

// Throws std::invalid_argument on a shape mismatch or when M_max = 0.
ErrorReport rmse(const LowRankFactors& truth, const LowRankFactors& approx,
                 const MetricsOptions& options = {});

// Least-squares slope of log(y) against log(x).
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

double median(std::vector<double> values);

}  // namespace mcomplete

#endif  // MCOMPLETE_METRICS_H_
