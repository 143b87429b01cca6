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

#ifndef MCOMPLETE_PIPELINE_H_
#define MCOMPLETE_PIPELINE_H_

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "mcomplete/cleaning.h"
#include "mcomplete/low_rank.h"
#include "mcomplete/sparse.h"
#include "mcomplete/svd.h"
#include "mcomplete/trim.h"

namespace mcomplete {

enum class RhoRule {
  kSampleSize,     // rho = n eps
  kSpectralScale,  // rho = n eps sqrt(alpha) Sigma_max^2, Sigma_max = sigma_1 / eps
};
std::string to_string(RhoRule rule);
RhoRule parse_rho_rule(const std::string& name);

struct PipelineConfig {
  int rank = 0;
  // Stop after the spectral projection.
  bool skip_clean = false;
  // Double mu0 and restart while G(x_final) > 0, up to kMaxMu0.
  bool adapt_mu0 = true;
  RhoRule rho_rule = RhoRule::kSampleSize;
  CleaningConfig cleaning;
  SvdOptions svd;
  // Rank sweep over [rank_min, rank_max] when rank_max > 0.
  int rank_min = 0;
  int rank_max = 0;
  double holdout_fraction = 0.1;
  std::uint64_t holdout_seed = 0;
};

inline constexpr double kMaxMu0 = 1024.0;
// The sweep keeps the smallest rank whose holdout RMSE is within this
// fraction of the best one.
inline constexpr double kRankSweepSlack = 0.1;

struct RankSweepRow {
  int rank = 0;
  double holdout_rmse = 0.0;
  bool ok = true;

  friend bool operator==(const RankSweepRow&, const RankSweepRow&) = default;
};

struct CompletionResult {
  int rank = 0;
  LowRankFactors projection;
  LowRankFactors reconstruction;
  TrimReport trim;
  bool cleaned = false;
  std::optional<CleaningState> cleaning;
  double mu0 = 1.0;
  int mu0_restarts = 0;
  // Observed-entry residual 1/2 sum_E (M - X S Y^T)^2 at the cleaning start
  // and at the returned point.
  double residual_start = 0.0;
  double residual_final = 0.0;
  std::vector<RankSweepRow> sweep;
};

// trim -> project -> rescale -> clean. Throws std::invalid_argument when the
// rank is out of range or the input is empty.
CompletionResult complete(const SparseObserved& observed,
                          const PipelineConfig& config);

// Seed-deterministic split of the revealed entries into (train, holdout).
std::pair<SparseObserved, SparseObserved> split_holdout(
    const SparseObserved& observed, double fraction, std::uint64_t seed);

// sqrt(mean over `held` of (M_ij - approx_ij)^2).
double holdout_rmse(const LowRankFactors& approx, const SparseObserved& held);

}  // namespace mcomplete

#endif  // MCOMPLETE_PIPELINE_H_
