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

#ifndef MCOMPLETE_SAMPLING_H_
#define MCOMPLETE_SAMPLING_H_

#include <cstdint>
#include <string>
#include <vector>

#include "mcomplete/low_rank.h"
#include "mcomplete/sparse.h"

namespace mcomplete {

enum class RevealKind { kUniformFixedSize, kBernoulli, kHeavyTailRows };

std::string to_string(RevealKind kind);
// Accepts "uniform", "bernoulli", "heavytail" and the enum spellings
// "uniform_fixed_size", "heavy_tail_rows".
RevealKind parse_reveal_kind(const std::string& name);

// How the set E of revealed positions is drawn.
//  - kUniformFixedSize: `num_revealed` distinct positions, uniform.
//  - kBernoulli: every position independently with probability eps/sqrt(mn).
//  - kHeavyTailRows: row degrees N with P{N = k} proportional to k^-3 on
//    k in [k_min, n], k_min chosen so that the mean row degree is closest to
//    eps * sqrt(n / m); columns uniform without replacement in each row.
struct RevealModel {
  RevealKind kind = RevealKind::kUniformFixedSize;
  std::int64_t num_revealed = 0;
  double eps = 0.0;
  std::uint64_t seed = 0;

  static RevealModel uniform(std::int64_t num_revealed, std::uint64_t seed);
  static RevealModel bernoulli(double eps, std::uint64_t seed);
  static RevealModel heavy_tail(double eps, std::uint64_t seed);
};

// Empirical incoherence constants of a factorization.
struct IncoherenceReport {
  // max over rows of U and V of ||row||^2 / r.
  double mu0_hat = 0.0;
  // max over (i, j) of |sum_k U_ik (sigma_k / sigma_1) V_jk| / sqrt(r).
  double mu1_hat = 0.0;
  // max |M_ij|.
  double m_max = 0.0;
  // False when mu1_hat and m_max come from a random sample of positions.
  bool exact = true;
};

// Scans above this many entries fall back to sampling kIncoherenceSamples
// positions.
inline constexpr double kExactScanLimit = 1e7;
inline constexpr std::int64_t kIncoherenceSamples = 1000000;

// Haar-random factors: Gaussian columns orthonormalized (QR with the sign
// of diag(R) folded in), scaled by sqrt(m) and sqrt(n); sigma sorted
// descending.
LowRankFactors random_low_rank(int m, int n, int r, std::vector<double> sigma,
                               std::uint64_t seed);

// Draws E under `model` and returns M^E with values copied from the factors.
SparseObserved reveal(const LowRankFactors& factors, const RevealModel& model);

// Row-degree law of the heavy-tail model: P{N = k} for k = 0..n (index 0
// unused) and the chosen lower cutoff.
struct HeavyTailLaw {
  int k_min = 1;
  double mean = 0.0;
  std::vector<double> pmf;
};
HeavyTailLaw heavy_tail_law(int n, double target_mean);

IncoherenceReport incoherence_report(const LowRankFactors& factors,
                                     std::uint64_t sample_seed = 1);

// Exact max |M_ij| by exhaustive scan, or sampled above kExactScanLimit.
double max_abs_entry(const LowRankFactors& factors,
                     std::uint64_t sample_seed = 1);

}  // namespace mcomplete

#endif  // MCOMPLETE_SAMPLING_H_
