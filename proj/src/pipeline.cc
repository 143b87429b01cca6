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

#include "mcomplete/pipeline.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "mcomplete/error.h"
#include "mcomplete/grassmann.h"
#include "mcomplete/rng.h"

namespace mcomplete {
namespace {

double observed_residual(const LowRankFactors& f, const SparseObserved& obs) {
  double sum = 0.0;
  for (const Entry& e : obs.entries()) {
    const double d = e.value - f.entry(e.row, e.col);
    sum += d * d;
  }
  return 0.5 * sum;
}

CompletionResult complete_fixed_rank(const SparseObserved& observed,
                                     const PipelineConfig& config, int r) {
  CompletionResult out;
  out.rank = r;
  TrimResult trimmed = trim(observed);
  out.trim = std::move(trimmed.report);
  out.projection = project_tr(trimmed.trimmed, r,
                              static_cast<std::int64_t>(observed.size()),
                              config.svd);
  out.reconstruction = out.projection;
  out.residual_start = observed_residual(out.projection, observed);
  out.residual_final = out.residual_start;
  if (config.skip_clean) return out;

  CleaningConfig cfg = config.cleaning;
  if (cfg.rho < 0.0 && config.rho_rule == RhoRule::kSpectralScale) {
    cfg.rho = penalty_weight_with_scale(observed, out.projection.sigma(0));
  }
  const Frame u(out.projection.u, 1e-8);
  const Frame v(out.projection.v, 1e-8);
  double mu0 = cfg.mu0;
  for (;;) {
    cfg.mu0 = mu0;
    const GrassmannPair x0{rescale_incoherent(u, mu0),
                           rescale_incoherent(v, mu0)};
    CleaningResult result = gradient_descent(x0, observed, cfg);
    const bool retry =
        config.adapt_mu0 && result.state.g > 0.0 && 2.0 * mu0 <= kMaxMu0;
    if (!retry) {
      out.cleaned = true;
      out.mu0 = mu0;
      out.residual_start = cost_f(x0, observed).value;
      out.reconstruction = result.factors();
      out.residual_final = observed_residual(out.reconstruction, observed);
      out.cleaning = std::move(result.state);
      return out;
    }
    mu0 *= 2.0;
    ++out.mu0_restarts;
  }
}

void check_rank(const SparseObserved& observed, int r) {
  if (r < 1 || r > std::min(observed.rows(), observed.cols())) {
    throw std::invalid_argument("complete: rank " + std::to_string(r) +
                                " out of range");
  }
}

}  // namespace

std::string to_string(RhoRule rule) {
  return rule == RhoRule::kSampleSize ? "n_eps" : "spectral_scale";
}

RhoRule parse_rho_rule(const std::string& name) {
  if (name == "n_eps") return RhoRule::kSampleSize;
  if (name == "spectral_scale") return RhoRule::kSpectralScale;
  throw std::invalid_argument("unknown rho rule: " + name);
}

std::pair<SparseObserved, SparseObserved> split_holdout(
    const SparseObserved& observed, double fraction, std::uint64_t seed) {
  if (!(fraction > 0.0 && fraction < 1.0)) {
    throw std::invalid_argument("split_holdout: fraction must be in (0, 1)");
  }
  const std::size_t total = observed.size();
  const auto held_count = static_cast<std::size_t>(std::llround(fraction * total));
  std::vector<std::size_t> order(total);
  std::iota(order.begin(), order.end(), std::size_t{0});
  Philox4x32 rng(seed, 0x40);
  for (std::size_t i = total; i > 1; --i) {
    std::swap(order[i - 1], order[rng.uniform_index(i)]);
  }
  std::vector<bool> held(total, false);
  for (std::size_t i = 0; i < held_count; ++i) held[order[i]] = true;
  std::vector<Entry> train_entries, held_entries;
  const auto entries = observed.entries();
  for (std::size_t i = 0; i < total; ++i) {
    (held[i] ? held_entries : train_entries).push_back(entries[i]);
  }
  return {SparseObserved(observed.rows(), observed.cols(), train_entries),
          SparseObserved(observed.rows(), observed.cols(), held_entries)};
}

double holdout_rmse(const LowRankFactors& approx, const SparseObserved& held) {
  if (held.empty()) return 0.0;
  return std::sqrt(2.0 * observed_residual(approx, held) / held.size());
}

CompletionResult complete(const SparseObserved& observed,
                          const PipelineConfig& config) {
  if (observed.empty()) throw std::invalid_argument("complete: no entries");
  if (config.rank_max <= 0) {
    check_rank(observed, config.rank);
    return complete_fixed_rank(observed, config, config.rank);
  }
  if (config.rank_min < 1 || config.rank_min > config.rank_max) {
    throw std::invalid_argument("complete: invalid rank sweep range");
  }
  check_rank(observed, config.rank_max);
  const auto [train, held] =
      split_holdout(observed, config.holdout_fraction, config.holdout_seed);
  std::vector<RankSweepRow> sweep;
  double best_err = std::numeric_limits<double>::infinity();
  for (int r = config.rank_min; r <= config.rank_max; ++r) {
    RankSweepRow row{r, std::numeric_limits<double>::infinity(), true};
    try {
      const CompletionResult fit = complete_fixed_rank(train, config, r);
      row.holdout_rmse = holdout_rmse(fit.reconstruction, held);
    } catch (const NumericalError&) {
      row.ok = false;
    }
    if (row.ok) best_err = std::min(best_err, row.holdout_rmse);
    sweep.push_back(row);
  }
  // Smallest rank within kRankSweepSlack of the best holdout error.
  int best = 0;
  for (const RankSweepRow& row : sweep) {
    if (row.ok && row.holdout_rmse <= best_err * (1.0 + kRankSweepSlack)) {
      best = row.rank;
      break;
    }
  }
  if (best == 0) throw NumericalError("complete: every rank in the sweep failed");
  CompletionResult out = complete_fixed_rank(observed, config, best);
  out.sweep = std::move(sweep);
  return out;
}

}  // namespace mcomplete
