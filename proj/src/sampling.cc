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

#include "mcomplete/sampling.h"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>
#include <string>
#include <unordered_set>

#include <Eigen/QR>

#include "mcomplete/rng.h"

namespace mcomplete {
namespace {

// Floyd's algorithm: `count` distinct values from [0, universe), sorted.
std::vector<std::int64_t> sample_without_replacement(std::int64_t universe,
                                                     std::int64_t count,
                                                     Philox4x32& rng) {
  std::unordered_set<std::int64_t> chosen;
  chosen.reserve(static_cast<std::size_t>(count) * 2);
  for (std::int64_t j = universe - count; j < universe; ++j) {
    const auto t = static_cast<std::int64_t>(
        rng.uniform_index(static_cast<std::uint64_t>(j) + 1));
    if (!chosen.insert(t).second) chosen.insert(j);
  }
  std::vector<std::int64_t> out(chosen.begin(), chosen.end());
  std::sort(out.begin(), out.end());
  return out;
}

DenseMatrix haar_frame(int rows, int r, Philox4x32& rng) {
  DenseMatrix g(rows, r);
  for (int j = 0; j < r; ++j)
    for (int i = 0; i < rows; ++i) g(i, j) = rng.normal();
  Eigen::HouseholderQR<DenseMatrix> qr(g);
  DenseMatrix q = qr.householderQ() * DenseMatrix::Identity(rows, r);
  for (int j = 0; j < r; ++j) {
    if (qr.matrixQR()(j, j) < 0.0) q.col(j) *= -1.0;
  }
  return q * std::sqrt(static_cast<double>(rows));
}

// Visits every entry (or a sample of them above the exact-scan limit).
void for_each_entry(const LowRankFactors& f, std::uint64_t seed,
                    const std::function<void(double)>& visit, bool* exact) {
  const int m = f.rows();
  const int n = f.cols();
  const DenseMatrix us = f.u * f.sigma.asDiagonal();
  if (static_cast<double>(m) * n <= kExactScanLimit) {
    *exact = true;
    constexpr int kChunk = 256;
    for (int i0 = 0; i0 < m; i0 += kChunk) {
      const int rows = std::min(kChunk, m - i0);
      const DenseMatrix block = us.middleRows(i0, rows) * f.v.transpose();
      for (Eigen::Index k = 0; k < block.size(); ++k) visit(block.data()[k]);
    }
    return;
  }
  *exact = false;
  Philox4x32 rng(seed, /*stream=*/0x1c0);
  for (std::int64_t s = 0; s < kIncoherenceSamples; ++s) {
    const auto i = static_cast<int>(rng.uniform_index(m));
    const auto j = static_cast<int>(rng.uniform_index(n));
    visit(us.row(i).dot(f.v.row(j)));
  }
}

}  // namespace

std::string to_string(RevealKind kind) {
  switch (kind) {
    case RevealKind::kUniformFixedSize:
      return "uniform_fixed_size";
    case RevealKind::kBernoulli:
      return "bernoulli";
    case RevealKind::kHeavyTailRows:
      return "heavy_tail_rows";
  }
  return "unknown";
}

RevealKind parse_reveal_kind(const std::string& name) {
  if (name == "uniform" || name == "uniform_fixed_size")
    return RevealKind::kUniformFixedSize;
  if (name == "bernoulli") return RevealKind::kBernoulli;
  if (name == "heavytail" || name == "heavy_tail_rows")
    return RevealKind::kHeavyTailRows;
  throw std::invalid_argument("unknown reveal model '" + name + "'");
}

RevealModel RevealModel::uniform(std::int64_t num_revealed,
                                 std::uint64_t seed) {
  return {RevealKind::kUniformFixedSize, num_revealed, 0.0, seed};
}

RevealModel RevealModel::bernoulli(double eps, std::uint64_t seed) {
  return {RevealKind::kBernoulli, 0, eps, seed};
}

RevealModel RevealModel::heavy_tail(double eps, std::uint64_t seed) {
  return {RevealKind::kHeavyTailRows, 0, eps, seed};
}

LowRankFactors random_low_rank(int m, int n, int r, std::vector<double> sigma,
                               std::uint64_t seed) {
  if (m < 1 || n < 1 || r < 1 || r > std::min(m, n)) {
    throw std::invalid_argument("random_low_rank: need 1 <= r <= min(m, n)");
  }
  if (static_cast<int>(sigma.size()) != r) {
    throw std::invalid_argument("random_low_rank: sigma must have r values");
  }
  for (double s : sigma) {
    if (!(s > 0.0) || !std::isfinite(s)) {
      throw std::invalid_argument("random_low_rank: sigma must be positive");
    }
  }
  std::sort(sigma.begin(), sigma.end(), std::greater<>());
  Philox4x32 rng(seed);
  LowRankFactors f;
  f.u = haar_frame(m, r, rng);
  f.v = haar_frame(n, r, rng);
  f.sigma = Eigen::Map<const Vector>(sigma.data(), r);
  return f;
}

HeavyTailLaw heavy_tail_law(int n, double target_mean) {
  if (n < 1) throw std::invalid_argument("heavy_tail_law: n < 1");
  // Tail sums S_p(k) = sum_{j=k}^{n} j^{-p}, for the mean of the truncated law.
  std::vector<double> s2(n + 2, 0.0), s3(n + 2, 0.0);
  for (int k = n; k >= 1; --k) {
    const double kd = k;
    s3[k] = s3[k + 1] + 1.0 / (kd * kd * kd);
    s2[k] = s2[k + 1] + 1.0 / (kd * kd);
  }
  HeavyTailLaw law;
  double best = std::numeric_limits<double>::infinity();
  for (int k_min = 1; k_min <= n; ++k_min) {
    const double mean = s2[k_min] / s3[k_min];
    const double gap = std::abs(mean - target_mean);
    if (gap < best) {
      best = gap;
      law.k_min = k_min;
      law.mean = mean;
    }
    if (mean > target_mean) break;
  }
  law.pmf.assign(n + 1, 0.0);
  for (int k = law.k_min; k <= n; ++k) {
    const double kd = k;
    law.pmf[k] = 1.0 / (kd * kd * kd) / s3[law.k_min];
  }
  return law;
}

SparseObserved reveal(const LowRankFactors& factors, const RevealModel& model) {
  const int m = factors.rows();
  const int n = factors.cols();
  const std::int64_t total = static_cast<std::int64_t>(m) * n;
  const double root_mn = std::sqrt(static_cast<double>(total));
  Philox4x32 rng(model.seed, /*stream=*/0xe);
  std::vector<Entry> entries;
  auto add = [&](int i, int j) {
    entries.push_back({i, j, factors.entry(i, j)});
  };

  switch (model.kind) {
    case RevealKind::kUniformFixedSize: {
      if (model.num_revealed < 0 || model.num_revealed > total) {
        throw std::invalid_argument(
            "reveal: |E| = " + std::to_string(model.num_revealed) +
            " outside [0, mn = " + std::to_string(total) + "]");
      }
      entries.reserve(model.num_revealed);
      for (std::int64_t p :
           sample_without_replacement(total, model.num_revealed, rng)) {
        add(static_cast<int>(p / n), static_cast<int>(p % n));
      }
      break;
    }
    case RevealKind::kBernoulli: {
      if (!(model.eps > 0.0) || model.eps > root_mn) {
        throw std::invalid_argument("reveal: eps must lie in (0, sqrt(mn)]");
      }
      const double p = model.eps / root_mn;
      if (p >= 1.0) {
        for (int i = 0; i < m; ++i)
          for (int j = 0; j < n; ++j) add(i, j);
        break;
      }
      // Geometric gaps between successive revealed positions.
      const double log_q = std::log1p(-p);
      std::int64_t pos = -1;
      for (;;) {
        const double gap = std::floor(std::log(rng.uniform_open_zero()) / log_q);
        if (gap >= static_cast<double>(total)) break;
        pos += static_cast<std::int64_t>(gap) + 1;
        if (pos >= total) break;
        add(static_cast<int>(pos / n), static_cast<int>(pos % n));
      }
      break;
    }
    case RevealKind::kHeavyTailRows: {
      if (!(model.eps > 0.0) || model.eps > root_mn) {
        throw std::invalid_argument("reveal: eps must lie in (0, sqrt(mn)]");
      }
      const double target = model.eps * std::sqrt(static_cast<double>(n) / m);
      const HeavyTailLaw law = heavy_tail_law(n, target);
      std::vector<double> cdf(n + 1, 0.0);
      for (int k = 1; k <= n; ++k) cdf[k] = cdf[k - 1] + law.pmf[k];
      for (int i = 0; i < m; ++i) {
        const double u = rng.uniform() * cdf[n];
        int degree = static_cast<int>(
            std::upper_bound(cdf.begin(), cdf.end(), u) - cdf.begin());
        degree = std::clamp(degree, law.k_min, n);
        for (std::int64_t j : sample_without_replacement(n, degree, rng)) {
          add(i, static_cast<int>(j));
        }
      }
      break;
    }
  }
  return SparseObserved(m, n, std::move(entries));
}

double max_abs_entry(const LowRankFactors& factors, std::uint64_t sample_seed) {
  double best = 0.0;
  bool exact = true;
  for_each_entry(
      factors, sample_seed,
      [&](double value) { best = std::max(best, std::abs(value)); }, &exact);
  return best;
}

IncoherenceReport incoherence_report(const LowRankFactors& factors,
                                     std::uint64_t sample_seed) {
  const int r = factors.rank();
  IncoherenceReport report;
  report.mu0_hat =
      std::max(factors.u.rowwise().squaredNorm().maxCoeff(),
               factors.v.rowwise().squaredNorm().maxCoeff()) /
      r;
  double best = 0.0;
  for_each_entry(
      factors, sample_seed,
      [&](double value) { best = std::max(best, std::abs(value)); },
      &report.exact);
  report.m_max = best;
  const double top = factors.sigma(0);
  report.mu1_hat = top > 0.0 ? best / (top * std::sqrt(static_cast<double>(r)))
                             : 0.0;
  return report;
}

}  // namespace mcomplete
