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

// Acceptance suite: one PASS/FAIL line per criterion. Pass criterion numbers
// as arguments to run a subset.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <iostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/QR>

#include "mcomplete/cleaning.h"
#include "mcomplete/harness.h"
#include "mcomplete/sampling.h"
#include "test_support.h"

namespace mcomplete {
namespace {

using testing::gaussian;
using testing::naive_angles;
using testing::random_frame;
using testing::random_rotation;
using testing::random_sparse;
using testing::random_tangent;

struct Outcome {
  bool pass = false;
  std::string detail;
};

struct Criterion {
  int id;
  std::string name;
  double time_limit;  // seconds; <= 0 means none
  std::function<Outcome()> run;
};

std::string fmt(const char* format, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, format, args...);
  return buf;
}

// Runs of criterion 4, reused by criterion 9.
std::vector<RunRecord> g_scaling_runs;

Outcome gradient_check() {
  int checks = 0, bad = 0;
  double worst = 0.0;
  for (int inst = 0; inst < 20; ++inst) {
    const int m = 60, n = 40, r = 1 + inst % 3;
    Philox4x32 rng(1000 + inst, 1);
    std::vector<double> sigma;
    for (int k = 0; k < r; ++k) sigma.push_back(1.0 + 0.5 * k);
    const LowRankFactors f = random_low_rank(m, n, r, sigma, 1000 + inst);
    const SparseObserved e = reveal(f, RevealModel::uniform(6 * n * r, 2000 + inst));
    const GrassmannPair x{random_frame(rng, m, r), random_frame(rng, n, r)};
    CleaningConfig cfg;
    cfg.mu0 = 0.5;
    const TangentPair g = grad_ftilde(x, e, cfg);
    for (int k = 0; k < 20; ++k) {
      TangentPair w{random_tangent(rng, x.x), random_tangent(rng, x.y)};
      w = w.scaled(1.0 / w.norm());
      const double h = 1e-5;
      const double fd = (cost_ftilde(geodesic(x, w, h), e, cfg) -
                         cost_ftilde(geodesic(x, w, -h), e, cfg)) /
                        (2 * h);
      const double exact = g.dot(w);
      const double rel = std::abs(fd - exact) / std::abs(exact);
      worst = std::max(worst, rel);
      ++checks;
      if (!(rel <= 1e-5)) ++bad;
    }
  }
  return {bad == 0, fmt("%d directional derivatives, %d over 1e-5, worst rel %.2e",
                        checks, bad, worst)};
}

DenseMatrix dense_core_oracle(const GrassmannPair& x, const SparseObserved& e) {
  const int r = x.x.rank();
  DenseMatrix a(e.size(), r * r);
  Vector b(e.size());
  int row = 0;
  for (const Entry& entry : e.entries()) {
    const DenseMatrix outer =
        x.x.matrix().row(entry.row).transpose() * x.y.matrix().row(entry.col);
    a.row(row) = Eigen::Map<const Vector>(outer.data(), r * r).transpose();
    b(row++) = entry.value;
  }
  const Vector s = a.colPivHouseholderQr().solve(b);
  return Eigen::Map<const DenseMatrix>(s.data(), r, r);
}

Outcome oracle_equivalence() {
  Philox4x32 rng(2, 2);
  int compared = 0, svd_bad = 0, core_bad = 0;
  double svd_worst = 0.0, core_worst = 0.0;
  for (int t = 0; t < 50; ++t) {
    const int rows = 20 + static_cast<int>(rng.uniform_index(81));
    const int cols = 20 + static_cast<int>(rng.uniform_index(81));
    const int count = static_cast<int>(rows * cols * (0.05 + 0.3 * rng.uniform()));
    const int k = 1 + static_cast<int>(rng.uniform_index(6));
    const SparseObserved a = random_sparse(rng, rows, cols, count);
    const SvdTriplet s = top_r_svd(a, k);
    const SvdTriplet d = dense_svd(a.to_dense());
    for (int i = 0; i < k; ++i) {
      const double v = d.values(i);
      double gap = std::abs(v - d.values(i + 1));
      if (i > 0) gap = std::min(gap, std::abs(d.values(i - 1) - v));
      if (gap < 1e-6 * v) continue;
      const double err = std::abs(s.values(i) - v);
      svd_worst = std::max(svd_worst, err);
      ++compared;
      if (!(err <= 1e-8)) ++svd_bad;
    }
  }
  for (int t = 0; t < 50; ++t) {
    const int r = 1 + t % 3;
    const int m = 8 + static_cast<int>(rng.uniform_index(30));
    const int n = 8 + static_cast<int>(rng.uniform_index(30));
    const GrassmannPair x{random_frame(rng, m, r), random_frame(rng, n, r)};
    const SparseObserved e = random_sparse(rng, m, n, 4 * r * r + m);
    const CoreSolution c = solve_s(x, e);
    const double err = (c.s - dense_core_oracle(x, e)).cwiseAbs().maxCoeff();
    core_worst = std::max(core_worst, err);
    if (c.degenerate || !(err <= 1e-10)) ++core_bad;
  }
  return {svd_bad == 0 && core_bad == 0,
          fmt("svd: %d values compared, %d off (worst %.2e); solve_s: %d off "
              "(worst %.2e)",
              compared, svd_bad, svd_worst, core_bad, core_worst)};
}

double chordal_oracle(const Frame& a, const Frame& b) {
  Eigen::JacobiSVD<DenseMatrix> svd(a.matrix().transpose() * b.matrix(),
                                    Eigen::ComputeFullU | Eigen::ComputeFullV);
  const DenseMatrix q = svd.matrixU() * svd.matrixV().transpose();
  return (a.matrix() * q - b.matrix()).norm() / std::sqrt(double(a.rows()));
}

double projection_oracle(const Frame& a, const Frame& b) {
  const DenseMatrix d =
      a.matrix() * a.matrix().transpose() - b.matrix() * b.matrix().transpose();
  return d.norm() / (std::sqrt(2.0) * a.rows());
}

Outcome distance_geometry() {
  Philox4x32 rng(3, 3);
  constexpr double kPi = 3.14159265358979323846;
  constexpr double slack = 1e-10;
  int chain_bad = 0, oracle_bad = 0, pairs = 0;
  double worst = 0.0;
  const int ranks[] = {1, 2, 5};
  for (int t = 0; t < 10000; ++t) {
    const int r = ranks[t % 3];
    const int rows = r + 2 + static_cast<int>(rng.uniform_index(30));
    const Frame a = random_frame(rng, rows, r), b = random_frame(rng, rows, r);
    const Distances d = distances(a, b);
    ++pairs;
    if (!(d.geodesic / kPi <= d.chordal / std::sqrt(2.0) + slack &&
          d.chordal / std::sqrt(2.0) <= d.projection + slack &&
          d.projection <= d.chordal + slack && d.chordal <= d.geodesic + slack)) {
      ++chain_bad;
    }
    const double e = std::max({std::abs(d.chordal - chordal_oracle(a, b)),
                               std::abs(d.projection - projection_oracle(a, b)),
                               std::abs(d.geodesic - naive_angles(a, b).norm())});
    worst = std::max(worst, e);
    if (!(e <= 1e-8)) ++oracle_bad;
  }
  return {chain_bad == 0 && oracle_bad == 0,
          fmt("%d pairs, %d chain violations, %d oracle mismatches (worst %.2e)",
              pairs, chain_bad, oracle_bad, worst)};
}

ExperimentSpec scaling_spec() {
  ExperimentSpec s;
  s.kind = ExperimentKind::kRmseScaling;
  s.dims = {1000};
  s.ranks = {3};
  s.eps = {15, 30, 60, 120};
  s.sigma = {1.2, 1.1, 1.0};
  s.skip_clean = true;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) s.seeds.push_back(seed);
  return s;
}

int failures_of(const ExperimentResult& res) { return res.summary["failures"]; }

Outcome rmse_scaling() {
  const ExperimentResult res = run_experiment(scaling_spec());
  g_scaling_runs = res.runs;
  const Json slope = res.summary["slopes"][0]["slope"];
  std::ostringstream medians;
  for (const Json& row : res.summary["groups"]) {
    medians << " " << fmt("%.3g", row["median_rmse_projection"].get<double>());
  }
  if (slope.is_null() || failures_of(res) > 0) {
    return {false, fmt("%d failed runs", failures_of(res))};
  }
  const double v = slope;
  return {v >= -0.65 && v <= -0.35,
          fmt("slope %.3f, target [-0.65, -0.35]; median rmse", v) + medians.str()};
}

Outcome lemma_constants() {
  ExperimentSpec s;
  s.kind = ExperimentKind::kLemmaConstants;
  s.dims = {500, 1000, 2000};
  s.ranks = {3};
  s.eps = {30};
  s.seeds = {1, 2, 3, 4, 5};
  const ExperimentResult res = run_experiment(s);
  const Json spread = res.summary["constant_spread"];
  std::ostringstream maxima;
  for (const Json& row : res.summary["groups"]) {
    maxima << " " << fmt("%.3f", row["max_normalized_deviation"].get<double>());
  }
  if (spread.is_null() || failures_of(res) > 0) {
    return {false, fmt("%d failed runs", failures_of(res))};
  }
  const double v = spread;
  return {v < 2.0, fmt("max/min spread %.3f; maxima over n", v) + maxima.str()};
}

Outcome trim_effect() {
  ExperimentSpec s;
  s.kind = ExperimentKind::kTrimEffect;
  s.dims = {2000};
  s.ranks = {3};
  s.eps = {30};
  s.reveal = RevealKind::kHeavyTailRows;
  s.num_singular_values = 10;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) s.seeds.push_back(seed);
  const ExperimentResult res = run_experiment(s);
  const Json& row = res.summary["groups"][0];
  const int improved = row["gap_improved"];
  const int exact_three = row["exactly_r_above_after"];
  return {failures_of(res) == 0 && improved >= 9 && exact_three == 10,
          fmt("gap ratio improved in %d/10 (need 9), exactly 3 above 2x median "
              "after trimming in %d/10 (need 10), median ratio %.3f -> %.3f",
              improved, exact_three, row["median_gap_ratio_before"].get<double>(),
              row["median_gap_ratio_after"].get<double>())};
}

ExperimentSpec exact_spec() {
  ExperimentSpec s;
  s.kind = ExperimentKind::kExactRecovery;
  s.dims = {400};
  s.ranks = {2};
  s.log_multipliers = {8};
  s.sigma = {1.5, 1.0};
  s.skip_clean = false;
  s.cleaning.fit_tol = 1e-18;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) s.seeds.push_back(seed);
  return s;
}

Outcome exact_recovery() {
  const ExperimentResult res = run_experiment(exact_spec());
  const Json& row = res.summary["groups"][0];
  const int successes = row["successes"];
  const int increases = row["residual_increases"];
  int g_nonzero = 0;
  for (const RunRecord& run : res.runs) {
    if (run.ok && run.cleaning->g != 0.0) ++g_nonzero;
  }
  return {failures_of(res) == 0 && successes >= 18 && increases == 0,
          fmt("%d/20 with rel error <= 1e-6 (need 18), %d residual increases, "
              "median rel error %.2e, %d runs with G != 0",
              successes, increases, row["median_rel_frobenius_final"].get<double>(),
              g_nonzero)};
}

Outcome rescaling() {
  Philox4x32 rng(8, 8);
  int bad_ball = 0, bad_dist = 0, clipped = 0;
  double worst_ratio = 0.0;
  for (int t = 0; t < 100; ++t) {
    const int n = 100 + 50 * static_cast<int>(rng.uniform_index(5));
    const int r = 1 + t % 3;
    const Frame u = random_frame(rng, n, r);
    const double mu0 = u.max_row_norm_sq() / r;
    DenseMatrix w = random_tangent(rng, u);
    if (t % 2 == 1) {
      // Concentrate the perturbation on one row so the clip is exercised.
      DenseMatrix spike = DenseMatrix::Zero(n, r);
      spike.row(static_cast<int>(rng.uniform_index(n))) = gaussian(rng, 1, r);
      w = project_tangent(u, spike);
    }
    const double delta = (0.05 + 0.95 * rng.uniform()) / 16.0;
    Eigen::JacobiSVD<DenseMatrix> svd(w);
    const double speed = svd.singularValues().norm() / std::sqrt(double(n));
    const Frame x = geodesic(u, w, delta / speed);
    const double d0 = distances(x, u).geodesic;
    if (!x.in_ball(mu0)) ++clipped;
    const Frame out = rescale_incoherent(x, mu0);
    if (!out.in_ball(3 * mu0)) ++bad_ball;
    const double d1 = distances(out, u).geodesic;
    worst_ratio = std::max(worst_ratio, d1 / d0);
    if (!(d1 <= 4 * d0)) ++bad_dist;
  }
  return {bad_ball == 0 && bad_dist == 0,
          fmt("100 instances (%d clipped), %d outside K(3 mu0), %d over 4 delta, "
              "worst d(X'',U)/delta %.3f",
              clipped, bad_ball, bad_dist, worst_ratio)};
}

Outcome gap_bound() {
  if (g_scaling_runs.empty()) g_scaling_runs = run_experiment(scaling_spec()).runs;
  int checked = 0, symmetric_bad = 0, proven_bad = 0;
  double worst = 0.0;
  for (const RunRecord& run : g_scaling_runs) {
    if (!run.ok || !run.gap) continue;
    ++checked;
    if (!run.gap->holds_symmetric) ++symmetric_bad;
    if (!run.gap->holds) ++proven_bad;
    worst = std::max(worst, std::max(run.gap->projection_u, run.gap->projection_v) /
                                run.gap->symmetric_bound);
  }
  return {checked == 40 && symmetric_bad == 0,
          fmt("%d projections, %d over sqrt(2 alpha) form, %d over sqrt(alpha) "
              "form, worst d_p/bound %.3f",
              checked, symmetric_bad, proven_bad, worst)};
}

Outcome determinism() {
  struct Point {
    ExperimentSpec spec;
    int n, r;
    double budget;
    std::uint64_t seed;
  };
  ExperimentSpec lemma;
  lemma.kind = ExperimentKind::kLemmaConstants;
  lemma.dims = {500};
  lemma.ranks = {3};
  lemma.eps = {30};
  lemma.seeds = {1};
  ExperimentSpec trim_spec = lemma;
  trim_spec.kind = ExperimentKind::kTrimEffect;
  trim_spec.reveal = RevealKind::kHeavyTailRows;
  const std::vector<Point> points = {
      {scaling_spec(), 1000, 3, 30, 4},
      {lemma, 500, 3, 30, 2},
      {trim_spec, 500, 3, 30, 3},
      {exact_spec(), 400, 2, 8, 5},
  };
  int mismatched = 0;
  for (const Point& p : points) {
    const std::string a =
        deterministic_json(run_single(p.spec, p.n, p.r, p.budget, p.seed)).dump();
    const std::string b =
        deterministic_json(run_single(p.spec, p.n, p.r, p.budget, p.seed)).dump();
    if (a != b) ++mismatched;
  }
  ExperimentSpec small = scaling_spec();
  small.dims = {300};
  small.eps = {15, 30};
  small.seeds = {1, 2, 3};
  small.threads = 1;
  const ExperimentResult one = run_experiment(small);
  small.threads = 3;
  const ExperimentResult three = run_experiment(small);
  int experiment_mismatch = one.summary == three.summary ? 0 : 1;
  for (std::size_t i = 0; i < one.runs.size(); ++i) {
    if (deterministic_json(one.runs[i]).dump() !=
        deterministic_json(three.runs[i]).dump()) {
      ++experiment_mismatch;
    }
  }
  return {mismatched == 0 && experiment_mismatch == 0,
          fmt("%zu repeated runs, %d differ; 1 vs 3 threads: %d differences",
              points.size(), mismatched, experiment_mismatch)};
}

}  // namespace
}  // namespace mcomplete

int main(int argc, char** argv) {
  using namespace mcomplete;
  std::set<int> only;
  for (int i = 1; i < argc; ++i) only.insert(std::atoi(argv[i]));
  const std::vector<Criterion> criteria = {
      {1, "gradient correctness", 30, gradient_check},
      {2, "oracle equivalence", 60, oracle_equivalence},
      {3, "distance geometry", 0, distance_geometry},
      {4, "rmse scaling", 600, rmse_scaling},
      {5, "spectral deviation constant", 300, lemma_constants},
      {6, "trimming effect", 300, trim_effect},
      {7, "exact recovery", 600, exact_recovery},
      {8, "incoherent rescaling", 30, rescaling},
      {9, "subspace gap bound", 0, gap_bound},
      {10, "determinism", 0, determinism},
  };
  int failed = 0;
  for (const Criterion& c : criteria) {
    if (!only.empty() && !only.count(c.id)) continue;
    const auto start = std::chrono::steady_clock::now();
    Outcome out;
    try {
      out = c.run();
    } catch (const std::exception& e) {
      out = {false, std::string("exception: ") + e.what()};
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (c.time_limit > 0 && secs >= c.time_limit) {
      out.pass = false;
      out.detail += mcomplete::fmt("; over the %.0f s limit", c.time_limit);
    }
    std::cout << "criterion " << c.id << " [" << c.name << "]: "
              << (out.pass ? "PASS" : "FAIL") << " (" << out.detail << ") "
              << mcomplete::fmt("%.1fs", secs) << std::endl;
    failed += out.pass ? 0 : 1;
  }
  return failed == 0 ? 0 : 1;
}
