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

#ifndef MCOMPLETE_CLEANING_H_
#define MCOMPLETE_CLEANING_H_

#include <iosfwd>
#include <limits>
#include <string>
#include <vector>

#include "mcomplete/grassmann.h"
#include "mcomplete/low_rank.h"
#include "mcomplete/sparse.h"

namespace mcomplete {

// Parameters of the cleaning stage. Fields documented as "auto" take their
// value from the data when left negative.
struct CleaningConfig {
  // Weight of the incoherence penalty. Auto: n * eps, eps = |E| / sqrt(mn).
  double rho = -1.0;
  // Incoherence level of the penalty: rows are penalized beyond 3 mu0 r.
  double mu0 = 1.0;
  // Radius of the ball d(x, x0) <= gamma around the start; infinity disables.
  double gamma = std::numeric_limits<double>::infinity();
  int max_iters = 500;
  // Gradient-norm stop. Auto: 1e-8 * n * eps * s1^2, s1 the top singular
  // value of the core at the starting point.
  double grad_tol = -1.0;
  // Stop once sum_E (M - X S Y^T)^2 / sum_E M^2 <= fit_tol.
  double fit_tol = 1e-12;
  // First trial step. Auto: 1 / (||grad|| + machine epsilon).
  double initial_step = -1.0;
  double backtrack = 0.5;
  double sufficient_decrease = 1e-4;
  int max_backtracks = 60;
};

// The alternative penalty weight n * eps * sqrt(alpha) * Sigma_max^2, with
// Sigma_max estimated by the caller (e.g. sigma_1 / eps from the spectral
// stage).
double penalty_weight_with_scale(const SparseObserved& observed,
                                 double sigma_max);
// n * eps.
double default_penalty_weight(const SparseObserved& observed);

struct CoreSolution {
  DenseMatrix s;
  // The r^2 x r^2 normal equations were singular; s is the minimum-norm
  // minimizer.
  bool degenerate = false;
};

// argmin_S 1/2 sum_E (M_ij - (X S Y^T)_ij)^2.
CoreSolution solve_s(const GrassmannPair& x, const SparseObserved& observed);

struct CostValue {
  double value = 0.0;
  DenseMatrix s;
  bool degenerate = false;
};
// F(X, Y) = min_S 1/2 sum_E (M_ij - (X S Y^T)_ij)^2, with its minimizer.
CostValue cost_f(const GrassmannPair& x, const SparseObserved& observed);

struct PenaltyValue {
  double value = 0.0;
  // Some exponent exceeded the overflow cap and was clamped.
  bool saturated = false;
};
// G(X, Y) = sum_i G1(||X_i||^2 / (3 mu0 r)) + sum_j G1(||Y_j||^2 / (3 mu0 r)),
// G1(z) = exp((z - 1)^2) - 1 for z >= 1 and 0 otherwise.
PenaltyValue cost_g(const GrassmannPair& x, double mu0);

// F + rho G.
double cost_ftilde(const GrassmannPair& x, const SparseObserved& observed,
                   const CleaningConfig& config);

// Riemannian gradient of F + rho G at x (tangent at x).
TangentPair grad_ftilde(const GrassmannPair& x, const SparseObserved& observed,
                        const CleaningConfig& config);

enum class StopReason {
  kFitTolerance,
  kGradientTolerance,
  kMaxIterations,
  kStalled,
};
std::string to_string(StopReason reason);

struct TraceRow {
  int iter = 0;
  double f = 0.0;
  double g = 0.0;
  double grad_norm = 0.0;
  double dist_to_x0 = 0.0;
  double step = 0.0;
};

struct CleaningState {
  int iterations = 0;
  double f = 0.0;
  double g = 0.0;
  double ftilde = 0.0;
  double grad_norm = 0.0;
  double fit_residual = 0.0;  // sum_E (M - X S Y^T)^2 / sum_E M^2
  double rho = 0.0;
  double grad_tol = 0.0;
  StopReason reason = StopReason::kMaxIterations;
  bool stalled = false;
  bool degenerate = false;
  std::vector<TraceRow> trace;
};

struct CleaningResult {
  GrassmannPair x;
  DenseMatrix s;
  CleaningState state;

  LowRankFactors factors() const {
    return LowRankFactors::from_core(x.x.matrix(), s, x.y.matrix());
  }
};

// Gradient descent along geodesics with backtracking (Armijo) line search.
// F + rho G is nonincreasing along the returned trace.
CleaningResult gradient_descent(const GrassmannPair& x0,
                                const SparseObserved& observed,
                                const CleaningConfig& config = {});

// Writes "iter,F,G,grad_norm,dist_to_x0,step" rows.
void write_trace_csv(std::ostream& out, const std::vector<TraceRow>& trace);

}  // namespace mcomplete

#endif  // MCOMPLETE_CLEANING_H_
