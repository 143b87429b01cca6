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

#include "mcomplete/cleaning.h"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <stdexcept>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include "mcomplete/io.h"

namespace mcomplete {
namespace {

using RowMajorMatrix =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// exp() arguments are capped here; exp(700) is still finite.
constexpr double kMaxExponent = 700.0;

void check_shapes(const GrassmannPair& x, const SparseObserved& observed) {
  if (x.x.rows() != observed.rows() || x.y.rows() != observed.cols() ||
      x.x.rank() != x.y.rank()) {
    throw std::invalid_argument("cleaning: frames do not match the data");
  }
}

double sample_eps(const SparseObserved& observed) {
  return static_cast<double>(observed.size()) /
         std::sqrt(static_cast<double>(observed.rows()) * observed.cols());
}

struct Residuals {
  std::vector<double> values;  // (X S Y^T - M)_ij per entry, entry order
  double sum_sq = 0.0;
};

Residuals residuals(const RowMajorMatrix& xs, const RowMajorMatrix& y,
                    const SparseObserved& observed) {
  Residuals out;
  out.values.reserve(observed.size());
  for (const Entry& e : observed.entries()) {
    const double res = xs.row(e.row).dot(y.row(e.col)) - e.value;
    out.values.push_back(res);
    out.sum_sq += res * res;
  }
  return out;
}

// Penalty value and, optionally, its Euclidean gradient for one frame.
void penalty_rows(const DenseMatrix& a, double mu0, double* value,
                  bool* saturated, DenseMatrix* grad) {
  const double r = a.cols();
  const double scale = 3.0 * mu0 * r;
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    const double z = a.row(i).squaredNorm() / scale;
    if (z <= 1.0) continue;
    double exponent = (z - 1.0) * (z - 1.0);
    if (exponent > kMaxExponent) {
      exponent = kMaxExponent;
      *saturated = true;
    }
    const double e = std::exp(exponent);
    *value = std::min(*value + (e - 1.0), std::numeric_limits<double>::max());
    if (grad != nullptr) {
      // d/dA_i G1(|A_i|^2 / scale) = G1'(z) * 2 A_i / scale.
      grad->row(i) += (2.0 * (z - 1.0) * e) * (2.0 / scale) * a.row(i);
    }
  }
}

struct Evaluation {
  double f = 0.0;
  double g = 0.0;
  double ftilde = 0.0;
  double fit_residual = 0.0;
  DenseMatrix s;
  bool degenerate = false;
  TangentPair grad;
};

Evaluation evaluate(const GrassmannPair& x, const SparseObserved& observed,
                    double rho, double mu0, double sum_sq_data,
                    bool with_gradient) {
  Evaluation ev;
  const CoreSolution core = solve_s(x, observed);
  ev.s = core.s;
  ev.degenerate = core.degenerate;
  const RowMajorMatrix xs = x.x.matrix() * core.s;
  const RowMajorMatrix y = x.y.matrix();
  const Residuals res = residuals(xs, y, observed);
  ev.f = 0.5 * res.sum_sq;
  ev.fit_residual =
      res.sum_sq / std::max(sum_sq_data, std::numeric_limits<double>::min());

  bool saturated = false;
  DenseMatrix grad_gx, grad_gy;
  if (with_gradient) {
    grad_gx = DenseMatrix::Zero(x.x.rows(), x.x.rank());
    grad_gy = DenseMatrix::Zero(x.y.rows(), x.y.rank());
  }
  penalty_rows(x.x.matrix(), mu0, &ev.g, &saturated,
               with_gradient ? &grad_gx : nullptr);
  penalty_rows(x.y.matrix(), mu0, &ev.g, &saturated,
               with_gradient ? &grad_gy : nullptr);
  ev.ftilde = ev.f + rho * ev.g;
  if (!with_gradient) return ev;

  const RowMajorMatrix yst = x.y.matrix() * core.s.transpose();
  RowMajorMatrix gx = RowMajorMatrix::Zero(x.x.rows(), x.x.rank());
  RowMajorMatrix gy = RowMajorMatrix::Zero(x.y.rows(), x.y.rank());
  std::size_t k = 0;
  for (const Entry& e : observed.entries()) {
    const double r = res.values[k++];
    gx.row(e.row) += r * yst.row(e.col);
    gy.row(e.col) += r * xs.row(e.row);
  }
  const DenseMatrix full_x = DenseMatrix(gx) + rho * grad_gx;
  const DenseMatrix full_y = DenseMatrix(gy) + rho * grad_gy;
  ev.grad = {project_tangent(x.x, full_x), project_tangent(x.y, full_y)};
  return ev;
}

}  // namespace

double default_penalty_weight(const SparseObserved& observed) {
  return observed.cols() * sample_eps(observed);
}

double penalty_weight_with_scale(const SparseObserved& observed,
                                 double sigma_max) {
  const double alpha = static_cast<double>(observed.rows()) / observed.cols();
  return default_penalty_weight(observed) * std::sqrt(alpha) * sigma_max *
         sigma_max;
}

CoreSolution solve_s(const GrassmannPair& x, const SparseObserved& observed) {
  check_shapes(x, observed);
  const int r = x.x.rank();
  const int dim = r * r;
  const RowMajorMatrix xm = x.x.matrix();
  const RowMajorMatrix ym = x.y.matrix();
  // (X S Y^T)_ij = a_ij . vec(S), a_ij[k + r l] = X_ik Y_jl.
  DenseMatrix normal = DenseMatrix::Zero(dim, dim);
  Vector rhs = Vector::Zero(dim);
  Vector a(dim);
  for (const Entry& e : observed.entries()) {
    for (int l = 0; l < r; ++l)
      for (int k = 0; k < r; ++k) a(k + r * l) = xm(e.row, k) * ym(e.col, l);
    normal.selfadjointView<Eigen::Lower>().rankUpdate(a);
    rhs += e.value * a;
  }
  normal = normal.selfadjointView<Eigen::Lower>();

  CoreSolution out;
  const Eigen::SelfAdjointEigenSolver<DenseMatrix> eig(normal);
  const Vector& lambda = eig.eigenvalues();
  const double cutoff = lambda.maxCoeff() * 1e-12 * dim;
  const Vector coeffs = eig.eigenvectors().transpose() * rhs;
  Vector solution = Vector::Zero(dim);
  for (int i = 0; i < dim; ++i) {
    if (lambda(i) > cutoff && lambda(i) > 0.0) {
      solution += (coeffs(i) / lambda(i)) * eig.eigenvectors().col(i);
    } else {
      out.degenerate = true;
    }
  }
  out.s = Eigen::Map<const DenseMatrix>(solution.data(), r, r);
  return out;
}

CostValue cost_f(const GrassmannPair& x, const SparseObserved& observed) {
  const CoreSolution core = solve_s(x, observed);
  const RowMajorMatrix xs = x.x.matrix() * core.s;
  const RowMajorMatrix y = x.y.matrix();
  return {0.5 * residuals(xs, y, observed).sum_sq, core.s, core.degenerate};
}

PenaltyValue cost_g(const GrassmannPair& x, double mu0) {
  if (!(mu0 > 0.0)) throw std::invalid_argument("cost_g: mu0 must be > 0");
  PenaltyValue out;
  penalty_rows(x.x.matrix(), mu0, &out.value, &out.saturated, nullptr);
  penalty_rows(x.y.matrix(), mu0, &out.value, &out.saturated, nullptr);
  return out;
}

double cost_ftilde(const GrassmannPair& x, const SparseObserved& observed,
                   const CleaningConfig& config) {
  const double rho =
      config.rho < 0.0 ? default_penalty_weight(observed) : config.rho;
  return evaluate(x, observed, rho, config.mu0, 1.0, false).ftilde;
}

TangentPair grad_ftilde(const GrassmannPair& x, const SparseObserved& observed,
                        const CleaningConfig& config) {
  check_shapes(x, observed);
  const double rho =
      config.rho < 0.0 ? default_penalty_weight(observed) : config.rho;
  return evaluate(x, observed, rho, config.mu0, 1.0, true).grad;
}

std::string to_string(StopReason reason) {
  switch (reason) {
    case StopReason::kFitTolerance:
      return "fit_tolerance";
    case StopReason::kGradientTolerance:
      return "gradient_tolerance";
    case StopReason::kMaxIterations:
      return "max_iterations";
    case StopReason::kStalled:
      return "stalled";
  }
  return "unknown";
}

CleaningResult gradient_descent(const GrassmannPair& x0,
                                const SparseObserved& observed,
                                const CleaningConfig& config) {
  check_shapes(x0, observed);
  if (!(config.mu0 > 0.0) || !(config.backtrack > 0.0 && config.backtrack < 1.0) ||
      !(config.sufficient_decrease > 0.0 && config.sufficient_decrease < 1.0) ||
      config.max_iters < 0 || !(config.gamma > 0.0)) {
    throw std::invalid_argument("gradient_descent: invalid configuration");
  }
  double sum_sq_data = 0.0;
  for (const Entry& e : observed.entries()) sum_sq_data += e.value * e.value;

  CleaningState state;
  state.rho = config.rho < 0.0 ? default_penalty_weight(observed) : config.rho;
  GrassmannPair x = x0;
  Evaluation ev =
      evaluate(x, observed, state.rho, config.mu0, sum_sq_data, true);
  if (config.grad_tol < 0.0) {
    const double s1 = Eigen::JacobiSVD<DenseMatrix>(ev.s).singularValues()(0);
    state.grad_tol = 1e-8 * default_penalty_weight(observed) * s1 * s1;
  } else {
    state.grad_tol = config.grad_tol;
  }
  state.degenerate = ev.degenerate;

  double grad_norm = ev.grad.norm();
  state.trace.push_back({0, ev.f, ev.g, grad_norm, 0.0, 0.0});
  double previous_step = 0.0;
  int iter = 0;
  for (;;) {
    if (ev.fit_residual <= config.fit_tol) {
      state.reason = StopReason::kFitTolerance;
      break;
    }
    if (grad_norm <= state.grad_tol) {
      state.reason = StopReason::kGradientTolerance;
      break;
    }
    if (iter >= config.max_iters) {
      state.reason = StopReason::kMaxIterations;
      break;
    }
    double step = previous_step > 0.0 ? 2.0 * previous_step
                  : config.initial_step > 0.0
                      ? config.initial_step
                      : 1.0 / (grad_norm + std::numeric_limits<double>::epsilon());
    const TangentPair direction = ev.grad.scaled(-1.0);
    const double slope = grad_norm * grad_norm;
    bool accepted = false;
    GrassmannPair candidate = x;
    Evaluation trial;
    for (int b = 0; b <= config.max_backtracks; ++b, step *= config.backtrack) {
      candidate = geodesic(x, direction, step);
      if (std::isfinite(config.gamma) &&
          pair_distance(candidate, x0).geodesic > config.gamma) {
        continue;
      }
      trial = evaluate(candidate, observed, state.rho, config.mu0, sum_sq_data,
                       false);
      if (trial.ftilde <= ev.ftilde - config.sufficient_decrease * step * slope) {
        accepted = true;
        break;
      }
    }
    if (!accepted) {
      state.reason = StopReason::kStalled;
      state.stalled = true;
      break;
    }
    x = candidate;
    ev = evaluate(x, observed, state.rho, config.mu0, sum_sq_data, true);
    state.degenerate = state.degenerate || ev.degenerate;
    grad_norm = ev.grad.norm();
    previous_step = step;
    ++iter;
    state.trace.push_back({iter, ev.f, ev.g, grad_norm,
                           pair_distance(x, x0).geodesic, step});
  }
  state.iterations = iter;
  state.f = ev.f;
  state.g = ev.g;
  state.ftilde = ev.ftilde;
  state.grad_norm = grad_norm;
  state.fit_residual = ev.fit_residual;
  return {x, ev.s, std::move(state)};
}

void write_trace_csv(std::ostream& out, const std::vector<TraceRow>& trace) {
  out << "iter,F,G,grad_norm,dist_to_x0,step\n";
  for (const TraceRow& row : trace) {
    out << row.iter << ',' << format_double(row.f) << ','
        << format_double(row.g) << ',' << format_double(row.grad_norm) << ','
        << format_double(row.dist_to_x0) << ',' << format_double(row.step)
        << '\n';
  }
}

}  // namespace mcomplete
