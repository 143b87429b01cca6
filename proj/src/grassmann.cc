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

#include "mcomplete/grassmann.h"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include "mcomplete/error.h"

namespace mcomplete {
namespace {

constexpr int kMaxRescalePasses = 50;

void check_same_shape(const Frame& a, const Frame& b) {
  if (a.rows() != b.rows() || a.rank() != b.rank()) {
    throw std::invalid_argument("Grassmann: frames have different shapes");
  }
}

DenseMatrix clip_rows(const DenseMatrix& a, double max_norm) {
  DenseMatrix out = a;
  for (Eigen::Index i = 0; i < out.rows(); ++i) {
    const double norm = out.row(i).norm();
    if (norm > max_norm) out.row(i) *= max_norm / norm;
  }
  return out;
}

}  // namespace

Frame::Frame(DenseMatrix a, double tol) : a_(std::move(a)) {
  const Eigen::Index n = a_.rows();
  const Eigen::Index r = a_.cols();
  if (r < 1 || n < r) {
    throw std::invalid_argument("Frame: need 1 <= r <= n");
  }
  const double err =
      (a_.transpose() * a_ / static_cast<double>(n) -
       DenseMatrix::Identity(r, r))
          .cwiseAbs()
          .maxCoeff();
  if (!(err <= tol)) {
    throw std::invalid_argument("Frame: A^T A = n I violated by " +
                                std::to_string(err));
  }
}

Frame Frame::orthonormalize(const DenseMatrix& a) {
  const double n = static_cast<double>(a.rows());
  const Eigen::SelfAdjointEigenSolver<DenseMatrix> eig(a.transpose() * a / n);
  const Vector& lambda = eig.eigenvalues();
  if (!(lambda.minCoeff() > 1e-12 * lambda.maxCoeff()) ||
      !(lambda.maxCoeff() > 0.0)) {
    throw NumericalError("Frame::orthonormalize: rank-deficient matrix");
  }
  const DenseMatrix inv_sqrt = eig.eigenvectors() *
                               lambda.cwiseSqrt().cwiseInverse().asDiagonal() *
                               eig.eigenvectors().transpose();
  return Frame(a * inv_sqrt, 1e-8);
}

bool Frame::in_ball(double mu) const {
  return max_row_norm_sq() <= mu * rank();
}

double TangentPair::norm() const { return std::sqrt(squared_norm()); }

Vector principal_angles(const Frame& x1, const Frame& x2) {
  check_same_shape(x1, x2);
  const double n = x1.rows();
  const int r = x1.rank();
  const DenseMatrix cross = x1.matrix().transpose() * x2.matrix() / n;
  const Vector cosines = Eigen::JacobiSVD<DenseMatrix>(cross).singularValues();
  const DenseMatrix orthogonal =
      (x2.matrix() - x1.matrix() * cross) / std::sqrt(n);
  Vector sines = Eigen::JacobiSVD<DenseMatrix>(orthogonal).singularValues();
  std::sort(sines.data(), sines.data() + sines.size());
  Vector theta(r);
  for (int i = 0; i < r; ++i) {
    const double c = std::clamp(cosines(i), 0.0, 1.0);
    const double s = std::clamp(sines(i), 0.0, 1.0);
    theta(i) = c * c >= 0.5 ? std::asin(s) : std::acos(c);
  }
  std::sort(theta.data(), theta.data() + r);
  return theta;
}

Distances distances(const Frame& x1, const Frame& x2) {
  const Vector theta = principal_angles(x1, x2);
  Distances d;
  d.geodesic = theta.norm();
  d.chordal = (2.0 * (theta.array() / 2.0).sin()).matrix().norm();
  d.projection = theta.array().sin().matrix().norm();
  return d;
}

Distances pair_distance(const GrassmannPair& p1, const GrassmannPair& p2) {
  const Distances dx = distances(p1.x, p2.x);
  const Distances dy = distances(p1.y, p2.y);
  return {std::hypot(dx.geodesic, dy.geodesic),
          std::hypot(dx.chordal, dy.chordal),
          std::hypot(dx.projection, dy.projection)};
}

double tangent_violation(const Frame& base, const DenseMatrix& w) {
  const double norm = w.norm();
  if (norm == 0.0) return 0.0;
  return (base.matrix().transpose() * w).norm() /
         (std::sqrt(static_cast<double>(base.rows())) * norm);
}

DenseMatrix project_tangent(const Frame& base, const DenseMatrix& w) {
  const DenseMatrix& x = base.matrix();
  return w - x * (x.transpose() * w) / static_cast<double>(base.rows());
}

Frame geodesic(const Frame& base, const DenseMatrix& w, double t) {
  if (w.rows() != base.rows() || w.cols() != base.rank()) {
    throw std::invalid_argument("geodesic: tangent has the wrong shape");
  }
  if (tangent_violation(base, w) > kTangentTolerance) {
    throw std::invalid_argument("geodesic: direction is not tangent");
  }
  if (t == 0.0 || w.norm() == 0.0) return base;
  const double root_m = std::sqrt(static_cast<double>(base.rows()));
  const DenseMatrix tangent = project_tangent(base, w);
  Eigen::JacobiSVD<DenseMatrix> svd(tangent,
                                    Eigen::ComputeThinU | Eigen::ComputeThinV);
  const DenseMatrix& right = svd.matrixV();
  const Vector angle = svd.singularValues() * (t / root_m);
  const DenseMatrix moved =
      base.matrix() * right * angle.array().cos().matrix().asDiagonal() *
          right.transpose() +
      svd.matrixU() * root_m * angle.array().sin().matrix().asDiagonal() *
          right.transpose();
  return Frame::orthonormalize(moved);
}

GrassmannPair geodesic(const GrassmannPair& base, const TangentPair& w,
                       double t) {
  return {geodesic(base.x, w.w, t), geodesic(base.y, w.z, t)};
}

Frame rescale_incoherent(const Frame& x, double mu0) {
  if (!(mu0 > 0.0)) {
    throw std::invalid_argument("rescale_incoherent: mu0 must be positive");
  }
  const double r = x.rank();
  const double radius = std::sqrt(mu0 * r);
  const double limit = 3.0 * mu0 * r * (1.0 + 1e-12);
  DenseMatrix clipped = clip_rows(x.matrix(), radius);
  for (int pass = 0; pass < kMaxRescalePasses; ++pass) {
    Frame out = Frame::orthonormalize(clipped);
    if (out.max_row_norm_sq() <= limit) return out;
    clipped = clip_rows(out.matrix(), radius);
  }
  throw NumericalError(
      "rescale_incoherent: could not reach squared row norms <= 3 mu0 r");
}

GapBound subspace_gap_bound(const LowRankFactors& truth,
                            const LowRankFactors& approx) {
  if (truth.rows() != approx.rows() || truth.cols() != approx.cols() ||
      truth.rank() != approx.rank()) {
    throw std::invalid_argument("subspace_gap_bound: shape mismatch");
  }
  const double sigma_min = truth.sigma.minCoeff();
  if (!(sigma_min > 0.0)) {
    throw std::invalid_argument("subspace_gap_bound: Sigma_min must be > 0");
  }
  GapBound g;
  g.projection_u =
      distances(Frame(truth.u, 1e-8), Frame(approx.u, 1e-8)).projection;
  g.projection_v =
      distances(Frame(truth.v, 1e-8), Frame(approx.v, 1e-8)).projection;
  const double n = truth.cols();
  const double alpha = truth.aspect();
  const double error = factored_frobenius_distance(truth, approx);
  g.bound = error / (std::sqrt(alpha) * n * sigma_min);
  g.symmetric_bound = g.bound / std::sqrt(2.0);
  constexpr double kSlack = 1e-12;
  g.holds = std::max(g.projection_u, g.projection_v) <= g.bound + kSlack;
  g.holds_symmetric =
      std::max(g.projection_u, g.projection_v) <= g.symmetric_bound + kSlack;
  return g;
}

}  // namespace mcomplete
