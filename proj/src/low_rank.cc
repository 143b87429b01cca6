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

#include "mcomplete/low_rank.h"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <Eigen/QR>
#include <Eigen/SVD>

namespace mcomplete {

void LowRankFactors::validate(double tol) const {
  const int r = rank();
  if (u.cols() != r || v.cols() != r) {
    throw std::invalid_argument("LowRankFactors: factor widths differ from r");
  }
  if (r < 1 || rows() < r || cols() < r) {
    throw std::invalid_argument("LowRankFactors: invalid dimensions");
  }
  const DenseMatrix eye = DenseMatrix::Identity(r, r);
  const double du = (u.transpose() * u / rows() - eye).cwiseAbs().maxCoeff();
  const double dv = (v.transpose() * v / cols() - eye).cwiseAbs().maxCoeff();
  if (!(du <= tol) || !(dv <= tol)) {
    throw std::invalid_argument(
        "LowRankFactors: U^T U = m I or V^T V = n I violated");
  }
  for (int k = 0; k < r; ++k) {
    if (!(sigma(k) >= 0.0) || (k > 0 && sigma(k) > sigma(k - 1))) {
      throw std::invalid_argument(
          "LowRankFactors: sigma must be nonnegative and nonincreasing");
    }
  }
}

LowRankFactors LowRankFactors::from_core(const DenseMatrix& x,
                                         const DenseMatrix& s,
                                         const DenseMatrix& y) {
  Eigen::JacobiSVD<DenseMatrix> svd(s, Eigen::ComputeFullU | Eigen::ComputeFullV);
  LowRankFactors out;
  out.u = x * svd.matrixU();
  out.sigma = svd.singularValues();
  out.v = y * svd.matrixV();
  return out;
}

double factored_frobenius_norm(const LowRankFactors& a) {
  const DenseMatrix gu = a.u.transpose() * a.u;
  const DenseMatrix gv = a.v.transpose() * a.v;
  const DenseMatrix s = a.sigma.asDiagonal();
  return std::sqrt(std::max(0.0, (s * gu * s * gv).trace()));
}

double factored_frobenius_distance(const LowRankFactors& a,
                                   const LowRankFactors& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw std::invalid_argument("factored_frobenius_distance: shape mismatch");
  }
  // A B^T - C D^T = [A, -C] [B, D]^T = Q1 R1 R2^T Q2^T, so the norm is
  // ||R1 R2^T||_F with no cancellation between the two Gram terms.
  const int k = a.rank() + b.rank();
  DenseMatrix left(a.rows(), k), right(a.cols(), k);
  left << a.u * a.sigma.asDiagonal(), -(b.u * b.sigma.asDiagonal());
  right << a.v, b.v;
  const auto triangular = [k](const DenseMatrix& x) {
    Eigen::HouseholderQR<DenseMatrix> qr(x);
    const Eigen::Index rows = std::min<Eigen::Index>(x.rows(), k);
    return DenseMatrix(qr.matrixQR()
                           .topRows(rows)
                           .template triangularView<Eigen::Upper>());
  };
  return (triangular(left) * triangular(right).transpose()).norm();
}

}  // namespace mcomplete
