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

#include "mcomplete/svd.h"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include <Eigen/QR>
#include <Eigen/SVD>

#include "mcomplete/rng.h"

namespace mcomplete {

DenseMatrix orthonormal_basis(const DenseMatrix& a) {
  Eigen::HouseholderQR<DenseMatrix> qr(a);
  return qr.householderQ() * DenseMatrix::Identity(a.rows(), a.cols());
}

void canonicalize_signs(SvdTriplet* svd) {
  for (int i = 0; i < svd->left.cols(); ++i) {
    Eigen::Index arg = 0;
    svd->left.col(i).cwiseAbs().maxCoeff(&arg);
    if (svd->left(arg, i) < 0.0) {
      svd->left.col(i) *= -1.0;
      svd->right.col(i) *= -1.0;
    }
  }
}

SvdTriplet top_singular_triplets(const LinearOperator& a, int k,
                                 const SvdOptions& options) {
  const int m = a.rows();
  const int n = a.cols();
  const int small = std::min(m, n);
  if (k < 1 || k > small) {
    throw std::invalid_argument("top_singular_triplets: k = " +
                                std::to_string(k) + " outside [1, " +
                                std::to_string(small) + "]");
  }
  if (options.max_iters < 1) {
    throw std::invalid_argument("top_singular_triplets: max_iters < 1");
  }
  const int extra = options.oversampling < 0
                        ? std::min(5, small - k)
                        : std::min(options.oversampling, small - k);
  const int block = k + extra;

  Philox4x32 rng(options.seed);
  DenseMatrix start(n, block);
  for (int j = 0; j < block; ++j)
    for (int i = 0; i < n; ++i) start(i, j) = rng.normal();
  DenseMatrix right = orthonormal_basis(start);

  SvdTriplet out;
  out.converged = false;
  for (int sweep = 1; sweep <= options.max_iters; ++sweep) {
    const DenseMatrix av = a.apply(right);
    if (sweep > 1) {
      // A^T u_i = sigma_i v_i holds exactly after Rayleigh-Ritz, so the
      // residual of A v_i is the whole story.
      const DenseMatrix resid =
          av.leftCols(k) - out.left.leftCols(k) * out.values.head(k).asDiagonal();
      const double worst = resid.colwise().norm().maxCoeff();
      if (worst <= options.tol * out.values(0)) {
        out.converged = true;
        break;
      }
    }
    const DenseMatrix left_basis = orthonormal_basis(av);
    // Rayleigh-Ritz on span(left_basis): left_basis^T A = z^T.
    const DenseMatrix z = a.apply_transpose(left_basis);
    Eigen::HouseholderQR<DenseMatrix> qr(z);
    const DenseMatrix q = qr.householderQ() * DenseMatrix::Identity(n, block);
    const DenseMatrix r_factor =
        qr.matrixQR().topRows(block).triangularView<Eigen::Upper>();
    Eigen::JacobiSVD<DenseMatrix> small_svd(
        r_factor, Eigen::ComputeFullU | Eigen::ComputeFullV);
    // z = q * U_s * S * V_s^T  =>  A ~= left_basis * V_s * S * (q * U_s)^T.
    right = q * small_svd.matrixU();
    out.values = small_svd.singularValues();
    out.left = left_basis * small_svd.matrixV();
    out.right = right;
    out.iterations = sweep;
    if (out.values(0) == 0.0) {
      out.converged = true;
      break;
    }
  }
  out.values.conservativeResize(k);
  out.left.conservativeResize(Eigen::NoChange, k);
  out.right.conservativeResize(Eigen::NoChange, k);
  canonicalize_signs(&out);
  return out;
}

SvdTriplet top_r_svd(const SparseObserved& a, int r,
                     const SvdOptions& options) {
  return top_singular_triplets(a, r, options);
}

SvdTriplet dense_svd(const DenseMatrix& a) {
  const Eigen::Index small = std::min(a.rows(), a.cols());
  if (small < 1) throw std::invalid_argument("dense_svd: empty matrix");
  if (small > kDenseSvdLimit) {
    throw std::invalid_argument("dense_svd: min(m, n) = " +
                                std::to_string(small) + " exceeds " +
                                std::to_string(kDenseSvdLimit));
  }
  Eigen::JacobiSVD<DenseMatrix> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
  SvdTriplet out;
  out.left = svd.matrixU();
  out.values = svd.singularValues();
  out.right = svd.matrixV();
  out.iterations = 0;
  out.converged = true;
  canonicalize_signs(&out);
  return out;
}

}  // namespace mcomplete
