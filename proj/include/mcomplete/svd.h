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

#ifndef MCOMPLETE_SVD_H_
#define MCOMPLETE_SVD_H_

#include <cstdint>

#include "mcomplete/sparse.h"

namespace mcomplete {

// Leading singular triplets: left (m x k) and right (n x k) with orthonormal
// columns, singular values nonincreasing. Each left column has its
// largest-magnitude entry nonnegative (first such entry on ties), with the
// matching right column flipped along with it.
struct SvdTriplet {
  DenseMatrix left;
  Vector values;
  DenseMatrix right;
  int iterations = 0;
  bool converged = true;

  int rank() const { return static_cast<int>(values.size()); }
};

struct SvdOptions {
  int max_iters = 300;
  // Stop once every requested triplet has ||A v - sigma u|| <= tol * sigma_1.
  double tol = 1e-9;
  // Extra block columns; negative means min(5, min(m, n) - k).
  int oversampling = -1;
  // Seed of the Gaussian starting block.
  std::uint64_t seed = 0x5eed;
};

// Top-k singular triplets of `a` by block subspace iteration with
// Rayleigh-Ritz extraction. Every sweep costs two block products plus
// O((m + n) b^2) for re-orthonormalization, b = k + oversampling.
SvdTriplet top_singular_triplets(const LinearOperator& a, int k,
                                 const SvdOptions& options = {});

// Top-r singular triplets of the observed sparse matrix.
SvdTriplet top_r_svd(const SparseObserved& a, int r,
                     const SvdOptions& options = {});

// Full thin SVD of a small dense matrix (min(m, n) <= kDenseSvdLimit).
inline constexpr int kDenseSvdLimit = 512;
SvdTriplet dense_svd(const DenseMatrix& a);

// Applies the sign convention in place.
void canonicalize_signs(SvdTriplet* svd);

// Orthonormal basis of the columns of `a` (thin Householder QR).
DenseMatrix orthonormal_basis(const DenseMatrix& a);

}  // namespace mcomplete

#endif  // MCOMPLETE_SVD_H_
