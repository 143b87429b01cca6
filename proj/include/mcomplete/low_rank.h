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

#ifndef MCOMPLETE_LOW_RANK_H_
#define MCOMPLETE_LOW_RANK_H_

#include "mcomplete/sparse.h"

namespace mcomplete {

// A rank-r matrix U * diag(sigma) * V^T in the normalization
// U^T U = m * I, V^T V = n * I, sigma nonincreasing and nonnegative.
// Ground truth from random_low_rank() has strictly positive sigma;
// reconstructions may carry zeros.
struct LowRankFactors {
  DenseMatrix u;
  Vector sigma;
  DenseMatrix v;

  int rows() const { return static_cast<int>(u.rows()); }
  int cols() const { return static_cast<int>(v.rows()); }
  int rank() const { return static_cast<int>(sigma.size()); }
  // m / n.
  double aspect() const { return static_cast<double>(rows()) / cols(); }

  double entry(int i, int j) const {
    return (u.row(i).array() * sigma.transpose().array() * v.row(j).array())
        .sum();
  }
  DenseMatrix dense() const { return u * sigma.asDiagonal() * v.transpose(); }

  // Throws std::invalid_argument when shapes, normalization (to `tol`,
  // relative to m and n) or ordering are violated.
  void validate(double tol = 1e-10) const;

  // Repackages X * S * Y^T (X^T X = m I, Y^T Y = n I, S arbitrary r x r)
  // through the SVD of S.
  static LowRankFactors from_core(const DenseMatrix& x, const DenseMatrix& s,
                                  const DenseMatrix& y);
};

// ||A - B||_F from the factors alone, through r x r Gram products.
double factored_frobenius_distance(const LowRankFactors& a,
                                   const LowRankFactors& b);
// ||A||_F.
double factored_frobenius_norm(const LowRankFactors& a);

}  // namespace mcomplete

#endif  // MCOMPLETE_LOW_RANK_H_
