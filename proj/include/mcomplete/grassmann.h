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

#ifndef MCOMPLETE_GRASSMANN_H_
#define MCOMPLETE_GRASSMANN_H_

#include "mcomplete/low_rank.h"
#include "mcomplete/sparse.h"

namespace mcomplete {

// Representative A (n x r, A^T A = n I) of the subspace [A] = {A Q}.
class Frame {
 public:
  // Throws std::invalid_argument if max |A^T A / n - I| > tol.
  explicit Frame(DenseMatrix a, double tol = 1e-10);

  // Symmetric re-orthonormalization a (a^T a / n)^{-1/2}; throws
  // NumericalError when `a` is numerically rank deficient.
  static Frame orthonormalize(const DenseMatrix& a);

  const DenseMatrix& matrix() const { return a_; }
  int rows() const { return static_cast<int>(a_.rows()); }
  int rank() const { return static_cast<int>(a_.cols()); }
  // Largest squared row norm.
  double max_row_norm_sq() const { return a_.rowwise().squaredNorm().maxCoeff(); }
  // Membership in K(mu): every squared row norm <= mu * r.
  bool in_ball(double mu) const;

 private:
  DenseMatrix a_;
};

// A point (X, Y) of G(m, r) x G(n, r).
struct GrassmannPair {
  Frame x;
  Frame y;
};

// Tangent vector (W, Z) at some pair, W^T X = 0 and Z^T Y = 0.
struct TangentPair {
  DenseMatrix w;
  DenseMatrix z;

  double squared_norm() const { return w.squaredNorm() + z.squaredNorm(); }
  double norm() const;
  double dot(const TangentPair& other) const {
    return (w.array() * other.w.array()).sum() +
           (z.array() * other.z.array()).sum();
  }
  TangentPair scaled(double factor) const { return {w * factor, z * factor}; }
};

struct Distances {
  double geodesic = 0.0;    // ||theta||
  double chordal = 0.0;     // ||2 sin(theta / 2)||
  double projection = 0.0;  // ||sin theta||
};

// Principal angles in [0, pi/2], ascending. Small angles come from the sines
// (singular values of the component of x2 orthogonal to x1) and large ones
// from the cosines, so neither end loses precision.
Vector principal_angles(const Frame& x1, const Frame& x2);

Distances distances(const Frame& x1, const Frame& x2);
Distances pair_distance(const GrassmannPair& p1, const GrassmannPair& p2);

// Largest allowed |X^T W| relative to sqrt(m) ||W||.
inline constexpr double kTangentTolerance = 1e-8;

// Relative tangency violation ||X^T W||_F / (sqrt(m) ||W||_F); 0 for W = 0.
double tangent_violation(const Frame& base, const DenseMatrix& w);
// W - X (X^T W) / m.
DenseMatrix project_tangent(const Frame& base, const DenseMatrix& w);

// X(t) = X R cos(Theta t) R^T + L sin(Theta t) R^T for W = L Theta R^T with
// L^T L = m I. Throws std::invalid_argument when W is not tangent within
// kTangentTolerance; smaller drift is projected out first.
Frame geodesic(const Frame& base, const DenseMatrix& w, double t);
GrassmannPair geodesic(const GrassmannPair& base, const TangentPair& w,
                       double t);

// Clips every row to norm sqrt(mu0 r) and restores the frame normalization
// with the symmetric factor (X'^T X' / n)^{-1/2}. Repeats the pair of steps
// until every squared row norm is at most 3 mu0 r (one pass suffices near an
// incoherent subspace). Throws NumericalError on a rank-deficient clip or if
// the bound cannot be met.
Frame rescale_incoherent(const Frame& x, double mu0);

// Projection distances of the approximate factors to the true ones, and the
// scale ||M - M_hat||_F / (sqrt(alpha) n Sigma_min) that bounds both of them.
// `symmetric_bound` is that scale divided by sqrt(2); it is typically met
// when the error is spread over both factors, but is not guaranteed.
struct GapBound {
  double projection_u = 0.0;
  double projection_v = 0.0;
  double bound = 0.0;
  double symmetric_bound = 0.0;
  bool holds = true;            // both distances <= bound
  bool holds_symmetric = true;  // both distances <= symmetric_bound

  friend bool operator==(const GapBound&, const GapBound&) = default;
};
GapBound subspace_gap_bound(const LowRankFactors& truth,
                            const LowRankFactors& approx);

}  // namespace mcomplete

#endif  // MCOMPLETE_GRASSMANN_H_
