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

#include <cmath>
#include <numbers>
#include <stdexcept>

#include <gtest/gtest.h>

#include "mcomplete/error.h"
#include "mcomplete/grassmann.h"
#include "mcomplete/sampling.h"
#include "test_support.h"

namespace mcomplete {
namespace {

using testing::gaussian;
using testing::random_frame;
using testing::random_rotation;
using testing::random_tangent;

constexpr double kPi = std::numbers::pi;

// Matrix-norm definitions of the chordal and projection distances.
double chordal_oracle(const Frame& a, const Frame& b) {
  Eigen::JacobiSVD<DenseMatrix> svd(a.matrix().transpose() * b.matrix(),
                                    Eigen::ComputeFullU | Eigen::ComputeFullV);
  const DenseMatrix q = svd.matrixU() * svd.matrixV().transpose();
  return (a.matrix() * q - b.matrix()).norm() / std::sqrt(double(a.rows()));
}

double projection_oracle(const Frame& a, const Frame& b) {
  const DenseMatrix d = a.matrix() * a.matrix().transpose() -
                        b.matrix() * b.matrix().transpose();
  return d.norm() / (std::sqrt(2.0) * a.rows());
}

TEST(Frame, ValidatesNormalization) {
  EXPECT_THROW(Frame(2.0 * DenseMatrix::Ones(4, 1)), std::invalid_argument);
  EXPECT_NO_THROW(Frame(DenseMatrix::Ones(4, 1)));
  EXPECT_NO_THROW(Frame((1 + 1e-9) * DenseMatrix::Ones(4, 1), 1e-8));
}

TEST(Frame, OrthonormalizeRestoresNormalization) {
  Philox4x32 rng(1);
  const Frame f = Frame::orthonormalize(gaussian(rng, 20, 3));
  EXPECT_LE((f.matrix().transpose() * f.matrix() / 20.0 -
             DenseMatrix::Identity(3, 3))
                .cwiseAbs()
                .maxCoeff(),
            1e-12);
  DenseMatrix deficient = gaussian(rng, 20, 2);
  deficient.col(1) = deficient.col(0);
  EXPECT_THROW(Frame::orthonormalize(deficient), NumericalError);
}

TEST(PrincipalAngles, IdentityRotationAndOrthogonalLines) {
  Philox4x32 rng(2);
  const Frame x = random_frame(rng, 30, 3);
  EXPECT_LE(principal_angles(x, x).cwiseAbs().maxCoeff(), 1e-12);
  const Frame xq(x.matrix() * random_rotation(rng, 3), 1e-9);
  EXPECT_LE(principal_angles(x, xq).cwiseAbs().maxCoeff(), 1e-7);
  EXPECT_LE(distances(x, xq).projection, 1e-12);

  DenseMatrix e1 = DenseMatrix::Zero(2, 1), e2 = DenseMatrix::Zero(2, 1);
  e1(0, 0) = std::sqrt(2.0);
  e2(1, 0) = std::sqrt(2.0);
  const Vector theta = principal_angles(Frame(e1), Frame(e2));
  ASSERT_EQ(theta.size(), 1);
  EXPECT_NEAR(theta(0), kPi / 2, 1e-15);
  const Distances d = distances(Frame(e1), Frame(e2));
  EXPECT_NEAR(d.geodesic, kPi / 2, 1e-15);
  EXPECT_NEAR(d.chordal, std::sqrt(2.0), 1e-15);
  EXPECT_NEAR(d.projection, 1.0, 1e-15);
  const Distances zero = distances(Frame(e1), Frame(e1));
  EXPECT_NEAR(zero.geodesic + zero.chordal + zero.projection, 0.0, 1e-12);
}

TEST(PrincipalAngles, SortedAscendingAndMatchNaiveForm) {
  Philox4x32 rng(3);
  for (int trial = 0; trial < 50; ++trial) {
    const Frame a = random_frame(rng, 12, 3), b = random_frame(rng, 12, 3);
    const Vector t = principal_angles(a, b);
    for (int i = 1; i < t.size(); ++i) EXPECT_LE(t(i - 1), t(i));
    EXPECT_LE((t - testing::naive_angles(a, b)).cwiseAbs().maxCoeff(), 1e-7);
  }
  EXPECT_THROW(principal_angles(random_frame(rng, 12, 3), random_frame(rng, 10, 3)),
               std::invalid_argument);
}

TEST(Distances, MatchMatrixNormDefinitions) {
  Philox4x32 rng(4);
  for (int r : {1, 2, 5}) {
    for (int trial = 0; trial < 50; ++trial) {
      const Frame a = random_frame(rng, 15, r), b = random_frame(rng, 15, r);
      const Distances d = distances(a, b);
      EXPECT_NEAR(d.chordal, chordal_oracle(a, b), 1e-8);
      EXPECT_NEAR(d.projection, projection_oracle(a, b), 1e-8);
    }
  }
}

TEST(Distances, EquivalenceChainAndRotationInvariance) {
  Philox4x32 rng(5);
  for (int r : {1, 2, 5}) {
    for (int trial = 0; trial < 200; ++trial) {
      const Frame a = random_frame(rng, 10, r), b = random_frame(rng, 10, r);
      const Distances d = distances(a, b);
      constexpr double s = 1e-10;
      EXPECT_LE(d.geodesic / kPi, d.chordal / std::sqrt(2.0) + s);
      EXPECT_LE(d.chordal / std::sqrt(2.0), d.projection + s);
      EXPECT_LE(d.projection, d.chordal + s);
      EXPECT_LE(d.chordal, d.geodesic + s);
      const Frame aq(a.matrix() * random_rotation(rng, r), 1e-9);
      const Distances dq = distances(aq, b);
      EXPECT_NEAR(dq.geodesic, d.geodesic, 1e-10);
      EXPECT_NEAR(dq.chordal, d.chordal, 1e-10);
      EXPECT_NEAR(dq.projection, d.projection, 1e-10);
    }
  }
}

TEST(PairDistance, Pythagorean) {
  Philox4x32 rng(6);
  const GrassmannPair p{random_frame(rng, 20, 2), random_frame(rng, 15, 2)};
  const GrassmannPair q{random_frame(rng, 20, 2), random_frame(rng, 15, 2)};
  EXPECT_NEAR(pair_distance(p, p).geodesic, 0.0, 1e-12);
  const Distances dx = distances(p.x, q.x), dy = distances(p.y, q.y);
  const Distances d = pair_distance(p, q);
  EXPECT_NEAR(d.geodesic * d.geodesic,
              dx.geodesic * dx.geodesic + dy.geodesic * dy.geodesic, 1e-12);
  EXPECT_NEAR(d.chordal * d.chordal,
              dx.chordal * dx.chordal + dy.chordal * dy.chordal, 1e-12);
  const GrassmannPair half{p.x, q.y};
  EXPECT_NEAR(pair_distance(p, half).geodesic, dy.geodesic, 1e-12);
}

TEST(Tangent, ProjectionAndViolation) {
  Philox4x32 rng(7);
  const Frame x = random_frame(rng, 25, 3);
  const DenseMatrix w = random_tangent(rng, x);
  EXPECT_LE(tangent_violation(x, w), 1e-14);
  EXPECT_LE((x.matrix().transpose() * w).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_EQ(tangent_violation(x, DenseMatrix::Zero(25, 3)), 0.0);
  EXPECT_GT(tangent_violation(x, x.matrix()), 0.5);
}

TEST(Geodesic, EndpointsAndZeroDirection) {
  Philox4x32 rng(8);
  const Frame x = random_frame(rng, 25, 3);
  const DenseMatrix w = random_tangent(rng, x);
  EXPECT_LE((geodesic(x, w, 0.0).matrix() - x.matrix()).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_LE((geodesic(x, DenseMatrix::Zero(25, 3), 3.0).matrix() - x.matrix())
                .cwiseAbs()
                .maxCoeff(),
            1e-12);
  EXPECT_THROW(geodesic(x, x.matrix(), 0.1), std::invalid_argument);
  // Drift below the tolerance is projected out.
  const DenseMatrix drift = w + 1e-10 * x.matrix();
  EXPECT_LE((geodesic(x, drift, 0.3).matrix() - geodesic(x, w, 0.3).matrix())
                .cwiseAbs()
                .maxCoeff(),
            1e-8);
}

TEST(Geodesic, ArcLengthMatchesPrincipalAngles) {
  Philox4x32 rng(9);
  for (int trial = 0; trial < 30; ++trial) {
    const int m = 30, r = 1 + trial % 4;
    const Frame x = random_frame(rng, m, r);
    const DenseMatrix w = random_tangent(rng, x);
    Eigen::JacobiSVD<DenseMatrix> svd(w);
    Vector theta_w = svd.singularValues() / std::sqrt(double(m));
    std::sort(theta_w.data(), theta_w.data() + theta_w.size());
    const double t = (kPi / 2) / theta_w.maxCoeff() * rng.uniform();
    const Frame xt = geodesic(x, w, t);
    EXPECT_LE((xt.matrix().transpose() * xt.matrix() / m -
               DenseMatrix::Identity(r, r))
                  .cwiseAbs()
                  .maxCoeff(),
              1e-8);
    EXPECT_LE((principal_angles(xt, x) - t * theta_w).cwiseAbs().maxCoeff(), 1e-8);
  }
}

TEST(RescaleIncoherent, NoOpOnBoundedFrames) {
  Philox4x32 rng(10);
  const Frame x = random_frame(rng, 40, 2);
  const double mu0 = x.max_row_norm_sq() / 2.0;
  EXPECT_TRUE(x.in_ball(mu0));
  const Frame y = rescale_incoherent(x, mu0);
  EXPECT_LE(distances(x, y).projection, 1e-10);
}

TEST(RescaleIncoherent, SpikeFrameEndsInLargerBall) {
  Philox4x32 rng(11);
  DenseMatrix a = gaussian(rng, 50, 2);
  a.row(0) *= 40.0;
  const Frame spike = Frame::orthonormalize(a);
  const double mu0 = 1.0;
  ASSERT_FALSE(spike.in_ball(3 * mu0));
  const Frame out = rescale_incoherent(spike, mu0);
  EXPECT_LE(out.max_row_norm_sq(), 3.0 * mu0 * 2 * (1 + 1e-12));
  EXPECT_THROW(rescale_incoherent(spike, 0.0), std::invalid_argument);
}

TEST(RescaleIncoherent, StaysCloseToIncoherentTruth) {
  Philox4x32 rng(12);
  for (int trial = 0; trial < 20; ++trial) {
    const Frame u = random_frame(rng, 200, 3);
    const double mu0 = u.max_row_norm_sq() / 3.0;
    const DenseMatrix w = random_tangent(rng, u);
    const double delta = rng.uniform() / 16.0;
    Eigen::JacobiSVD<DenseMatrix> svd(w);
    const double speed = svd.singularValues().norm() / std::sqrt(200.0);
    const Frame x = geodesic(u, w, delta / speed);
    ASSERT_NEAR(distances(x, u).geodesic, delta, 1e-8);
    const Frame out = rescale_incoherent(x, mu0);
    EXPECT_TRUE(out.in_ball(3 * mu0 * (1 + 1e-12)));
    EXPECT_LE(distances(out, u).geodesic, 4 * delta + 1e-12);
  }
}

TEST(GapBound, ZeroAtTruthAndHoldsUnderRotation) {
  const LowRankFactors f = random_low_rank(60, 50, 2, {2.0, 1.0}, 13);
  const GapBound same = subspace_gap_bound(f, f);
  EXPECT_LE(same.projection_u + same.projection_v + same.bound, 1e-12);
  // Rotate the right factor by a small angle in the plane of v_1 and a
  // vector orthogonal to V.
  Philox4x32 rng(14);
  const Frame v(f.v, 1e-9);
  DenseMatrix w = DenseMatrix::Zero(50, 2);
  w.col(0) = random_tangent(rng, v).col(0);
  const LowRankFactors g{f.u, f.sigma, geodesic(v, w, 1e-2 / w.norm()).matrix()};
  const GapBound b = subspace_gap_bound(f, g);
  EXPECT_GT(b.projection_v, 0.0);
  EXPECT_LE(b.projection_u, 1e-10);
  EXPECT_TRUE(b.holds);
  EXPECT_NEAR(b.symmetric_bound, b.bound / std::sqrt(2.0), 1e-15);
  const LowRankFactors zero{f.u, Vector{{1.0, 0.0}}, f.v};
  EXPECT_THROW(subspace_gap_bound(zero, f), std::invalid_argument);
}

}  // namespace
}  // namespace mcomplete
