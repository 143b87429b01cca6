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
#include <sstream>
#include <stdexcept>

#include <Eigen/SVD>
#include <gtest/gtest.h>

#include "mcomplete/error.h"
#include "mcomplete/io.h"
#include "mcomplete/low_rank.h"
#include "mcomplete/rng.h"
#include "mcomplete/sparse.h"
#include "mcomplete/svd.h"
#include "test_support.h"

namespace mcomplete {
namespace {

using testing::gaussian;
using testing::random_sparse;

// Known-answer vectors of the Random123 reference implementation.
TEST(Philox, KnownAnswers) {
  using B = Philox4x32::Block;
  EXPECT_EQ(Philox4x32::block(B{0, 0, 0, 0}, {0, 0}),
            (B{0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8}));
  EXPECT_EQ(Philox4x32::block(B{0xffffffff, 0xffffffff, 0xffffffff, 0xffffffff},
                              {0xffffffff, 0xffffffff}),
            (B{0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd}));
  EXPECT_EQ(Philox4x32::block(B{0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344},
                              {0xa4093822, 0x299f31d0}),
            (B{0xd16cfe09, 0x94fdcceb, 0x5001e420, 0x24126ea1}));
}

TEST(Philox, StreamsAndSeedsAreReproducibleAndDistinct) {
  Philox4x32 a(42, 1), b(42, 1), c(42, 2), d(43, 1);
  for (int i = 0; i < 100; ++i) {
    const auto x = a();
    EXPECT_EQ(x, b());
    (void)c();
    (void)d();
  }
  EXPECT_NE(Philox4x32(42, 1).next_u64(), Philox4x32(42, 2).next_u64());
  EXPECT_NE(Philox4x32(42, 1).next_u64(), Philox4x32(43, 1).next_u64());
}

TEST(Philox, DistributionMoments) {
  Philox4x32 rng(9);
  const int n = 200000;
  double su = 0, sn = 0, sn2 = 0;
  for (int i = 0; i < n; ++i) {
    const double u = rng.uniform();
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
    su += u;
    const double z = rng.normal();
    sn += z;
    sn2 += z * z;
  }
  EXPECT_NEAR(su / n, 0.5, 5 * std::sqrt(1.0 / 12 / n));
  EXPECT_NEAR(sn / n, 0.0, 5 / std::sqrt(double(n)));
  EXPECT_NEAR(sn2 / n, 1.0, 5 * std::sqrt(2.0 / n));
  for (int i = 0; i < 1000; ++i) EXPECT_LT(rng.uniform_index(7), 7u);
}

TEST(Sparse, RejectsBadEntries) {
  EXPECT_THROW(SparseObserved(2, 2, {{2, 0, 1.0}}), std::invalid_argument);
  EXPECT_THROW(SparseObserved(2, 2, {{0, -1, 1.0}}), std::invalid_argument);
  EXPECT_THROW(SparseObserved(2, 2, {{0, 0, 1.0}, {0, 0, 2.0}}),
               std::invalid_argument);
  EXPECT_THROW(SparseObserved(0, 2, {}), std::invalid_argument);
}

TEST(Sparse, SortsEntriesAndCountsDegrees) {
  const SparseObserved a(3, 2, {{2, 1, 1.0}, {0, 1, 2.0}, {0, 0, 3.0}});
  EXPECT_EQ(a.size(), 3u);
  EXPECT_EQ(a.entries()[0], (Entry{0, 0, 3.0}));
  EXPECT_EQ(a.entries()[2], (Entry{2, 1, 1.0}));
  EXPECT_EQ(a.row_degrees(), (std::vector<int>{2, 0, 1}));
  EXPECT_EQ(a.col_degrees(), (std::vector<int>{1, 2}));
}

TEST(Spmv, IdentityPattern) {
  const SparseObserved a(2, 2, {{0, 0, 1.0}, {1, 1, 1.0}});
  const Vector y = spmv(a, Vector{{3.0, 4.0}});
  EXPECT_EQ(y, (Vector{{3.0, 4.0}}));
}

TEST(Spmv, EmptyIsZero) {
  const SparseObserved a(3, 2, {});
  EXPECT_EQ(spmv(a, Vector{{1.0, 2.0}}), Vector::Zero(3));
  EXPECT_EQ(spmv(a, Vector{{1.0, 2.0, 3.0}}, true), Vector::Zero(2));
}

TEST(Spmv, MatchesDenseMultiply) {
  Philox4x32 rng(3);
  const SparseObserved a = random_sparse(rng, 6, 4, 10);
  const DenseMatrix d = a.to_dense();
  const Vector v = gaussian(rng, 4, 1).col(0);
  const Vector w = gaussian(rng, 6, 1).col(0);
  EXPECT_LE((spmv(a, v) - d * v).cwiseAbs().maxCoeff(), 1e-14);
  EXPECT_LE((spmv(a, w, true) - d.transpose() * w).cwiseAbs().maxCoeff(), 1e-14);
  EXPECT_THROW(spmv(a, w), std::invalid_argument);
}

TEST(Spmv, ParallelProductsAreBitIdentical) {
  Philox4x32 rng(4);
  const SparseObserved a = random_sparse(rng, 300, 200, 9000);
  const DenseMatrix x = gaussian(rng, 200, 3);
  const DenseMatrix y = gaussian(rng, 300, 3);
  const DenseMatrix serial = a.apply(x);
  const DenseMatrix serial_t = a.apply_transpose(y);
  set_product_threads(4);
  const DenseMatrix parallel = a.apply(x);
  const DenseMatrix parallel_t = a.apply_transpose(y);
  set_product_threads(1);
  EXPECT_EQ(serial, parallel);
  EXPECT_EQ(serial_t, parallel_t);
}

TEST(TopSvd, DiagonalMatrix) {
  const SparseObserved a(3, 3, {{0, 0, 3.0}, {1, 1, 2.0}, {2, 2, 1.0}});
  const SvdTriplet s = top_r_svd(a, 2);
  ASSERT_EQ(s.rank(), 2);
  EXPECT_NEAR(s.values(0), 3.0, 1e-12);
  EXPECT_NEAR(s.values(1), 2.0, 1e-12);
  EXPECT_TRUE(s.converged);
}

TEST(TopSvd, RankOneNormProduct) {
  // u = (2, 0, 0) direction scaled so ||u|| = 2; v has ||v|| = 5.
  const Vector u{{0.0, 2.0, 0.0}};
  const Vector v{{3.0, 0.0, 4.0, 0.0}};
  std::vector<Entry> e;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 4; ++j)
      if (u(i) * v(j) != 0.0) e.push_back({i, j, u(i) * v(j)});
  const SvdTriplet s = top_r_svd(SparseObserved(3, 4, e), 1);
  EXPECT_NEAR(s.values(0), 10.0, 1e-12);
}

TEST(TopSvd, MatchesDenseOracle) {
  Philox4x32 rng(5);
  const SparseObserved a = random_sparse(rng, 50, 40, 600);
  const SvdTriplet s = top_r_svd(a, 5);
  const SvdTriplet d = dense_svd(a.to_dense());
  for (int i = 0; i < 5; ++i) EXPECT_NEAR(s.values(i), d.values(i), 1e-8);
  const DenseMatrix pl = s.left * s.left.transpose() -
                         d.left.leftCols(5) * d.left.leftCols(5).transpose();
  const DenseMatrix pr = s.right * s.right.transpose() -
                         d.right.leftCols(5) * d.right.leftCols(5).transpose();
  EXPECT_LE(pl.norm() / std::sqrt(2.0), 1e-6);
  EXPECT_LE(pr.norm() / std::sqrt(2.0), 1e-6);
}

TEST(TopSvd, InvariantsAndSignConvention) {
  Philox4x32 rng(6);
  const SparseObserved a = random_sparse(rng, 60, 30, 500);
  const SvdTriplet s = top_r_svd(a, 4);
  const DenseMatrix id = DenseMatrix::Identity(4, 4);
  EXPECT_LE((s.left.transpose() * s.left - id).norm(), 1e-10);
  EXPECT_LE((s.right.transpose() * s.right - id).norm(), 1e-10);
  for (int k = 0; k < 4; ++k) {
    if (k > 0) {
      EXPECT_GE(s.values(k - 1), s.values(k));
    }
    Eigen::Index at;
    s.left.col(k).cwiseAbs().maxCoeff(&at);
    EXPECT_GE(s.left(at, k), 0.0);
  }
  // Residual of the truncation is orthogonal to the retained subspaces.
  const DenseMatrix d = a.to_dense();
  const DenseMatrix resid =
      d - s.left * s.values.asDiagonal() * s.right.transpose();
  EXPECT_LE((s.left.transpose() * resid).norm(), 1e-8);
  EXPECT_LE((resid * s.right).norm(), 1e-8);
  // Same input and seed: identical bits.
  const SvdTriplet again = top_r_svd(a, 4);
  EXPECT_EQ(s.values, again.values);
  EXPECT_EQ(s.left, again.left);
}

TEST(TopSvd, RejectsBadRank) {
  const SparseObserved a(3, 2, {{0, 0, 1.0}});
  EXPECT_THROW(top_r_svd(a, 0), std::invalid_argument);
  EXPECT_THROW(top_r_svd(a, 3), std::invalid_argument);
}

TEST(TopSvd, ReportsNonConvergence) {
  Philox4x32 rng(7);
  const SparseObserved a = random_sparse(rng, 80, 80, 1500);
  SvdOptions opts;
  opts.max_iters = 1;
  opts.tol = 1e-15;
  const SvdTriplet s = top_r_svd(a, 3, opts);
  EXPECT_FALSE(s.converged);
  EXPECT_EQ(s.iterations, 1);
}

TEST(DenseSvd, SmallCases) {
  DenseMatrix one(1, 1);
  one << 7.0;
  EXPECT_NEAR(dense_svd(one).values(0), 7.0, 1e-15);
  Philox4x32 rng(8);
  const DenseMatrix q = testing::random_rotation(rng, 3);
  const SvdTriplet s = dense_svd(q);
  for (int i = 0; i < 3; ++i) EXPECT_NEAR(s.values(i), 1.0, 1e-12);
  const DenseMatrix a = gaussian(rng, 8, 5);
  const SvdTriplet t = dense_svd(a);
  EXPECT_LE((t.left * t.values.asDiagonal() * t.right.transpose() - a).norm(),
            1e-12 * a.norm());
  EXPECT_THROW(dense_svd(DenseMatrix::Zero(513, 513)), std::invalid_argument);
}

TEST(LowRank, FactoredDistanceMatchesDense) {
  Philox4x32 rng(10);
  for (int trial = 0; trial < 10; ++trial) {
    LowRankFactors a{std::sqrt(50.0) * orthonormal_basis(gaussian(rng, 50, 3)),
                     Vector{{3.0, 2.0, 1.0}},
                     std::sqrt(40.0) * orthonormal_basis(gaussian(rng, 40, 3))};
    LowRankFactors b{std::sqrt(50.0) * orthonormal_basis(gaussian(rng, 50, 2)),
                     Vector{{2.5, 0.5}},
                     std::sqrt(40.0) * orthonormal_basis(gaussian(rng, 40, 2))};
    const double dense = (a.dense() - b.dense()).norm();
    EXPECT_NEAR(factored_frobenius_distance(a, b), dense, 1e-12 * dense);
    EXPECT_NEAR(factored_frobenius_norm(a), a.dense().norm(), 1e-12 * dense);
    EXPECT_NEAR(factored_frobenius_distance(a, a), 0.0, 1e-12);
  }
}

TEST(LowRank, FromCoreAndValidate) {
  Philox4x32 rng(11);
  const DenseMatrix x = std::sqrt(30.0) * orthonormal_basis(gaussian(rng, 30, 2));
  const DenseMatrix y = std::sqrt(20.0) * orthonormal_basis(gaussian(rng, 20, 2));
  const DenseMatrix s = gaussian(rng, 2, 2);
  const LowRankFactors f = LowRankFactors::from_core(x, s, y);
  EXPECT_NO_THROW(f.validate());
  EXPECT_LE((f.dense() - x * s * y.transpose()).norm(), 1e-12 * f.dense().norm());
  LowRankFactors bad = f;
  bad.sigma = Vector{{1.0, 2.0}};
  EXPECT_THROW(bad.validate(), std::invalid_argument);
  bad = f;
  bad.u *= 2.0;
  EXPECT_THROW(bad.validate(), std::invalid_argument);
}

TEST(Io, MatrixMarketRoundTrip) {
  Philox4x32 rng(12);
  const SparseObserved a = random_sparse(rng, 7, 9, 20);
  std::stringstream ss;
  write_matrix_market(ss, a);
  EXPECT_EQ(ss.str().rfind("%%MatrixMarket matrix coordinate real general", 0), 0u);
  EXPECT_EQ(read_matrix_market(ss), a);
}

TEST(Io, MatrixMarketAcceptsCommentsAndIntegers) {
  std::stringstream ss(
      "%%MatrixMarket matrix coordinate integer general\n% note\n2 3 2\n1 1 4\n2 "
      "3 -1\n");
  const SparseObserved a = read_matrix_market(ss);
  EXPECT_EQ(a, SparseObserved(2, 3, {{0, 0, 4.0}, {1, 2, -1.0}}));
}

TEST(Io, MatrixMarketErrorsAreDataErrors) {
  const char* bad[] = {
      "",
      "%%MatrixMarket matrix array real general\n2 2\n1\n2\n3\n4\n",
      "%%MatrixMarket matrix coordinate real general\n2 2 2\n1 1 1.0\n",
      "%%MatrixMarket matrix coordinate real general\n2 2 1\n3 1 1.0\n",
      "%%MatrixMarket matrix coordinate real general\n2 2 1\n1 1 abc\n",
      "%%MatrixMarket matrix coordinate real general\n2 2 2\n1 1 1\n1 1 2\n",
      "%%MatrixMarket matrix coordinate complex general\n2 2 1\n1 1 1 0\n",
  };
  for (const char* text : bad) {
    std::stringstream ss(text);
    EXPECT_THROW(read_matrix_market(ss), DataError) << text;
  }
  EXPECT_THROW(read_matrix_market_file("/nonexistent/path.mtx"), DataError);
}

TEST(Io, DenseAndFactorsRoundTrip) {
  Philox4x32 rng(13);
  const DenseMatrix a = gaussian(rng, 4, 3);
  std::stringstream ss;
  write_dense(ss, a);
  EXPECT_EQ(read_dense(ss), a);
  const LowRankFactors f{std::sqrt(6.0) * orthonormal_basis(gaussian(rng, 6, 2)),
                         Vector{{2.0, 1.0}},
                         std::sqrt(5.0) * orthonormal_basis(gaussian(rng, 5, 2))};
  std::stringstream fs;
  write_factors(fs, f);
  const std::string text = fs.str();
  EXPECT_NE(text.find("U:"), std::string::npos);
  EXPECT_NE(text.find("sigma:"), std::string::npos);
  EXPECT_NE(text.find("V:"), std::string::npos);
  const LowRankFactors g = read_factors(fs);
  EXPECT_EQ(g.u, f.u);
  EXPECT_EQ(g.sigma, f.sigma);
  EXPECT_EQ(g.v, f.v);
  std::stringstream broken("U:\n1 2\n3\n");
  EXPECT_THROW(read_factors(broken), DataError);
}

TEST(Io, FormatDoubleRoundTrips) {
  Philox4x32 rng(14);
  for (int i = 0; i < 1000; ++i) {
    const double v = rng.normal() * std::pow(10.0, rng.uniform() * 40 - 20);
    EXPECT_EQ(std::stod(format_double(v)), v);
  }
  EXPECT_EQ(format_double(0.1), "0.1");
  EXPECT_EQ(format_double(1.0), "1");
}

}  // namespace
}  // namespace mcomplete
