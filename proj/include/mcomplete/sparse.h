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

#ifndef MCOMPLETE_SPARSE_H_
#define MCOMPLETE_SPARSE_H_

#include <memory>
#include <mutex>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace mcomplete {

using DenseMatrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// One revealed entry of the observed matrix (0-based indices).
struct Entry {
  int row = 0;
  int col = 0;
  double value = 0.0;

  friend bool operator==(const Entry&, const Entry&) = default;
};

// Abstract m x n operator that can be applied to blocks of vectors. The
// singular-triplet solver only needs products, so implicitly represented
// matrices (sparse, factored, differences of both) plug in directly.
class LinearOperator {
 public:
  virtual ~LinearOperator() = default;
  virtual int rows() const = 0;
  virtual int cols() const = 0;
  // A * x, x is cols() x k.
  virtual DenseMatrix apply(const DenseMatrix& x) const = 0;
  // A^T * y, y is rows() x k.
  virtual DenseMatrix apply_transpose(const DenseMatrix& y) const = 0;
};

// The revealed matrix M^E: an m x n matrix given by its coordinate list,
// zero everywhere else. Entries are kept sorted by (row, col) and are unique.
// Immutable; the row- and column-compressed forms used by products are built
// lazily on first use and shared between copies.
class SparseObserved final : public LinearOperator {
 public:
  SparseObserved(int rows, int cols, std::vector<Entry> entries);

  int rows() const override { return rows_; }
  int cols() const override { return cols_; }
  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }
  std::span<const Entry> entries() const { return entries_; }

  // Per-row and per-column counts of revealed entries.
  std::vector<int> row_degrees() const;
  std::vector<int> col_degrees() const;

  DenseMatrix apply(const DenseMatrix& x) const override;
  DenseMatrix apply_transpose(const DenseMatrix& y) const override;

  // Dense copy with zeros in unrevealed positions.
  DenseMatrix to_dense() const;
  // Same support, every value multiplied by `factor`.
  SparseObserved scaled(double factor) const;

  friend bool operator==(const SparseObserved& a, const SparseObserved& b) {
    return a.rows_ == b.rows_ && a.cols_ == b.cols_ &&
           a.entries_ == b.entries_;
  }

 private:
  struct Compressed {
    std::vector<int> row_ptr, row_col;
    std::vector<double> row_val;
    std::vector<int> col_ptr, col_row;
    std::vector<double> col_val;
  };
  struct Cache {
    std::once_flag once;
    Compressed compressed;
  };
  const Compressed& compressed() const;

  int rows_;
  int cols_;
  std::vector<Entry> entries_;
  std::shared_ptr<Cache> cache_;
};

// Sparse matrix-vector product a*v, or a^T*v when `transpose` is set.
Vector spmv(const SparseObserved& a, const Vector& v, bool transpose = false);

// Number of worker threads used by sparse block products. 1 (the default)
// is the bit-reproducible serial mode. Row partitions never change the
// summation order, so results stay identical in parallel mode as well.
void set_product_threads(int threads);
int product_threads();

}  // namespace mcomplete

#endif  // MCOMPLETE_SPARSE_H_
