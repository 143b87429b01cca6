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

#include "mcomplete/sparse.h"

#include <algorithm>
#include <atomic>
#include <stdexcept>
#include <string>
#include <thread>

namespace mcomplete {
namespace {

std::atomic<int> g_product_threads{1};

using RowMajorMatrix =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// out.row(i) = sum_k val[k] * x.row(idx[k]) over the compressed row i.
void compressed_product(const std::vector<int>& ptr,
                        const std::vector<int>& idx,
                        const std::vector<double>& val,
                        const RowMajorMatrix& x, RowMajorMatrix* out) {
  const int n_out = static_cast<int>(ptr.size()) - 1;
  const int width = static_cast<int>(x.cols());
  auto work = [&](int begin, int end) {
    for (int i = begin; i < end; ++i) {
      double* dst = out->row(i).data();
      for (int k = ptr[i]; k < ptr[i + 1]; ++k) {
        const double* src = x.row(idx[k]).data();
        const double v = val[k];
        for (int c = 0; c < width; ++c) dst[c] += v * src[c];
      }
    }
  };
  const int threads = std::min(g_product_threads.load(), std::max(1, n_out));
  if (threads <= 1 || ptr.back() < 4096) {
    work(0, n_out);
    return;
  }
  std::vector<std::thread> pool;
  const int chunk = (n_out + threads - 1) / threads;
  for (int t = 0; t < threads; ++t) {
    const int begin = t * chunk;
    const int end = std::min(n_out, begin + chunk);
    if (begin >= end) break;
    pool.emplace_back(work, begin, end);
  }
  for (auto& th : pool) th.join();
}

}  // namespace

void set_product_threads(int threads) {
  g_product_threads.store(std::max(1, threads));
}

int product_threads() { return g_product_threads.load(); }

SparseObserved::SparseObserved(int rows, int cols, std::vector<Entry> entries)
    : rows_(rows),
      cols_(cols),
      entries_(std::move(entries)),
      cache_(std::make_shared<Cache>()) {
  if (rows <= 0 || cols <= 0) {
    throw std::invalid_argument("SparseObserved: dimensions must be positive");
  }
  for (const Entry& e : entries_) {
    if (e.row < 0 || e.row >= rows || e.col < 0 || e.col >= cols) {
      throw std::invalid_argument(
          "SparseObserved: entry (" + std::to_string(e.row) + ", " +
          std::to_string(e.col) + ") out of range");
    }
  }
  std::sort(entries_.begin(), entries_.end(),
            [](const Entry& a, const Entry& b) {
              return a.row != b.row ? a.row < b.row : a.col < b.col;
            });
  for (std::size_t k = 1; k < entries_.size(); ++k) {
    if (entries_[k].row == entries_[k - 1].row &&
        entries_[k].col == entries_[k - 1].col) {
      throw std::invalid_argument(
          "SparseObserved: duplicate entry (" +
          std::to_string(entries_[k].row) + ", " +
          std::to_string(entries_[k].col) + ")");
    }
  }
}

const SparseObserved::Compressed& SparseObserved::compressed() const {
  std::call_once(cache_->once, [this] {
    Compressed& c = cache_->compressed;
    const std::size_t nnz = entries_.size();
    c.row_ptr.assign(rows_ + 1, 0);
    c.col_ptr.assign(cols_ + 1, 0);
    for (const Entry& e : entries_) {
      ++c.row_ptr[e.row + 1];
      ++c.col_ptr[e.col + 1];
    }
    for (int i = 0; i < rows_; ++i) c.row_ptr[i + 1] += c.row_ptr[i];
    for (int j = 0; j < cols_; ++j) c.col_ptr[j + 1] += c.col_ptr[j];
    // Entries are sorted by (row, col), so the row form is the entry order.
    c.row_col.resize(nnz);
    c.row_val.resize(nnz);
    for (std::size_t k = 0; k < nnz; ++k) {
      c.row_col[k] = entries_[k].col;
      c.row_val[k] = entries_[k].value;
    }
    c.col_row.resize(nnz);
    c.col_val.resize(nnz);
    std::vector<int> fill(c.col_ptr.begin(), c.col_ptr.end() - 1);
    for (const Entry& e : entries_) {
      const int slot = fill[e.col]++;
      c.col_row[slot] = e.row;
      c.col_val[slot] = e.value;
    }
  });
  return cache_->compressed;
}

std::vector<int> SparseObserved::row_degrees() const {
  std::vector<int> deg(rows_, 0);
  for (const Entry& e : entries_) ++deg[e.row];
  return deg;
}

std::vector<int> SparseObserved::col_degrees() const {
  std::vector<int> deg(cols_, 0);
  for (const Entry& e : entries_) ++deg[e.col];
  return deg;
}

DenseMatrix SparseObserved::apply(const DenseMatrix& x) const {
  if (x.rows() != cols_) {
    throw std::invalid_argument("SparseObserved::apply: dimension mismatch");
  }
  const Compressed& c = compressed();
  const RowMajorMatrix xr = x;
  RowMajorMatrix out = RowMajorMatrix::Zero(rows_, x.cols());
  compressed_product(c.row_ptr, c.row_col, c.row_val, xr, &out);
  return out;
}

DenseMatrix SparseObserved::apply_transpose(const DenseMatrix& y) const {
  if (y.rows() != rows_) {
    throw std::invalid_argument(
        "SparseObserved::apply_transpose: dimension mismatch");
  }
  const Compressed& c = compressed();
  const RowMajorMatrix yr = y;
  RowMajorMatrix out = RowMajorMatrix::Zero(cols_, y.cols());
  compressed_product(c.col_ptr, c.col_row, c.col_val, yr, &out);
  return out;
}

DenseMatrix SparseObserved::to_dense() const {
  DenseMatrix dense = DenseMatrix::Zero(rows_, cols_);
  for (const Entry& e : entries_) dense(e.row, e.col) = e.value;
  return dense;
}

SparseObserved SparseObserved::scaled(double factor) const {
  std::vector<Entry> out(entries_);
  for (Entry& e : out) e.value *= factor;
  return SparseObserved(rows_, cols_, std::move(out));
}

Vector spmv(const SparseObserved& a, const Vector& v, bool transpose) {
  const int expected = transpose ? a.rows() : a.cols();
  if (v.size() != expected) {
    throw std::invalid_argument("spmv: vector length " +
                                std::to_string(v.size()) + ", expected " +
                                std::to_string(expected));
  }
  const DenseMatrix block = v;
  return transpose ? a.apply_transpose(block).col(0) : a.apply(block).col(0);
}

}  // namespace mcomplete
