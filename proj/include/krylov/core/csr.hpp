// Copyright The Krylov Toolkit Authors.
// SPDX-License-Identifier: Apache-2.0

#ifndef KRYLOV_CORE_CSR_HPP
#define KRYLOV_CORE_CSR_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <span>
#include <string>
#include <tuple>
#include <vector>

#include "krylov/core/blas.hpp"
#include "krylov/core/dense.hpp"
#include "krylov/core/errors.hpp"

namespace krylov
{

template <typename T>
struct Triplet
{
  std::size_t row;
  std::size_t col;
  T value;
};

//
// Compressed sparse row matrix. Immutable after construction; the constructor checks the
// structural invariants (monotone row pointers, in-range and strictly increasing column
// indices within each row).
//
template <typename T>
class CsrMatrix
{
public:
  CsrMatrix() = default;

  CsrMatrix(std::size_t nrows, std::size_t ncols, std::vector<std::size_t> row_ptr,
            std::vector<std::size_t> col_idx, std::vector<T> values)
    : nrows_(nrows), ncols_(ncols), row_ptr_(std::move(row_ptr)),
      col_idx_(std::move(col_idx)), values_(std::move(values))
  {
    validate();
  }

  // Builds from unordered triplets; duplicate (row, col) pairs are rejected.
  static CsrMatrix from_triplets(std::size_t nrows, std::size_t ncols,
                                 std::vector<Triplet<T>> entries)
  {
    for (const auto &e : entries)
    {
      if (e.row >= nrows || e.col >= ncols)
      {
        throw DimensionError("CsrMatrix::from_triplets: entry (" + std::to_string(e.row) +
                             "," + std::to_string(e.col) + ") out of range");
      }
    }
    std::sort(entries.begin(), entries.end(), [](const auto &a, const auto &b)
              { return std::tie(a.row, a.col) < std::tie(b.row, b.col); });
    std::vector<std::size_t> row_ptr(nrows + 1, 0);
    std::vector<std::size_t> col_idx;
    std::vector<T> values;
    col_idx.reserve(entries.size());
    values.reserve(entries.size());
    for (std::size_t k = 0; k < entries.size(); k++)
    {
      if (k > 0 && entries[k].row == entries[k - 1].row &&
          entries[k].col == entries[k - 1].col)
      {
        throw DimensionError("CsrMatrix::from_triplets: duplicate entry (" +
                             std::to_string(entries[k].row) + "," +
                             std::to_string(entries[k].col) + ")");
      }
      row_ptr[entries[k].row + 1]++;
      col_idx.push_back(entries[k].col);
      values.push_back(entries[k].value);
    }
    std::partial_sum(row_ptr.begin(), row_ptr.end(), row_ptr.begin());
    return CsrMatrix(nrows, ncols, std::move(row_ptr), std::move(col_idx), std::move(values));
  }

  // Keeps every entry of A whose magnitude exceeds drop_tol (default: exact zeros only).
  static CsrMatrix from_dense(const DenseMatrix<T> &A, T drop_tol = T(0))
  {
    std::vector<Triplet<T>> entries;
    for (std::size_t i = 0; i < A.rows(); i++)
    {
      for (std::size_t j = 0; j < A.cols(); j++)
      {
        if (std::abs(A(i, j)) > drop_tol)
        {
          entries.push_back({i, j, A(i, j)});
        }
      }
    }
    return from_triplets(A.rows(), A.cols(), std::move(entries));
  }

  std::size_t rows() const { return nrows_; }
  std::size_t cols() const { return ncols_; }
  std::size_t nnz() const { return values_.size(); }
  std::span<const std::size_t> row_ptr() const { return row_ptr_; }
  std::span<const std::size_t> col_idx() const { return col_idx_; }
  std::span<const T> values() const { return values_; }

  // y = A x
  void multiply(std::span<const T> x, std::span<T> y) const
  {
    if (x.size() != ncols_ || y.size() != nrows_)
    {
      throw DimensionError("spmv: dimension mismatch (A is " + std::to_string(nrows_) + "x" +
                           std::to_string(ncols_) + ", x has " + std::to_string(x.size()) +
                           ")");
    }
    for (std::size_t i = 0; i < nrows_; i++)
    {
      T sum = T(0);
      for (std::size_t k = row_ptr_[i]; k < row_ptr_[i + 1]; k++)
      {
        sum += values_[k] * x[col_idx_[k]];
      }
      y[i] = sum;
    }
  }

  // y = A^T x
  void multiply_transpose(std::span<const T> x, std::span<T> y) const
  {
    if (x.size() != nrows_ || y.size() != ncols_)
    {
      throw DimensionError("spmv_transpose: dimension mismatch");
    }
    std::fill(y.begin(), y.end(), T(0));
    for (std::size_t i = 0; i < nrows_; i++)
    {
      for (std::size_t k = row_ptr_[i]; k < row_ptr_[i + 1]; k++)
      {
        y[col_idx_[k]] += values_[k] * x[i];
      }
    }
  }

  DenseMatrix<T> to_dense() const
  {
    DenseMatrix<T> A(nrows_, ncols_);
    for (std::size_t i = 0; i < nrows_; i++)
    {
      for (std::size_t k = row_ptr_[i]; k < row_ptr_[i + 1]; k++)
      {
        A(i, col_idx_[k]) = values_[k];
      }
    }
    return A;
  }

  std::vector<Triplet<T>> to_triplets() const
  {
    std::vector<Triplet<T>> out;
    out.reserve(nnz());
    for (std::size_t i = 0; i < nrows_; i++)
    {
      for (std::size_t k = row_ptr_[i]; k < row_ptr_[i + 1]; k++)
      {
        out.push_back({i, col_idx_[k], values_[k]});
      }
    }
    return out;
  }

  CsrMatrix transpose() const
  {
    auto entries = to_triplets();
    for (auto &e : entries)
    {
      std::swap(e.row, e.col);
    }
    return from_triplets(ncols_, nrows_, std::move(entries));
  }

  T frobenius_norm() const
  {
    T sum = T(0);
    for (auto v : values_)
    {
      sum += v * v;
    }
    return std::sqrt(sum);
  }

  template <typename U>
  CsrMatrix<U> cast() const
  {
    std::vector<U> vals(values_.size());
    std::transform(values_.begin(), values_.end(), vals.begin(),
                   [](T v) { return static_cast<U>(v); });
    return CsrMatrix<U>(nrows_, ncols_, row_ptr_, col_idx_, std::move(vals));
  }

  friend bool operator==(const CsrMatrix &a, const CsrMatrix &b) = default;

private:
  void validate() const
  {
    if (row_ptr_.size() != nrows_ + 1)
    {
      throw DimensionError("CsrMatrix: row_ptr must have nrows+1 entries");
    }
    if (row_ptr_.front() != 0 || row_ptr_.back() != values_.size() ||
        col_idx_.size() != values_.size())
    {
      throw DimensionError("CsrMatrix: row_ptr endpoints inconsistent with value count");
    }
    for (std::size_t i = 0; i < nrows_; i++)
    {
      if (row_ptr_[i] > row_ptr_[i + 1])
      {
        throw DimensionError("CsrMatrix: row_ptr decreases at row " + std::to_string(i));
      }
      for (std::size_t k = row_ptr_[i]; k < row_ptr_[i + 1]; k++)
      {
        if (col_idx_[k] >= ncols_)
        {
          throw DimensionError("CsrMatrix: column index out of range in row " +
                               std::to_string(i));
        }
        if (k > row_ptr_[i] && col_idx_[k] <= col_idx_[k - 1])
        {
          throw DimensionError("CsrMatrix: column indices not strictly increasing in row " +
                               std::to_string(i));
        }
      }
    }
  }

  std::size_t nrows_ = 0;
  std::size_t ncols_ = 0;
  std::vector<std::size_t> row_ptr_{0};
  std::vector<std::size_t> col_idx_;
  std::vector<T> values_;
};

template <typename T>
Vector<T> spmv(const CsrMatrix<T> &A, std::span<const T> v)
{
  Vector<T> y(A.rows());
  A.multiply(v, y);
  return y;
}

// Estimate of the spectral norm by power iteration on A^T A. Deterministic start vector.
template <typename T>
T norm2_estimate(const CsrMatrix<T> &A, std::size_t iterations = 100)
{
  Vector<T> x(A.cols(), T(1) / std::sqrt(static_cast<T>(std::max<std::size_t>(A.cols(), 1))));
  for (std::size_t i = 0; i < x.size(); i++)
  {
    // break symmetry so x is not orthogonal to the dominant singular vector by accident
    x[i] *= T(1) + T(0.01) * static_cast<T>(i % 7);
  }
  Vector<T> y(A.rows()), z(A.cols());
  T sigma = T(0);
  for (std::size_t it = 0; it < iterations; it++)
  {
    const T nx = nrm2<T>(x);
    if (nx == T(0))
    {
      return T(0);
    }
    scal<T>(T(1) / nx, x);
    A.multiply(x, y);
    A.multiply_transpose(y, z);
    const T next = std::sqrt(nrm2<T>(z));
    if (std::abs(next - sigma) <= T(1e-12) * next)
    {
      sigma = next;
      break;
    }
    sigma = next;
    x.swap(z);
  }
  return sigma;
}

}  // namespace krylov

#endif  // KRYLOV_CORE_CSR_HPP
