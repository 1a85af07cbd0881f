// Copyright The Krylov Toolkit Authors.
// SPDX-License-Identifier: Apache-2.0

#ifndef KRYLOV_CORE_DENSE_HPP
#define KRYLOV_CORE_DENSE_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "krylov/core/blas.hpp"
#include "krylov/core/errors.hpp"

namespace krylov
{

//
// Column-major dense matrix. Used for Krylov bases (tall, few columns) and for the small
// projected matrices (Hessenberg, triangular factors, basis conversion matrices).
//
template <typename T>
class DenseMatrix
{
public:
  using value_type = T;

  DenseMatrix() = default;
  DenseMatrix(std::size_t rows, std::size_t cols, T value = T(0))
    : rows_(rows), cols_(cols), values_(rows * cols, value)
  {
  }
  DenseMatrix(std::size_t rows, std::size_t cols, std::vector<T> values)
    : rows_(rows), cols_(cols), values_(std::move(values))
  {
    if (values_.size() != rows_ * cols_)
    {
      throw DimensionError("DenseMatrix: value count does not match shape");
    }
  }

  static DenseMatrix identity(std::size_t n)
  {
    DenseMatrix I(n, n);
    for (std::size_t i = 0; i < n; i++)
    {
      I(i, i) = T(1);
    }
    return I;
  }

  // Row-major nested initializer, convenient for small hand-written matrices.
  static DenseMatrix from_rows(const std::vector<std::vector<T>> &rows)
  {
    const std::size_t m = rows.size();
    const std::size_t n = m ? rows.front().size() : 0;
    DenseMatrix A(m, n);
    for (std::size_t i = 0; i < m; i++)
    {
      if (rows[i].size() != n)
      {
        throw DimensionError("DenseMatrix::from_rows: ragged rows");
      }
      for (std::size_t j = 0; j < n; j++)
      {
        A(i, j) = rows[i][j];
      }
    }
    return A;
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool empty() const { return values_.empty(); }

  T &operator()(std::size_t i, std::size_t j) { return values_[j * rows_ + i]; }
  const T &operator()(std::size_t i, std::size_t j) const { return values_[j * rows_ + i]; }

  std::span<T> col(std::size_t j) { return {values_.data() + j * rows_, rows_}; }
  std::span<const T> col(std::size_t j) const { return {values_.data() + j * rows_, rows_}; }

  std::span<T> values() { return values_; }
  std::span<const T> values() const { return values_; }

  // Change the column count, keeping existing columns (column-major makes this cheap).
  void resize_cols(std::size_t cols)
  {
    values_.resize(rows_ * cols, T(0));
    cols_ = cols;
  }

  DenseMatrix block(std::size_t r0, std::size_t c0, std::size_t nr, std::size_t nc) const
  {
    if (r0 + nr > rows_ || c0 + nc > cols_)
    {
      throw DimensionError("DenseMatrix::block: out of range");
    }
    DenseMatrix B(nr, nc);
    for (std::size_t j = 0; j < nc; j++)
    {
      for (std::size_t i = 0; i < nr; i++)
      {
        B(i, j) = (*this)(r0 + i, c0 + j);
      }
    }
    return B;
  }

  void set_block(std::size_t r0, std::size_t c0, const DenseMatrix &B)
  {
    if (r0 + B.rows() > rows_ || c0 + B.cols() > cols_)
    {
      throw DimensionError("DenseMatrix::set_block: out of range");
    }
    for (std::size_t j = 0; j < B.cols(); j++)
    {
      for (std::size_t i = 0; i < B.rows(); i++)
      {
        (*this)(r0 + i, c0 + j) = B(i, j);
      }
    }
  }

  DenseMatrix transpose() const
  {
    DenseMatrix B(cols_, rows_);
    for (std::size_t j = 0; j < cols_; j++)
    {
      for (std::size_t i = 0; i < rows_; i++)
      {
        B(j, i) = (*this)(i, j);
      }
    }
    return B;
  }

  template <typename U>
  DenseMatrix<U> cast() const
  {
    DenseMatrix<U> B(rows_, cols_);
    for (std::size_t k = 0; k < values_.size(); k++)
    {
      B.values()[k] = static_cast<U>(values_[k]);
    }
    return B;
  }

private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<T> values_;
};

template <typename T>
DenseMatrix<T> matmul(const DenseMatrix<T> &A, const DenseMatrix<T> &B)
{
  if (A.cols() != B.rows())
  {
    throw DimensionError("matmul: inner dimensions differ");
  }
  DenseMatrix<T> C(A.rows(), B.cols());
  for (std::size_t j = 0; j < B.cols(); j++)
  {
    for (std::size_t k = 0; k < A.cols(); k++)
    {
      const T b = B(k, j);
      if (b == T(0))
      {
        continue;
      }
      for (std::size_t i = 0; i < A.rows(); i++)
      {
        C(i, j) += A(i, k) * b;
      }
    }
  }
  return C;
}

// y = A x, using only the first x.size() columns of A.
template <typename T>
Vector<T> matvec(const DenseMatrix<T> &A, std::span<const T> x)
{
  if (x.size() > A.cols())
  {
    throw DimensionError("matvec: vector longer than column count");
  }
  Vector<T> y(A.rows(), T(0));
  for (std::size_t j = 0; j < x.size(); j++)
  {
    axpy<T>(x[j], A.col(j), y);
  }
  return y;
}

// y = A^T x
template <typename T>
Vector<T> matvec_transpose(const DenseMatrix<T> &A, std::span<const T> x)
{
  detail::check_same_size(A.rows(), x.size(), "matvec_transpose");
  Vector<T> y(A.cols());
  for (std::size_t j = 0; j < A.cols(); j++)
  {
    y[j] = dot<T>(A.col(j), x);
  }
  return y;
}

template <typename T>
T frobenius_norm(const DenseMatrix<T> &A)
{
  T sum = T(0);
  for (auto v : A.values())
  {
    sum += v * v;
  }
  return std::sqrt(sum);
}

template <typename T>
DenseMatrix<T> operator-(const DenseMatrix<T> &A, const DenseMatrix<T> &B)
{
  if (A.rows() != B.rows() || A.cols() != B.cols())
  {
    throw DimensionError("matrix subtraction: shape mismatch");
  }
  DenseMatrix<T> C = A;
  for (std::size_t k = 0; k < C.values().size(); k++)
  {
    C.values()[k] -= B.values()[k];
  }
  return C;
}

template <typename T>
DenseMatrix<T> operator+(const DenseMatrix<T> &A, const DenseMatrix<T> &B)
{
  if (A.rows() != B.rows() || A.cols() != B.cols())
  {
    throw DimensionError("matrix addition: shape mismatch");
  }
  DenseMatrix<T> C = A;
  for (std::size_t k = 0; k < C.values().size(); k++)
  {
    C.values()[k] += B.values()[k];
  }
  return C;
}

// First `cols` columns of A as a new matrix.
template <typename T>
DenseMatrix<T> leading_columns(const DenseMatrix<T> &A, std::size_t cols)
{
  return A.block(0, 0, A.rows(), cols);
}

}  // namespace krylov

#endif  // KRYLOV_CORE_DENSE_HPP
