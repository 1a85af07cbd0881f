// Copyright The Krylov Toolkit Authors.
// SPDX-License-Identifier: Apache-2.0

#ifndef KRYLOV_CORE_OPERATOR_HPP
#define KRYLOV_CORE_OPERATOR_HPP

#include <cstddef>
#include <functional>
#include <memory>
#include <span>

#include "krylov/core/blas.hpp"
#include "krylov/core/csr.hpp"
#include "krylov/core/dense.hpp"

namespace krylov
{

//
// Square linear map y = A x given by a callable. Must be safe to call concurrently when the
// operator is shared across solves; stateful wrappers (inexact products) are per-solve.
//
template <typename T>
struct LinearOperator
{
  std::size_t size = 0;
  std::function<void(std::span<const T>, std::span<T>)> apply;

  Vector<T> operator()(std::span<const T> x) const
  {
    Vector<T> y(size);
    apply(x, y);
    return y;
  }

  explicit operator bool() const { return static_cast<bool>(apply); }
};

template <typename T>
LinearOperator<T> make_operator(CsrMatrix<T> A)
{
  if (A.rows() != A.cols())
  {
    throw DimensionError("make_operator: matrix must be square");
  }
  auto shared = std::make_shared<const CsrMatrix<T>>(std::move(A));
  return {shared->rows(),
          [shared](std::span<const T> x, std::span<T> y) { shared->multiply(x, y); }};
}

template <typename T>
LinearOperator<T> make_operator(DenseMatrix<T> A)
{
  if (A.rows() != A.cols())
  {
    throw DimensionError("make_operator: matrix must be square");
  }
  auto shared = std::make_shared<const DenseMatrix<T>>(std::move(A));
  return {shared->rows(), [shared](std::span<const T> x, std::span<T> y)
          {
            detail::check_same_size(x.size(), shared->cols(), "dense operator");
            std::fill(y.begin(), y.end(), T(0));
            for (std::size_t j = 0; j < x.size(); j++)
            {
              axpy<T>(x[j], shared->col(j), y);
            }
          }};
}

// Applies a double CSR matrix in format Low: the stored values are rounded to Low once and
// the product accumulates in Low.
template <typename Low>
LinearOperator<Low> make_operator_low(const CsrMatrix<double> &A)
{
  return make_operator(A.template cast<Low>());
}

template <typename T>
LinearOperator<T> identity_operator(std::size_t n)
{
  return {n, [](std::span<const T> x, std::span<T> y) { copy<T>(x, y); }};
}

// Diagonal scaling y_i = d_i x_i.
template <typename T>
LinearOperator<T> diagonal_operator(Vector<T> d)
{
  auto shared = std::make_shared<const Vector<T>>(std::move(d));
  return {shared->size(), [shared](std::span<const T> x, std::span<T> y)
          {
            for (std::size_t i = 0; i < x.size(); i++)
            {
              y[i] = (*shared)[i] * x[i];
            }
          }};
}

// A B as one operator.
template <typename T>
LinearOperator<T> compose(LinearOperator<T> A, LinearOperator<T> B)
{
  return {A.size, [A, B](std::span<const T> x, std::span<T> y)
          {
            Vector<T> t(B.size);
            B.apply(x, t);
            A.apply(t, y);
          }};
}

// Dense matrix of an operator by probing with unit vectors; desk-scale only.
template <typename T>
DenseMatrix<T> to_dense(const LinearOperator<T> &A)
{
  DenseMatrix<T> M(A.size, A.size);
  Vector<T> e(A.size, T(0));
  for (std::size_t j = 0; j < A.size; j++)
  {
    e[j] = T(1);
    A.apply(e, M.col(j));
    e[j] = T(0);
  }
  return M;
}

}  // namespace krylov

#endif  // KRYLOV_CORE_OPERATOR_HPP
