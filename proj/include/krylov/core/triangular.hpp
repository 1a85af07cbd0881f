// Copyright The Krylov Toolkit Authors.
// SPDX-License-Identifier: Apache-2.0

#ifndef KRYLOV_CORE_TRIANGULAR_HPP
#define KRYLOV_CORE_TRIANGULAR_HPP

#include <cstddef>
#include <span>
#include <string>

#include "krylov/core/blas.hpp"
#include "krylov/core/dense.hpp"
#include "krylov/core/errors.hpp"

namespace krylov
{

// Solves R(0:n,0:n) y = g for upper triangular R, with n = g.size().
template <typename T>
Vector<T> back_substitute(const DenseMatrix<T> &R, std::span<const T> g)
{
  const std::size_t n = g.size();
  if (R.rows() < n || R.cols() < n)
  {
    throw DimensionError("back_substitute: R smaller than right-hand side");
  }
  Vector<T> y(g.begin(), g.end());
  for (std::size_t ii = n; ii-- > 0;)
  {
    for (std::size_t k = ii + 1; k < n; k++)
    {
      y[ii] -= R(ii, k) * y[k];
    }
    if (R(ii, ii) == T(0))
    {
      throw SingularMatrixError("back_substitute: zero diagonal at index " +
                                    std::to_string(ii),
                                ii);
    }
    y[ii] /= R(ii, ii);
  }
  return y;
}

// Solves (I + L) y = g where L is strictly lower triangular (diagonal of L ignored).
template <typename T>
Vector<T> forward_substitute_unit(const DenseMatrix<T> &L, std::span<const T> g)
{
  const std::size_t n = g.size();
  if (L.rows() < n || L.cols() < n)
  {
    throw DimensionError("forward_substitute_unit: L smaller than right-hand side");
  }
  Vector<T> y(g.begin(), g.end());
  for (std::size_t i = 0; i < n; i++)
  {
    for (std::size_t k = 0; k < i; k++)
    {
      y[i] -= L(i, k) * y[k];
    }
  }
  return y;
}

// Solves L y = g for general lower triangular L.
template <typename T>
Vector<T> forward_substitute(const DenseMatrix<T> &L, std::span<const T> g)
{
  const std::size_t n = g.size();
  Vector<T> y(g.begin(), g.end());
  for (std::size_t i = 0; i < n; i++)
  {
    for (std::size_t k = 0; k < i; k++)
    {
      y[i] -= L(i, k) * y[k];
    }
    if (L(i, i) == T(0))
    {
      throw SingularMatrixError("forward_substitute: zero diagonal at index " +
                                    std::to_string(i),
                                i);
    }
    y[i] /= L(i, i);
  }
  return y;
}

// Inverse of an upper triangular matrix, column by column.
template <typename T>
DenseMatrix<T> upper_triangular_inverse(const DenseMatrix<T> &R)
{
  const std::size_t n = R.cols();
  DenseMatrix<T> X(n, n);
  Vector<T> e(n, T(0));
  for (std::size_t j = 0; j < n; j++)
  {
    std::fill(e.begin(), e.end(), T(0));
    e[j] = T(1);
    auto x = back_substitute<T>(R, e);
    std::copy(x.begin(), x.end(), X.col(j).begin());
  }
  return X;
}

}  // namespace krylov

#endif  // KRYLOV_CORE_TRIANGULAR_HPP
