// Copyright The Krylov Toolkit Authors.
// SPDX-License-Identifier: Apache-2.0

#ifndef KRYLOV_CORE_LU_HPP
#define KRYLOV_CORE_LU_HPP

#include <cmath>
#include <cstddef>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "krylov/core/blas.hpp"
#include "krylov/core/dense.hpp"
#include "krylov/core/errors.hpp"

namespace krylov
{

//
// Dense LU factorization with partial pivoting, P A = L U. L is unit lower triangular and
// stored together with U in one matrix. The scalar type T is the storage and arithmetic
// format of the factors.
//
template <typename T>
class LuFactorization
{
public:
  LuFactorization() = default;

  explicit LuFactorization(DenseMatrix<T> A) : lu_(std::move(A))
  {
    const std::size_t n = lu_.rows();
    if (lu_.cols() != n)
    {
      throw DimensionError("LuFactorization: matrix must be square");
    }
    perm_.resize(n);
    std::iota(perm_.begin(), perm_.end(), std::size_t{0});
    T max_a = T(0);
    for (auto v : lu_.values())
    {
      max_a = std::max(max_a, std::abs(v));
    }
    T max_u = max_a;
    for (std::size_t k = 0; k < n; k++)
    {
      std::size_t p = k;
      for (std::size_t i = k + 1; i < n; i++)
      {
        if (std::abs(lu_(i, k)) > std::abs(lu_(p, k)))
        {
          p = i;
        }
      }
      if (lu_(p, k) == T(0))
      {
        throw SingularMatrixError("LuFactorization: zero pivot in column " + std::to_string(k),
                                  k);
      }
      if (p != k)
      {
        std::swap(perm_[p], perm_[k]);
        for (std::size_t j = 0; j < n; j++)
        {
          std::swap(lu_(p, j), lu_(k, j));
        }
      }
      const T pivot = lu_(k, k);
      for (std::size_t i = k + 1; i < n; i++)
      {
        lu_(i, k) /= pivot;
      }
      for (std::size_t j = k + 1; j < n; j++)
      {
        const T ukj = lu_(k, j);
        if (ukj == T(0))
        {
          continue;
        }
        for (std::size_t i = k + 1; i < n; i++)
        {
          lu_(i, j) -= lu_(i, k) * ukj;
          max_u = std::max(max_u, std::abs(lu_(i, j)));
        }
      }
    }
    growth_ = max_a > T(0) ? max_u / max_a : T(1);
  }

  std::size_t size() const { return lu_.rows(); }

  // perm()[i] is the original row placed at position i.
  std::span<const std::size_t> perm() const { return perm_; }

  // max |U_ij| (and intermediate Schur entries) over max |A_ij|.
  T growth_factor() const { return growth_; }

  DenseMatrix<T> L() const
  {
    const std::size_t n = size();
    DenseMatrix<T> L = DenseMatrix<T>::identity(n);
    for (std::size_t j = 0; j < n; j++)
    {
      for (std::size_t i = j + 1; i < n; i++)
      {
        L(i, j) = lu_(i, j);
      }
    }
    return L;
  }

  DenseMatrix<T> U() const
  {
    const std::size_t n = size();
    DenseMatrix<T> U(n, n);
    for (std::size_t j = 0; j < n; j++)
    {
      for (std::size_t i = 0; i <= j; i++)
      {
        U(i, j) = lu_(i, j);
      }
    }
    return U;
  }

  DenseMatrix<T> P() const
  {
    const std::size_t n = size();
    DenseMatrix<T> P(n, n);
    for (std::size_t i = 0; i < n; i++)
    {
      P(i, perm_[i]) = T(1);
    }
    return P;
  }

  // x = A^{-1} b, computed entirely in T.
  Vector<T> solve(std::span<const T> b) const
  {
    const std::size_t n = size();
    detail::check_same_size(b.size(), n, "LuFactorization::solve");
    Vector<T> x(n);
    for (std::size_t i = 0; i < n; i++)
    {
      x[i] = b[perm_[i]];
    }
    for (std::size_t j = 0; j < n; j++)
    {
      const T xj = x[j];
      for (std::size_t i = j + 1; i < n; i++)
      {
        x[i] -= lu_(i, j) * xj;
      }
    }
    for (std::size_t j = n; j-- > 0;)
    {
      x[j] /= lu_(j, j);
      const T xj = x[j];
      for (std::size_t i = 0; i < j; i++)
      {
        x[i] -= lu_(i, j) * xj;
      }
    }
    return x;
  }

private:
  DenseMatrix<T> lu_;
  std::vector<std::size_t> perm_;
  T growth_ = T(1);
};

// Dense inverse via LU; desk-scale helper for bound evaluation.
template <typename T>
DenseMatrix<T> dense_inverse(const DenseMatrix<T> &A)
{
  LuFactorization<T> lu(A);
  const std::size_t n = A.rows();
  DenseMatrix<T> X(n, n);
  Vector<T> e(n);
  for (std::size_t j = 0; j < n; j++)
  {
    std::fill(e.begin(), e.end(), T(0));
    e[j] = T(1);
    auto x = lu.solve(e);
    std::copy(x.begin(), x.end(), X.col(j).begin());
  }
  return X;
}

}  // namespace krylov

#endif  // KRYLOV_CORE_LU_HPP
