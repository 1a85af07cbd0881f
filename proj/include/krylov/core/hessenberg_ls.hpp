// Copyright The Krylov Toolkit Authors.
// SPDX-License-Identifier: Apache-2.0

#ifndef KRYLOV_CORE_HESSENBERG_LS_HPP
#define KRYLOV_CORE_HESSENBERG_LS_HPP

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "krylov/core/blas.hpp"
#include "krylov/core/dense.hpp"
#include "krylov/core/errors.hpp"
#include "krylov/core/givens.hpp"
#include "krylov/core/triangular.hpp"

namespace krylov
{

//
// Running QR factorization of an upper Hessenberg least-squares problem
// min ||beta e1 - Hbar y|| by Givens rotations. Columns are appended one at a time; the
// residual norm of the current problem is |g[j]| after j columns.
//
template <typename T>
class HessenbergLsState
{
public:
  HessenbergLsState() = default;
  HessenbergLsState(T beta, std::size_t capacity) : R_(capacity + 1, capacity), g_{beta}
  {
    rho_ = std::abs(beta);
    g_.reserve(capacity + 1);
  }

  std::size_t columns() const { return rotations_.size(); }
  std::size_t capacity() const { return R_.cols(); }
  T rho() const { return rho_; }
  const DenseMatrix<T> &R() const { return R_; }
  std::span<const T> g() const { return g_; }
  std::span<const GivensRotation<T>> rotations() const { return rotations_; }

  // Appends column j (0-based) of Hbar; col holds entries 0..j+1.
  void add_column(std::span<const T> col)
  {
    const std::size_t j = rotations_.size();
    if (col.size() != j + 2)
    {
      throw DimensionError("HessenbergLsState::add_column: expected " + std::to_string(j + 2) +
                           " entries");
    }
    if (j >= R_.cols())
    {
      DenseMatrix<T> grown(j + 2, j + 1);
      grown.set_block(0, 0, R_);
      R_ = std::move(grown);
    }
    Vector<T> h(col.begin(), col.end());
    for (std::size_t i = 0; i < j; i++)
    {
      rotations_[i].apply(h[i], h[i + 1]);
    }
    const auto [rot, r] = make_givens(h[j], h[j + 1]);
    h[j] = r;
    h[j + 1] = T(0);
    rotations_.push_back(rot);
    for (std::size_t i = 0; i <= j; i++)
    {
      R_(i, j) = h[i];
    }
    g_.push_back(T(0));
    rot.apply(g_[j], g_[j + 1]);
    rho_ = std::abs(g_[j + 1]);
  }

  // Minimizer y of the current least-squares problem.
  Vector<T> solve() const
  {
    const std::size_t n = columns();
    return back_substitute<T>(R_, std::span<const T>(g_.data(), n));
  }

  // Smallest |R_ii| relative to the largest; zero flags a singular projected matrix.
  T min_diagonal_ratio() const
  {
    T lo = T(0), hi = T(0);
    for (std::size_t i = 0; i < columns(); i++)
    {
      const T d = std::abs(R_(i, i));
      lo = (i == 0) ? d : std::min(lo, d);
      hi = std::max(hi, d);
    }
    return hi > T(0) ? lo / hi : T(0);
  }

private:
  DenseMatrix<T> R_;
  Vector<T> g_;
  std::vector<GivensRotation<T>> rotations_;
  T rho_ = T(0);
};

}  // namespace krylov

#endif  // KRYLOV_CORE_HESSENBERG_LS_HPP
