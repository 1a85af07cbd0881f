// Copyright The Krylov Toolkit Authors.
// SPDX-License-Identifier: Apache-2.0

#ifndef KRYLOV_ORTHO_ICWY_HPP
#define KRYLOV_ORTHO_ICWY_HPP

#include <cstddef>
#include <span>

#include "krylov/core/blas.hpp"
#include "krylov/core/dense.hpp"
#include "krylov/core/triangular.hpp"

namespace krylov
{

//
// Correction matrix L of the inverse compact WY form of MGS:
// (I - v_n v_n^T)...(I - v_1 v_1^T) = I - V (I + L)^{-1} V^T, with row k of L holding
// (V_{k-1}^T v_k)^T.
//
template <typename T>
class IcwyState
{
public:
  IcwyState() = default;
  explicit IcwyState(std::size_t capacity) : L_(capacity, capacity) {}

  // Builds L from the columns of V (unit norm assumed).
  static IcwyState from_basis(const DenseMatrix<T> &V)
  {
    IcwyState s(V.cols());
    for (std::size_t k = 0; k < V.cols(); k++)
    {
      for (std::size_t i = 0; i < k; i++)
      {
        s.L_(k, i) = dot<T>(V.col(i), V.col(k));
      }
    }
    s.size_ = V.cols();
    return s;
  }

  std::size_t size() const { return size_; }
  const DenseMatrix<T> &L() const { return L_; }

  // Appends row `size()` with entries l[0..size()).
  void append_row(std::span<const T> l)
  {
    const std::size_t k = size_;
    if (k >= L_.rows())
    {
      DenseMatrix<T> grown(2 * k + 2, 2 * k + 2);
      grown.set_block(0, 0, L_);
      L_ = std::move(grown);
    }
    for (std::size_t i = 0; i < k; i++)
    {
      L_(k, i) = l[i];
    }
    size_++;
  }

  // h = (I + L)^{-1} u over the leading u.size() rows.
  Vector<T> solve(std::span<const T> u) const
  {
    return forward_substitute_unit<T>(L_, u);
  }

private:
  DenseMatrix<T> L_;
  std::size_t size_ = 0;
};

// h = (I + L)^{-1} (V^T w): the MGS projection coefficients from one batch of inner products.
template <typename T>
Vector<T> icwy_project(const IcwyState<T> &state, const DenseMatrix<T> &V, std::span<const T> w)
{
  if (state.size() != V.cols())
  {
    throw DimensionError("icwy_project: L and V dimensions differ");
  }
  return state.solve(matvec_transpose(V, w));
}

}  // namespace krylov

#endif  // KRYLOV_ORTHO_ICWY_HPP
