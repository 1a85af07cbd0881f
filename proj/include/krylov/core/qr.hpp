// Copyright The Krylov Toolkit Authors.
// SPDX-License-Identifier: Apache-2.0

#ifndef KRYLOV_CORE_QR_HPP
#define KRYLOV_CORE_QR_HPP

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "krylov/core/blas.hpp"
#include "krylov/core/dense.hpp"
#include "krylov/core/errors.hpp"

namespace krylov
{

template <typename T>
struct QrResult
{
  DenseMatrix<T> Q;  // m x n, orthonormal columns
  DenseMatrix<T> R;  // n x n upper triangular
};

// Householder reflector P = I - tau v v^T with v[0] = 1 mapping x to (beta, 0, ..., 0).
// sign(0) is taken as +1.
template <typename T>
struct Householder
{
  Vector<T> v;
  T tau = T(0);
  T beta = T(0);
};

template <typename T>
Householder<T> make_householder(std::span<const T> x)
{
  Householder<T> h;
  h.v.assign(x.begin(), x.end());
  if (x.empty())
  {
    return h;
  }
  T scale = T(0);
  for (auto v : x)
  {
    scale = std::max(scale, std::abs(v));
  }
  if (scale == T(0))
  {
    h.v[0] = T(1);
    return h;
  }
  T sigma = T(0);
  for (std::size_t i = 1; i < x.size(); i++)
  {
    sigma += (x[i] / scale) * (x[i] / scale);
  }
  const T x0 = x[0] / scale;
  const T norm = scale * std::sqrt(x0 * x0 + sigma);
  if (sigma == T(0))
  {
    // Already a multiple of e1; no reflection needed.
    h.beta = x[0];
    std::fill(h.v.begin(), h.v.end(), T(0));
    h.v[0] = T(1);
    return h;
  }
  const T sign = x[0] >= T(0) ? T(1) : T(-1);
  const T v0 = x[0] + sign * norm;
  for (std::size_t i = 1; i < x.size(); i++)
  {
    h.v[i] = x[i] / v0;
  }
  h.v[0] = T(1);
  h.beta = -sign * norm;
  h.tau = v0 / (sign * norm);
  return h;
}

// y <- (I - tau v v^T) y on the trailing part of y starting at `offset`.
template <typename T>
void apply_householder(const Householder<T> &h, std::span<T> y, std::size_t offset = 0)
{
  if (h.tau == T(0))
  {
    return;
  }
  T s = T(0);
  for (std::size_t i = 0; i < h.v.size(); i++)
  {
    s += h.v[i] * y[offset + i];
  }
  s *= h.tau;
  for (std::size_t i = 0; i < h.v.size(); i++)
  {
    y[offset + i] -= s * h.v[i];
  }
}

// Thin Householder QR of a tall matrix (rows >= cols).
template <typename T>
QrResult<T> householder_qr(const DenseMatrix<T> &A)
{
  const std::size_t m = A.rows();
  const std::size_t n = A.cols();
  if (m < n)
  {
    throw DimensionError("householder_qr: matrix must have at least as many rows as columns");
  }
  DenseMatrix<T> W = A;
  std::vector<Householder<T>> reflectors;
  reflectors.reserve(n);
  for (std::size_t k = 0; k < n; k++)
  {
    auto colk = W.col(k);
    auto h = make_householder<T>(colk.subspan(k));
    for (std::size_t j = k; j < n; j++)
    {
      apply_householder<T>(h, W.col(j), k);
    }
    reflectors.push_back(std::move(h));
  }
  QrResult<T> out{DenseMatrix<T>(m, n), DenseMatrix<T>(n, n)};
  for (std::size_t j = 0; j < n; j++)
  {
    for (std::size_t i = 0; i <= j; i++)
    {
      out.R(i, j) = W(i, j);
    }
  }
  for (std::size_t j = 0; j < n; j++)
  {
    auto q = out.Q.col(j);
    q[j] = T(1);
    for (std::size_t k = n; k-- > 0;)
    {
      apply_householder<T>(reflectors[k], q, k);
    }
  }
  return out;
}

// Flips signs so that diag(R) >= 0, keeping Q R unchanged.
template <typename T>
void normalize_qr_signs(DenseMatrix<T> &Q, DenseMatrix<T> &R)
{
  for (std::size_t i = 0; i < R.rows(); i++)
  {
    if (R(i, i) < T(0))
    {
      for (std::size_t j = 0; j < R.cols(); j++)
      {
        R(i, j) = -R(i, j);
      }
      if (i < Q.cols())
      {
        scal<T>(T(-1), Q.col(i));
      }
    }
  }
}

}  // namespace krylov

#endif  // KRYLOV_CORE_QR_HPP
