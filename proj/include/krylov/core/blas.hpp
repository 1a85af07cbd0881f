// Copyright The Krylov Toolkit Authors.
// SPDX-License-Identifier: Apache-2.0

#ifndef KRYLOV_CORE_BLAS_HPP
#define KRYLOV_CORE_BLAS_HPP

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "krylov/core/errors.hpp"

namespace krylov
{

template <typename T>
using Vector = std::vector<T>;

namespace detail
{
inline void check_same_size(std::size_t a, std::size_t b, const char *what)
{
  if (a != b)
  {
    throw DimensionError(std::string(what) + ": size mismatch (" + std::to_string(a) +
                         " vs " + std::to_string(b) + ")");
  }
}
}  // namespace detail

template <typename T>
T dot(std::span<const T> x, std::span<const T> y)
{
  detail::check_same_size(x.size(), y.size(), "dot");
  T sum = T(0);
  for (std::size_t i = 0; i < x.size(); i++)
  {
    sum += x[i] * y[i];
  }
  return sum;
}

// (x, y)_D = sum_i d_i x_i y_i; an empty weight span means the Euclidean product.
template <typename T>
T dot(std::span<const T> x, std::span<const T> y, std::span<const T> weight)
{
  if (weight.empty())
  {
    return dot(x, y);
  }
  detail::check_same_size(x.size(), y.size(), "dot");
  detail::check_same_size(x.size(), weight.size(), "dot");
  T sum = T(0);
  for (std::size_t i = 0; i < x.size(); i++)
  {
    sum += weight[i] * x[i] * y[i];
  }
  return sum;
}

template <typename T>
T nrm2(std::span<const T> x)
{
  return std::sqrt(dot(x, x));
}

template <typename T>
T nrm2(std::span<const T> x, std::span<const T> weight)
{
  return std::sqrt(dot(x, x, weight));
}

// y += alpha * x
template <typename T>
void axpy(T alpha, std::span<const T> x, std::span<T> y)
{
  detail::check_same_size(x.size(), y.size(), "axpy");
  for (std::size_t i = 0; i < x.size(); i++)
  {
    y[i] += alpha * x[i];
  }
}

template <typename T>
void scal(T alpha, std::span<T> x)
{
  for (auto &v : x)
  {
    v *= alpha;
  }
}

template <typename T>
void copy(std::span<const T> x, std::span<T> y)
{
  detail::check_same_size(x.size(), y.size(), "copy");
  for (std::size_t i = 0; i < x.size(); i++)
  {
    y[i] = x[i];
  }
}

template <typename To, typename From>
Vector<To> cast_vector(std::span<const From> x)
{
  Vector<To> y(x.size());
  for (std::size_t i = 0; i < x.size(); i++)
  {
    y[i] = static_cast<To>(x[i]);
  }
  return y;
}

template <typename T>
Vector<T> subtract(std::span<const T> x, std::span<const T> y)
{
  detail::check_same_size(x.size(), y.size(), "subtract");
  Vector<T> z(x.size());
  for (std::size_t i = 0; i < x.size(); i++)
  {
    z[i] = x[i] - y[i];
  }
  return z;
}

}  // namespace krylov

#endif  // KRYLOV_CORE_BLAS_HPP
