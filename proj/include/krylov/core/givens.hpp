// Copyright The Krylov Toolkit Authors.
// SPDX-License-Identifier: Apache-2.0

#ifndef KRYLOV_CORE_GIVENS_HPP
#define KRYLOV_CORE_GIVENS_HPP

#include <cmath>

namespace krylov
{

template <typename T>
struct GivensRotation
{
  T c = T(1);
  T s = T(0);

  // [c s; -s c] [x; y]
  void apply(T &x, T &y) const
  {
    const T tx = c * x + s * y;
    y = -s * x + c * y;
    x = tx;
  }
};

template <typename T>
struct GivensResult
{
  GivensRotation<T> rotation;
  T r;
};

// Rotation with c*a + s*b = r >= 0 and -s*a + c*b = 0. Scales by max(|a|,|b|) to avoid
// overflow in the squares. (0, 0) yields the identity.
template <typename T>
GivensResult<T> make_givens(T a, T b)
{
  const T scale = std::max(std::abs(a), std::abs(b));
  if (scale == T(0))
  {
    return {{T(1), T(0)}, T(0)};
  }
  const T as = a / scale;
  const T bs = b / scale;
  const T r = scale * std::sqrt(as * as + bs * bs);
  return {{a / r, b / r}, r};
}

}  // namespace krylov

#endif  // KRYLOV_CORE_GIVENS_HPP
