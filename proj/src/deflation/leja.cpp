// Copyright The Krylov Toolkit Authors.
// SPDX-License-Identifier: Apache-2.0

#include "krylov/deflation/leja.hpp"

#include <cmath>
#include <limits>

namespace krylov
{

namespace
{

bool is_real(Complex z) { return std::abs(z.imag()) <= 1e-12 * std::abs(z); }

}  // namespace

std::vector<Complex> leja_order(std::span<const Complex> points)
{
  const std::size_t n = points.size();
  std::vector<Complex> out;
  out.reserve(n);
  std::vector<bool> used(n, false);
  std::vector<double> score(n, 0.0);  // sum of log distances to the chosen prefix

  auto take = [&](std::size_t k)
  {
    used[k] = true;
    out.push_back(points[k]);
    for (std::size_t i = 0; i < n; i++)
    {
      if (!used[i])
      {
        const double d = std::abs(points[i] - points[k]);
        score[i] += d > 0.0 ? std::log(d) : -std::numeric_limits<double>::infinity();
      }
    }
  };

  while (out.size() < n)
  {
    std::size_t best = n;
    for (std::size_t i = 0; i < n; i++)
    {
      if (used[i])
      {
        continue;
      }
      if (best == n)
      {
        best = i;
        continue;
      }
      const bool better = out.empty() ? std::abs(points[i]) > std::abs(points[best])
                                      : score[i] > score[best];
      if (better)
      {
        best = i;
      }
    }
    take(best);
    const Complex z = points[best];
    if (!is_real(z))
    {
      std::size_t partner = n;
      double gap = std::numeric_limits<double>::infinity();
      for (std::size_t i = 0; i < n; i++)
      {
        const double d = std::abs(points[i] - std::conj(z));
        if (!used[i] && d < gap)
        {
          gap = d;
          partner = i;
        }
      }
      if (partner < n && gap <= 1e-8 * std::abs(z))
      {
        take(partner);
      }
    }
  }
  return out;
}

std::vector<Complex> leja_order(std::span<const double> points)
{
  std::vector<Complex> z(points.begin(), points.end());
  return leja_order(std::span<const Complex>(z));
}

}  // namespace krylov
