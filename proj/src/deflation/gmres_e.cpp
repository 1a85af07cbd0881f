// Copyright The Krylov Toolkit Authors.
// SPDX-License-Identifier: Apache-2.0

#include "krylov/deflation/gmres_e.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "krylov/core/eig.hpp"

namespace krylov
{

GmresECycle::GmresECycle(const LinearOperator<double> &A, const GmresOptions &opts,
                         std::size_t m1, std::size_t m2)
  : AugmentedCycle<double>(A, opts, m1, m2, AugmentPlacement::Trailing)
{
}

void GmresECycle::after_cycle(const Vector<double> &)
{
  next_.clear();
  selected_.clear();
  const std::size_t n = Z_.cols();
  if (m2_ == 0 || n == 0 || V_.cols() <= n)
  {
    return;
  }
  // Harmonic pairs on range(Z): Hbar^T Hbar g = theta Hbar^T (V^T Z) g.
  const DenseMatrix<double> G = matmul(H_.transpose(), H_);
  const DenseMatrix<double> W = matmul(V_.transpose(), Z_);
  const DenseMatrix<double> B = matmul(H_.transpose(), W);
  GeneralEigen ev;
  try
  {
    ev = dense_eig_generalized(G, B, true);
  }
  catch (const KrylovError &)
  {
    return;
  }
  std::vector<std::size_t> order(ev.values.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b)
                   { return std::abs(ev.values[a]) < std::abs(ev.values[b]); });

  auto push = [&](const std::vector<double> &g)
  {
    Vector<double> u = matvec(Z_, std::span<const double>(g));
    Vector<double> au = matvec(V_, std::span<const double>(matvec(H_, std::span<const double>(g))));
    const double nu = nrm2<double>(u);
    if (!(nu > 0.0))
    {
      return;
    }
    scal<double>(1.0 / nu, u);
    scal<double>(1.0 / nu, au);
    next_.push_back({std::move(u), std::move(au)});
  };

  std::vector<bool> taken(ev.values.size(), false);
  for (auto k : order)
  {
    if (next_.size() >= m2_)
    {
      break;
    }
    if (taken[k])
    {
      continue;
    }
    taken[k] = true;
    const Complex theta = ev.values[k];
    std::vector<double> re(n), im(n);
    for (std::size_t i = 0; i < n; i++)
    {
      re[i] = ev.vector_entry(i, k).real();
      im[i] = ev.vector_entry(i, k).imag();
    }
    selected_.push_back(theta);
    const bool complex = std::abs(theta.imag()) > 1e-12 * std::abs(theta);
    if (complex)
    {
      // skip the conjugate partner; its vector spans the same real plane
      for (auto j : order)
      {
        if (!taken[j] && std::abs(ev.values[j] - std::conj(theta)) <= 1e-8 * std::abs(theta))
        {
          taken[j] = true;
          break;
        }
      }
      push(re);
      if (next_.size() < m2_)
      {
        push(im);
      }
    }
    else
    {
      // a real eigenvector may carry a complex phase; take the larger part
      push(nrm2<double>(re) >= nrm2<double>(im) ? re : im);
    }
  }
}

SolveReport gmres_e(const LinearOperator<double> &A, std::span<const double> b,
                    std::span<const double> x0, std::size_t m1, std::size_t m2,
                    const GmresOptions &opts)
{
  GmresECycle cycle(A, opts, m1, m2);
  return run_restarted<double>(A, b, x0, opts, cycle, m1 + m2);
}

}  // namespace krylov
