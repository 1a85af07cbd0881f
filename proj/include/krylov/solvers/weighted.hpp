// Copyright The Krylov Toolkit Authors.
// SPDX-License-Identifier: Apache-2.0

#ifndef KRYLOV_SOLVERS_WEIGHTED_HPP
#define KRYLOV_SOLVERS_WEIGHTED_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>

#include "krylov/core/blas.hpp"
#include "krylov/solvers/gmres.hpp"

namespace krylov
{

// delta_i = sqrt(N) |r_i| / ||r||, clamped below at floor so D stays positive definite.
template <typename T>
Vector<T> residual_weights(std::span<const T> r, T floor = T(1e-10))
{
  const T nr = nrm2<T>(r);
  const T scale = std::sqrt(static_cast<T>(r.size()));
  Vector<T> d(r.size());
  for (std::size_t i = 0; i < r.size(); i++)
  {
    d[i] = nr > T(0) ? std::max(scale * std::abs(r[i]) / nr, floor) : T(1);
  }
  return d;
}

//
// GMRES in the D-inner product (u, v)_D = v^T D u. The minimized and reported quantity is
// ||r||_D. With weight_adaptive (or no fixed weight) D is rebuilt from the residual at every
// restart.
//
template <typename T>
class WeightedCycle : public ArnoldiCycle<T>
{
public:
  WeightedCycle(const LinearOperator<T> &A, const BasicGmresOptions<T> &opts)
    : ArnoldiCycle<T>(A, opts), adaptive_(opts.weight_adaptive || opts.weight.empty())
  {
  }

  void prepare(std::span<const T> r) override
  {
    if (adaptive_)
    {
      this->weight_ = residual_weights<T>(this->start_vector(r));
    }
  }

  const Vector<T> &weight() const { return this->weight_; }

private:
  bool adaptive_;
};

template <typename T>
BasicSolveReport<T> weighted_gmres(const LinearOperator<T> &A, std::span<const T> b,
                                   std::span<const T> x0, const BasicGmresOptions<T> &opts)
{
  WeightedCycle<T> cycle(A, opts);
  const std::size_t m = opts.restart.value_or(std::max<std::size_t>(opts.max_iter, 1));
  return run_restarted<T>(A, b, x0, opts, cycle, m);
}

}  // namespace krylov

#endif  // KRYLOV_SOLVERS_WEIGHTED_HPP
