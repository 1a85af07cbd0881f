// Copyright The Krylov Toolkit Authors.
// SPDX-License-Identifier: Apache-2.0

#ifndef KRYLOV_SOLVERS_OPTIONS_HPP
#define KRYLOV_SOLVERS_OPTIONS_HPP

#include <cstddef>
#include <functional>
#include <optional>
#include <string>

#include "krylov/core/blas.hpp"
#include "krylov/core/errors.hpp"
#include "krylov/core/operator.hpp"
#include "krylov/ortho/scheme.hpp"

namespace krylov
{

enum class PrecondSide
{
  None,
  Left,
  Right
};

// A preconditioner is an operator applying M^{-1}.
template <typename T>
using Preconditioner = LinearOperator<T>;

template <typename T>
struct BasicGmresOptions
{
  // Converged when the residual in the monitored norm is <= rtol times that of b.
  double rtol = 1e-8;
  std::size_t max_iter = 1000;
  std::optional<std::size_t> restart;
  OrthoScheme scheme = OrthoScheme::MGS;
  PrecondSide precond_side = PrecondSide::None;
  Preconditioner<T> preconditioner;
  // Diagonal of D for the weighted inner product; empty means Euclidean.
  Vector<T> weight;
  // Weighted solver: refresh D from the residual at every restart.
  bool weight_adaptive = false;
  // Adaptive simpler GMRES switch parameter in [0, 1].
  double simpler_omega = 0.5;
  double breakdown_tol = 1e-14;
  // Called after every iteration with (iteration, rho).
  std::function<void(std::size_t, double)> on_iteration;

  void validate(std::size_t n) const
  {
    if (!(rtol > 0.0))
    {
      throw KrylovError("GmresOptions: rtol must be positive");
    }
    if (restart && *restart == 0)
    {
      throw KrylovError("GmresOptions: restart length must be at least 1");
    }
    if (!(simpler_omega >= 0.0 && simpler_omega <= 1.0))
    {
      throw KrylovError("GmresOptions: simpler_omega must lie in [0, 1]");
    }
    if (precond_side != PrecondSide::None)
    {
      if (!preconditioner || preconditioner.size != n)
      {
        throw KrylovError("GmresOptions: preconditioner missing or of wrong size");
      }
    }
    if (!weight.empty())
    {
      if (weight.size() != n)
      {
        throw DimensionError("GmresOptions: weight length differs from system size");
      }
      for (auto d : weight)
      {
        if (!(d > T(0)))
        {
          throw KrylovError("GmresOptions: weights must be positive");
        }
      }
    }
  }
};

using GmresOptions = BasicGmresOptions<double>;

}  // namespace krylov

#endif  // KRYLOV_SOLVERS_OPTIONS_HPP
