// Copyright The Krylov Toolkit Authors.
// SPDX-License-Identifier: Apache-2.0

#ifndef KRYLOV_MIXED_PRECISION_HPP
#define KRYLOV_MIXED_PRECISION_HPP

#include <string>

#include "krylov/core/errors.hpp"

namespace krylov
{

enum class Precision
{
  High,
  Low
};

inline std::string to_string(Precision p) { return p == Precision::High ? "high" : "low"; }

//
// Which format each part of a solve uses. A Low working precision requires the residual and
// the solution update in High; the factory rejects anything else, so an invalid policy
// cannot be constructed.
//
class PrecisionPolicy
{
public:
  static PrecisionPolicy make(Precision working, Precision residual, Precision factorization,
                              Precision solution_update)
  {
    if (working == Precision::Low &&
        (residual != Precision::High || solution_update != Precision::High))
    {
      throw KrylovError("PrecisionPolicy: a low working precision needs the residual and the "
                        "solution update in high precision");
    }
    return PrecisionPolicy(working, residual, factorization, solution_update);
  }

  static PrecisionPolicy all_high()
  {
    return PrecisionPolicy(Precision::High, Precision::High, Precision::High, Precision::High);
  }

  // Low everywhere except residuals and updates.
  static PrecisionPolicy mixed()
  {
    return PrecisionPolicy(Precision::Low, Precision::High, Precision::Low, Precision::High);
  }

  Precision working() const { return working_; }
  Precision residual() const { return residual_; }
  Precision factorization() const { return factorization_; }
  Precision solution_update() const { return solution_update_; }

  bool operator==(const PrecisionPolicy &) const = default;

private:
  PrecisionPolicy(Precision w, Precision r, Precision f, Precision u)
    : working_(w), residual_(r), factorization_(f), solution_update_(u)
  {
  }

  Precision working_;
  Precision residual_;
  Precision factorization_;
  Precision solution_update_;
};

}  // namespace krylov

#endif  // KRYLOV_MIXED_PRECISION_HPP
