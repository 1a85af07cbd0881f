// Copyright The Krylov Toolkit Authors.
// SPDX-License-Identifier: Apache-2.0

#ifndef KRYLOV_SOLVERS_REPORT_HPP
#define KRYLOV_SOLVERS_REPORT_HPP

#include <cstddef>
#include <map>
#include <string>
#include <vector>

#include "krylov/core/blas.hpp"

namespace krylov
{

enum class Termination
{
  Converged,
  MaxIter,
  Breakdown,
  Stagnation
};

inline std::string to_string(Termination t)
{
  switch (t)
  {
    case Termination::Converged:
      return "converged";
    case Termination::MaxIter:
      return "maxiter";
    case Termination::Breakdown:
      return "breakdown";
    case Termination::Stagnation:
      return "stagnation";
  }
  return "unknown";
}

struct Checkpoint
{
  std::size_t iteration = 0;
  double rho = 0.0;            // recurrence estimate at this iteration
  double true_residual = 0.0;  // ||b - A x||_2, explicitly computed
  double true_monitored = 0.0;  // explicit residual in the solver's monitored norm
};

//
// Outcome of one solve. residual_history[0] is the initial residual in the monitored norm and
// entry k the estimate after iteration k; reductions_history is cumulative and aligned with it.
//
template <typename T>
struct BasicSolveReport
{
  Vector<T> x;
  std::vector<double> residual_history;
  std::vector<std::size_t> reductions_history;
  std::vector<Checkpoint> checkpoints;
  std::size_t iterations = 0;
  std::size_t restarts = 0;
  std::size_t reductions = 0;
  std::size_t matvecs = 0;
  Termination termination = Termination::MaxIter;
  bool happy_breakdown = false;
  std::string message;
  std::map<std::string, double> diagnostics;
  std::vector<std::string> warnings;

  bool converged() const { return termination == Termination::Converged; }
  double final_true_residual() const
  {
    return checkpoints.empty() ? 0.0 : checkpoints.back().true_residual;
  }
};

using SolveReport = BasicSolveReport<double>;

}  // namespace krylov

#endif  // KRYLOV_SOLVERS_REPORT_HPP
