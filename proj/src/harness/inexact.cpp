// Copyright The Krylov Toolkit Authors.
// SPDX-License-Identifier: Apache-2.0

#include "krylov/harness/inexact.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "krylov/core/blas.hpp"
#include "krylov/core/errors.hpp"

namespace krylov
{

std::string to_string(PerturbationMode m)
{
  return m == PerturbationMode::Fixed ? "fixed" : "relaxed";
}

void PerturbationSchedule::validate() const
{
  if (!(eta >= 0.0) || !std::isfinite(eta))
  {
    throw KrylovError("PerturbationSchedule: eta must be a finite value >= 0");
  }
  if (mode == PerturbationMode::Relaxed && !(rtol > 0.0))
  {
    throw KrylovError("PerturbationSchedule: relaxed mode needs rtol > 0");
  }
}

struct InexactOperator::State
{
  CsrMatrix<double> A;
  double anorm = 0.0;
  PerturbationSchedule schedule;
  std::mt19937_64 rng;
  double last_rel = 1.0;
  std::size_t products = 0;

  double eta() const
  {
    if (schedule.mode == PerturbationMode::Fixed)
    {
      return schedule.eta;
    }
    if (!(last_rel > 0.0))
    {
      return schedule.eta;
    }
    return schedule.eta * std::min(1.0, schedule.rtol / last_rel);
  }
};

InexactOperator::InexactOperator(const CsrMatrix<double> &A, PerturbationSchedule schedule)
{
  schedule.validate();
  if (A.rows() != A.cols())
  {
    throw DimensionError("inexact_operator: matrix must be square");
  }
  state_ = std::make_shared<State>();
  state_->A = A;
  state_->anorm = A.frobenius_norm();
  state_->schedule = schedule;
  state_->rng.seed(schedule.seed);
  auto st = state_;
  op_ = LinearOperator<double>{A.rows(), [st](std::span<const double> v, std::span<double> y)
                               {
                                 st->A.multiply(v, y);
                                 st->products++;
                                 const double eta = st->eta();
                                 if (eta == 0.0)
                                 {
                                   return;
                                 }
                                 std::normal_distribution<double> normal(0.0, 1.0);
                                 Vector<double> e(v.size());
                                 for (auto &x : e)
                                 {
                                   x = normal(st->rng);
                                 }
                                 const double en = nrm2<double>(e);
                                 if (en == 0.0)
                                 {
                                   return;
                                 }
                                 const double scale = eta * st->anorm * nrm2<double>(v) / en;
                                 axpy<double>(scale, e, y);
                               }};
}

std::function<void(std::size_t, double)> InexactOperator::history_hook(double bnorm) const
{
  auto st = state_;
  return [st, bnorm](std::size_t, double rho) { st->last_rel = bnorm > 0.0 ? rho / bnorm : rho; };
}

double InexactOperator::current_eta() const { return state_->eta(); }

std::size_t InexactOperator::products() const { return state_->products; }

InexactOperator inexact_operator(const CsrMatrix<double> &A, const PerturbationSchedule &schedule)
{
  return InexactOperator(A, schedule);
}

}  // namespace krylov
