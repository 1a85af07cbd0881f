// Copyright The Krylov Toolkit Authors.
// SPDX-License-Identifier: Apache-2.0

#ifndef KRYLOV_HARNESS_INEXACT_HPP
#define KRYLOV_HARNESS_INEXACT_HPP

#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <string>

#include "krylov/core/csr.hpp"
#include "krylov/core/operator.hpp"

namespace krylov
{

enum class PerturbationMode
{
  Fixed,
  Relaxed
};

std::string to_string(PerturbationMode m);

struct PerturbationSchedule
{
  PerturbationMode mode = PerturbationMode::Fixed;
  double eta = 0.0;
  std::uint64_t seed = 0;
  // Relaxed mode: eta_j = eta min(1, rtol / rho_{j-1}) with rho relative to ||b||.
  double rtol = 1e-8;

  void validate() const;
};

//
// Product (A + E_j) v with a seeded random E_j v of norm eta_j ||A||_F ||v||. The history
// hook feeds the current residual estimate back so relaxed mode can grow eta_j as the
// iteration converges. Copies share the random stream and the residual state.
//
class InexactOperator
{
public:
  InexactOperator(const CsrMatrix<double> &A, PerturbationSchedule schedule);

  const LinearOperator<double> &op() const { return op_; }

  // Callback for GmresOptions::on_iteration; rho is divided by bnorm.
  std::function<void(std::size_t, double)> history_hook(double bnorm) const;

  // eta_j the next product will use.
  double current_eta() const;
  std::size_t products() const;

private:
  struct State;
  std::shared_ptr<State> state_;
  LinearOperator<double> op_;
};

InexactOperator inexact_operator(const CsrMatrix<double> &A, const PerturbationSchedule &schedule);

}  // namespace krylov

#endif  // KRYLOV_HARNESS_INEXACT_HPP
