// Copyright The Krylov Toolkit Authors.
// SPDX-License-Identifier: Apache-2.0

#ifndef KRYLOV_CA_SOLVERS_HPP
#define KRYLOV_CA_SOLVERS_HPP

#include <cstddef>
#include <optional>
#include <span>

#include "krylov/ca/basis.hpp"
#include "krylov/core/operator.hpp"
#include "krylov/solvers/driver.hpp"
#include "krylov/solvers/options.hpp"
#include "krylov/solvers/report.hpp"

namespace krylov
{

struct SstepOptions
{
  std::size_t s = 4;
  std::size_t t = 5;  // blocks per restart cycle, m = s t
  BasisSpec basis = BasisSpec::monomial();
  std::size_t tsqr_blocks = 4;
  // A block whose new triangular factor has |T(p,p)| <= this times the column norm is cut at
  // p and treated as an invariant subspace.
  double rank_tol = 1e-12;
};

//
// s-step GMRES. Each block builds s basis vectors from the last orthonormal vector, projects
// them against the current basis in one batch (BGS), factors them by TSQR, and updates
// Hbar = T Bbar T^{-1}. Two reductions per block; the basis products are counted as one
// matrix-powers message per block (diagnostic "mpk_messages").
//
class SstepCycle : public CycleVariant<double>
{
public:
  SstepCycle(const LinearOperator<double> &A, const GmresOptions &opts, SstepOptions sopts);

  CycleResult<double> run_cycle(std::span<const double> x, std::span<const double> r,
                                double target, std::size_t max_steps,
                                HistorySink<double> &sink) override;

  const BasisSpec &resolved_basis() const { return spec_; }
  const DenseMatrix<double> &V() const { return V_; }
  const DenseMatrix<double> &Hbar() const { return H_; }

private:
  const LinearOperator<double> &A_;
  const GmresOptions &opts_;
  SstepOptions sopts_;
  BasisSpec spec_;
  bool resolved_ = false;
  DenseMatrix<double> V_, H_;
};

SolveReport sstep_gmres(const LinearOperator<double> &A, std::span<const double> b,
                        std::span<const double> x0, const SstepOptions &sopts,
                        const GmresOptions &opts);

//
// Pipelined GMRES with shift theta: w_j = (A - theta I) v_j is carried by a recurrence so the
// inner products (w_j, v_i) and (w_j, w_j) form one reduction, and the new norm follows from
// the Pythagorean identity. A radicand at or below cgsp_retry_threshold ||w_j||^2 triggers one
// CGS2 recomputation of the step (two extra reductions and one extra product).
//
struct PipelinedOptions
{
  // Unset: mean of the Ritz values from warmup_steps MGS Arnoldi steps.
  std::optional<double> theta;
  std::size_t warmup_steps = 8;
  double retry_threshold = 1e-10;
  int max_retries = 1;
};

class PipelinedCycle : public CycleVariant<double>
{
public:
  PipelinedCycle(const LinearOperator<double> &A, const GmresOptions &opts,
                 PipelinedOptions popts);

  CycleResult<double> run_cycle(std::span<const double> x, std::span<const double> r,
                                double target, std::size_t max_steps,
                                HistorySink<double> &sink) override;

  double theta() const { return theta_.value_or(0.0); }
  const DenseMatrix<double> &V() const { return V_; }
  const DenseMatrix<double> &Hbar() const { return H_; }

private:
  const LinearOperator<double> &A_;
  const GmresOptions &opts_;
  PipelinedOptions popts_;
  std::optional<double> theta_;
  int retries_ = 0;
  DenseMatrix<double> V_, H_;
};

SolveReport pipelined_gmres(const LinearOperator<double> &A, std::span<const double> b,
                            std::span<const double> x0, const GmresOptions &opts,
                            const PipelinedOptions &popts = {});

// Low-sync GMRES: ICWY-MGS projection with delayed normalization, one reduction per step.
// Restarts follow opts.restart; the orthogonalization scheme in opts is ignored.
SolveReport lowsync_gmres(const LinearOperator<double> &A, std::span<const double> b,
                          std::span<const double> x0, const GmresOptions &opts);

}  // namespace krylov

#endif  // KRYLOV_CA_SOLVERS_HPP
