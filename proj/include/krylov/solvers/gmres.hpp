// Copyright The Krylov Toolkit Authors.
// SPDX-License-Identifier: Apache-2.0

#ifndef KRYLOV_SOLVERS_GMRES_HPP
#define KRYLOV_SOLVERS_GMRES_HPP

#include <cmath>
#include <cstddef>
#include <span>
#include <string>

#include "krylov/core/blas.hpp"
#include "krylov/core/errors.hpp"
#include "krylov/core/hessenberg_ls.hpp"
#include "krylov/core/operator.hpp"
#include "krylov/ortho/arnoldi.hpp"
#include "krylov/ortho/householder.hpp"
#include "krylov/solvers/driver.hpp"
#include "krylov/solvers/options.hpp"
#include "krylov/solvers/report.hpp"

namespace krylov
{

//
// Shared handling of left and right preconditioning: the Krylov process sees M^{-1}A (left)
// or A M^{-1} (right); left runs monitor ||M^{-1} r||, right runs map the correction back.
//
template <typename T>
class PreconditionedCycle : public CycleVariant<T>
{
public:
  PreconditionedCycle(const LinearOperator<T> &A, const BasicGmresOptions<T> &opts)
    : A_(A), opts_(opts), side_(opts.precond_side), M_(opts.preconditioner)
  {
    switch (side_)
    {
      case PrecondSide::None:
        op_ = A_;
        break;
      case PrecondSide::Left:
        op_ = compose(M_, A_);
        break;
      case PrecondSide::Right:
        op_ = compose(A_, M_);
        break;
    }
  }

  T monitor(std::span<const T> r) const override
  {
    if (side_ == PrecondSide::Left)
    {
      return nrm2<T>(M_(r));
    }
    return nrm2<T>(r);
  }

protected:
  Vector<T> start_vector(std::span<const T> r) const
  {
    if (side_ == PrecondSide::Left)
    {
      return M_(r);
    }
    return Vector<T>(r.begin(), r.end());
  }

  Vector<T> finish(Vector<T> dx) const
  {
    if (side_ == PrecondSide::Right)
    {
      return M_(dx);
    }
    return dx;
  }

  const LinearOperator<T> &A_;
  const BasicGmresOptions<T> &opts_;
  PrecondSide side_;
  LinearOperator<T> M_;
  LinearOperator<T> op_;
};

// GMRES cycle over ArnoldiProcess: any OrthoScheme, optional D-weighted inner product.
template <typename T>
class ArnoldiCycle : public PreconditionedCycle<T>
{
public:
  ArnoldiCycle(const LinearOperator<T> &A, const BasicGmresOptions<T> &opts)
    : PreconditionedCycle<T>(A, opts), weight_(opts.weight)
  {
  }

  T monitor(std::span<const T> r) const override
  {
    if (weight_.empty())
    {
      return PreconditionedCycle<T>::monitor(r);
    }
    return nrm2<T>(this->start_vector(r), weight_);
  }

  CycleResult<T> run_cycle(std::span<const T>, std::span<const T> r, T target,
                           std::size_t max_steps, HistorySink<T> &sink) override
  {
    ArnoldiOptions aopts;
    aopts.scheme = this->opts_.scheme;
    aopts.breakdown_tol = this->opts_.breakdown_tol;
    ArnoldiProcess<T> process(this->op_, aopts, weight_);
    const auto z0 = this->start_vector(r);
    const T beta = process.start(z0);
    sink.add_overhead(process.setup_reductions(), process.matvecs());
    std::size_t matvecs_seen = process.matvecs();
    HessenbergLsState<T> ls(beta, max_steps);
    CycleResult<T> out;
    for (std::size_t j = 0; j < max_steps; j++)
    {
      const auto st = process.step();
      ls.add_column(st.h);
      out.steps++;
      sink.record(static_cast<double>(ls.rho()), st.reductions, process.matvecs() - matvecs_seen);
      matvecs_seen = process.matvecs();
      if (st.breakdown)
      {
        out.happy_breakdown = true;
        break;
      }
      if (ls.rho() <= target)
      {
        break;
      }
    }
    sink.diagnostic("cgsp_retries",
                    sink.diagnostic_or("cgsp_retries", 0.0) + process.cgsp_retries());
    try
    {
      out.dx = this->finish(process.combine(ls.solve()));
    }
    catch (const SingularMatrixError &e)
    {
      out.failed = true;
      out.message = std::string("singular projected matrix: ") + e.what();
    }
    return out;
  }

protected:
  Vector<T> weight_;
};

// GMRES cycle over Householder Arnoldi; the correction is formed by the nested reflector
// product rather than from a stored basis.
template <typename T>
class HouseholderCycle : public PreconditionedCycle<T>
{
public:
  using PreconditionedCycle<T>::PreconditionedCycle;

  CycleResult<T> run_cycle(std::span<const T>, std::span<const T> r, T target,
                           std::size_t max_steps, HistorySink<T> &sink) override
  {
    HouseholderArnoldi<T> process(this->op_, this->opts_.breakdown_tol);
    const auto z0 = this->start_vector(r);
    const T beta = process.start(z0);
    sink.add_overhead(process.setup_reductions());
    HessenbergLsState<T> ls(beta, max_steps);
    CycleResult<T> out;
    for (std::size_t j = 0; j < max_steps && j < this->op_.size; j++)
    {
      const auto st = process.step();
      ls.add_column(st.h);
      out.steps++;
      sink.record(static_cast<double>(ls.rho()), st.reductions, 1);
      if (st.breakdown)
      {
        out.happy_breakdown = true;
        break;
      }
      if (ls.rho() <= target)
      {
        break;
      }
    }
    try
    {
      out.dx = this->finish(process.combine(ls.solve()));
    }
    catch (const SingularMatrixError &e)
    {
      out.failed = true;
      out.message = std::string("singular projected matrix: ") + e.what();
    }
    return out;
  }
};

// Full (unrestarted) GMRES: a single cycle of up to max_iter steps.
template <typename T>
BasicSolveReport<T> gmres(const LinearOperator<T> &A, std::span<const T> b, std::span<const T> x0,
                          const BasicGmresOptions<T> &opts)
{
  ArnoldiCycle<T> cycle(A, opts);
  return run_restarted<T>(A, b, x0, opts, cycle, std::max<std::size_t>(opts.max_iter, 1));
}

// GMRES(m) with m = opts.restart (full GMRES when unset).
template <typename T>
BasicSolveReport<T> gmres_restarted(const LinearOperator<T> &A, std::span<const T> b,
                                    std::span<const T> x0, const BasicGmresOptions<T> &opts)
{
  ArnoldiCycle<T> cycle(A, opts);
  const std::size_t m = opts.restart.value_or(std::max<std::size_t>(opts.max_iter, 1));
  return run_restarted<T>(A, b, x0, opts, cycle, m);
}

template <typename T>
BasicSolveReport<T> hh_gmres(const LinearOperator<T> &A, std::span<const T> b,
                             std::span<const T> x0, const BasicGmresOptions<T> &opts)
{
  HouseholderCycle<T> cycle(A, opts);
  const std::size_t m = opts.restart.value_or(std::max<std::size_t>(opts.max_iter, 1));
  return run_restarted<T>(A, b, x0, opts, cycle, m);
}

inline SolveReport gmres(const CsrMatrix<double> &A, std::span<const double> b,
                         const GmresOptions &opts = {})
{
  return gmres<double>(make_operator(A), b, {}, opts);
}

}  // namespace krylov

#endif  // KRYLOV_SOLVERS_GMRES_HPP
