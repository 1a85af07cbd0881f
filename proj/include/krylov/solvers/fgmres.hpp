// Copyright The Krylov Toolkit Authors.
// SPDX-License-Identifier: Apache-2.0

#ifndef KRYLOV_SOLVERS_FGMRES_HPP
#define KRYLOV_SOLVERS_FGMRES_HPP

#include <cstddef>
#include <functional>
#include <span>
#include <string>

#include "krylov/core/blas.hpp"
#include "krylov/core/dense.hpp"
#include "krylov/core/hessenberg_ls.hpp"
#include "krylov/ortho/arnoldi.hpp"
#include "krylov/solvers/gmres.hpp"

namespace krylov
{

// z = M_j^{-1} v for the j-th step (0-based, counted over the whole solve).
template <typename T>
using FlexiblePreconditioner =
    std::function<void(std::size_t step, std::span<const T> v, std::span<T> z)>;

//
// Flexible GMRES: the preconditioned vectors z_j are stored and x = x0 + Z_n y, so that
// A Z_n = V_{n+1} Hbar_n holds for a preconditioner that changes every step.
//
template <typename T>
class FlexibleCycle : public CycleVariant<T>
{
public:
  FlexibleCycle(const LinearOperator<T> &A, const BasicGmresOptions<T> &opts,
                FlexiblePreconditioner<T> precond)
    : A_(A), opts_(opts), precond_(std::move(precond))
  {
    if (opts.scheme == OrthoScheme::ICWY)
    {
      throw KrylovError("FGMRES: ICWY orthogonalization is not supported");
    }
  }

  CycleResult<T> run_cycle(std::span<const T>, std::span<const T> r, T target,
                           std::size_t max_steps, HistorySink<T> &sink) override
  {
    const std::size_t N = A_.size;
    ArnoldiOptions aopts;
    aopts.scheme = opts_.scheme;
    aopts.breakdown_tol = opts_.breakdown_tol;
    ArnoldiProcess<T> process(A_, aopts);
    const T beta = process.start(r);
    sink.add_overhead(process.setup_reductions());
    HessenbergLsState<T> ls(beta, max_steps);
    Z_ = DenseMatrix<T>(N, 0);
    CycleResult<T> out;
    Vector<T> w(N);
    for (std::size_t j = 0; j < max_steps; j++)
    {
      Z_.resize_cols(j + 1);
      if (precond_)
      {
        precond_(global_step_, process.v(j), Z_.col(j));
      }
      else
      {
        copy<T>(process.v(j), Z_.col(j));
      }
      global_step_++;
      A_.apply(Z_.col(j), w);
      const auto st = process.step_with_product(w);
      ls.add_column(st.h);
      out.steps++;
      sink.record(static_cast<double>(ls.rho()), st.reductions, 1);
      if (st.breakdown)
      {
        // With a varying preconditioner h_{j+1,j} = 0 does not imply convergence; it does
        // only when H_j is nonsingular.
        if (!(ls.min_diagonal_ratio() > 1e-14))
        {
          out.failed = true;
          out.message = "FGMRES: breakdown with singular H_j at step " + std::to_string(j + 1);
          V_ = process.basis();
          H_ = process.hessenberg();
          return out;
        }
        out.happy_breakdown = true;
        break;
      }
      if (ls.rho() <= target)
      {
        break;
      }
    }
    V_ = process.basis();
    H_ = process.hessenberg();
    const auto y = ls.solve();
    out.dx = matvec(Z_, std::span<const T>(y));
    return out;
  }

  // Z, V and Hbar of the most recent cycle, for relation audits.
  const DenseMatrix<T> &Z() const { return Z_; }
  const DenseMatrix<T> &V() const { return V_; }
  const DenseMatrix<T> &Hbar() const { return H_; }

private:
  const LinearOperator<T> &A_;
  const BasicGmresOptions<T> &opts_;
  FlexiblePreconditioner<T> precond_;
  std::size_t global_step_ = 0;
  DenseMatrix<T> Z_, V_, H_;
};

template <typename T>
BasicSolveReport<T> fgmres(const LinearOperator<T> &A, std::span<const T> b,
                           std::span<const T> x0, const BasicGmresOptions<T> &opts,
                           FlexiblePreconditioner<T> precond)
{
  FlexibleCycle<T> cycle(A, opts, std::move(precond));
  const std::size_t m = opts.restart.value_or(std::max<std::size_t>(opts.max_iter, 1));
  return run_restarted<T>(A, b, x0, opts, cycle, m);
}

// Wraps a fixed preconditioner as a flexible one.
template <typename T>
FlexiblePreconditioner<T> fixed_flexible(Preconditioner<T> M)
{
  return [M](std::size_t, std::span<const T> v, std::span<T> z) { M.apply(v, z); };
}

}  // namespace krylov

#endif  // KRYLOV_SOLVERS_FGMRES_HPP
