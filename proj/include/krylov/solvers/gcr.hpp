// Copyright The Krylov Toolkit Authors.
// SPDX-License-Identifier: Apache-2.0

#ifndef KRYLOV_SOLVERS_GCR_HPP
#define KRYLOV_SOLVERS_GCR_HPP

#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "krylov/core/blas.hpp"
#include "krylov/core/dense.hpp"
#include "krylov/solvers/gmres.hpp"

namespace krylov
{

enum class DirectionRule
{
  GCR,       // q_{j+1} = r_{j+1} + sum beta_ij q_i
  ORTHODIR   // q_{j+1} = A q_j + sum beta_ij q_i
};

//
// GCR and ORTHODIR: A-orthogonal search directions (A q_i, A q_j) = 0 with the product
// A q_{j+1} obtained from the same linear combination as q_{j+1}, so each step costs one
// matrix-vector product.
//
template <typename T>
class GcrCycle : public PreconditionedCycle<T>
{
public:
  GcrCycle(const LinearOperator<T> &A, const BasicGmresOptions<T> &opts, DirectionRule rule)
    : PreconditionedCycle<T>(A, opts), rule_(rule)
  {
  }

  CycleResult<T> run_cycle(std::span<const T>, std::span<const T> r_in, T target,
                           std::size_t max_steps, HistorySink<T> &sink) override
  {
    const std::size_t N = this->op_.size;
    Vector<T> r = this->start_vector(r_in);
    Vector<T> dx(N, T(0));
    std::vector<Vector<T>> Q, AQ;
    std::vector<T> aq_norm2;
    Q.push_back(r);
    AQ.push_back(this->op_(r));
    sink.add_overhead(0, 1);
    CycleResult<T> out;
    for (std::size_t j = 0; j < max_steps; j++)
    {
      const T nn = dot<T>(AQ[j], AQ[j]);
      if (!(nn > T(0)))
      {
        out.failed = true;
        out.message = "GCR: A q_0 vanishes";
        break;
      }
      aq_norm2.push_back(nn);
      const T alpha = dot<T>(r, AQ[j]) / nn;
      axpy<T>(alpha, Q[j], dx);
      axpy<T>(-alpha, AQ[j], r);
      const T rho = nrm2<T>(r);
      out.steps++;
      // Step cost: (r, Aq) with (Aq, Aq), then ||r|| with the next beta batch; one product.
      if (rho <= target || j + 1 == max_steps)
      {
        sink.record(static_cast<double>(rho), 2, 0);
        break;
      }
      Vector<T> base = rule_ == DirectionRule::GCR ? r : AQ[j];
      Vector<T> abase = this->op_(base);
      const T abase_norm = nrm2<T>(abase);
      Vector<T> q = base, aq = abase;
      for (std::size_t i = 0; i <= j; i++)
      {
        const T beta = -dot<T>(abase, AQ[i]) / aq_norm2[i];
        axpy<T>(beta, Q[i], q);
        axpy<T>(beta, AQ[i], aq);
      }
      sink.record(static_cast<double>(rho), 2, 1);
      if (!(nrm2<T>(aq) > T(1e-14) * abase_norm))
      {
        out.failed = true;
        out.message = std::string(rule_ == DirectionRule::GCR ? "GCR" : "ORTHODIR") +
                      ": direction collapsed at step " + std::to_string(j + 1) +
                      " (A q vanishes; the symmetric part of A may be indefinite)";
        break;
      }
      Q.push_back(std::move(q));
      AQ.push_back(std::move(aq));
    }
    last_AQ_ = AQ;
    out.dx = this->finish(std::move(dx));
    return out;
  }

  // Products A q_j of the most recent cycle, for orthogonality audits.
  const std::vector<Vector<T>> &last_directions_product() const { return last_AQ_; }

private:
  DirectionRule rule_;
  std::vector<Vector<T>> last_AQ_;
};

template <typename T>
BasicSolveReport<T> gcr(const LinearOperator<T> &A, std::span<const T> b, std::span<const T> x0,
                        const BasicGmresOptions<T> &opts)
{
  GcrCycle<T> cycle(A, opts, DirectionRule::GCR);
  const std::size_t m = opts.restart.value_or(std::max<std::size_t>(opts.max_iter, 1));
  return run_restarted<T>(A, b, x0, opts, cycle, m);
}

template <typename T>
BasicSolveReport<T> orthodir(const LinearOperator<T> &A, std::span<const T> b,
                             std::span<const T> x0, const BasicGmresOptions<T> &opts)
{
  GcrCycle<T> cycle(A, opts, DirectionRule::ORTHODIR);
  const std::size_t m = opts.restart.value_or(std::max<std::size_t>(opts.max_iter, 1));
  return run_restarted<T>(A, b, x0, opts, cycle, m);
}

}  // namespace krylov

#endif  // KRYLOV_SOLVERS_GCR_HPP
