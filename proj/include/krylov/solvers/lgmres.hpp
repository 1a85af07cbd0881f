// Copyright The Krylov Toolkit Authors.
// SPDX-License-Identifier: Apache-2.0

#ifndef KRYLOV_SOLVERS_LGMRES_HPP
#define KRYLOV_SOLVERS_LGMRES_HPP

#include <cstddef>
#include <deque>
#include <span>
#include <string>
#include <vector>

#include "krylov/core/blas.hpp"
#include "krylov/core/dense.hpp"
#include "krylov/core/hessenberg_ls.hpp"
#include "krylov/ortho/arnoldi.hpp"
#include "krylov/solvers/gmres.hpp"

namespace krylov
{

template <typename T>
struct AugmentVector
{
  Vector<T> u;
  Vector<T> au;  // A u when already known; empty means it is computed
};

enum class AugmentPlacement
{
  // Augmentation steps occupy positions m1+1.. and trailing Krylov steps fill the rest.
  AfterFirstKrylovBlock,
  // All Krylov steps first, augmentation steps last.
  Trailing
};

//
// Restart cycle over Z_m = [Krylov directions, augmentation vectors] with
// A Z_m = V_{m+1} Hbar_m. Each step records its operand as a column of Z so the relation holds
// whatever the interleaving. A dependent augmentation vector (A u nearly inside span V) is
// dropped and replaced by a Krylov step.
//
template <typename T>
class AugmentedCycle : public CycleVariant<T>
{
public:
  AugmentedCycle(const LinearOperator<T> &A, const BasicGmresOptions<T> &opts, std::size_t m1,
                 std::size_t m2, AugmentPlacement placement)
    : A_(A), opts_(opts), m1_(m1), m2_(m2), placement_(placement)
  {
    if (m1 == 0)
    {
      throw KrylovError("augmented GMRES: m1 must be at least 1");
    }
    if (opts.scheme == OrthoScheme::ICWY)
    {
      throw KrylovError("augmented GMRES: ICWY orthogonalization is not supported");
    }
    if (opts.precond_side != PrecondSide::None)
    {
      throw KrylovError("augmented GMRES: preconditioning is not supported");
    }
  }

  std::size_t cycle_length() const { return m1_ + m2_; }

  CycleResult<T> run_cycle(std::span<const T>, std::span<const T> r, T target,
                           std::size_t max_steps, HistorySink<T> &sink) override
  {
    const std::size_t N = A_.size;
    const std::size_t m = std::min(m1_ + m2_, max_steps);
    auto aug = augmentation();
    const std::size_t a = std::min(aug.size(), m2_);
    ArnoldiOptions aopts;
    aopts.scheme = opts_.scheme;
    aopts.breakdown_tol = opts_.breakdown_tol;
    ArnoldiProcess<T> process(A_, aopts);
    const T beta = process.start(r);
    sink.add_overhead(process.setup_reductions());
    HessenbergLsState<T> ls(beta, m);
    Z_ = DenseMatrix<T>(N, 0);
    CycleResult<T> out;
    std::size_t next_aug = 0;
    Vector<T> w(N);
    for (std::size_t j = 0; j < m; j++)
    {
      bool use_aug = false;
      if (next_aug < a)
      {
        if (placement_ == AugmentPlacement::AfterFirstKrylovBlock)
        {
          use_aug = j + 1 > m1_ && j + 1 - m1_ <= a;
        }
        else
        {
          use_aug = j + a >= m;
        }
      }
      Z_.resize_cols(j + 1);
      ArnoldiStep<T> st;
      std::size_t mv = 0;
      bool dropped = false;
      if (use_aug)
      {
        const auto &av = aug[next_aug++];
        copy<T>(av.u, Z_.col(j));
        if (av.au.empty())
        {
          A_.apply(av.u, w);
          mv = 1;
        }
        else
        {
          copy<T>(av.au, w);
        }
        const T au_norm = nrm2<T>(w);
        st = process.step_with_product(w);
        if (!(st.h.back() > T(1e-12) * au_norm))
        {
          process.drop_last();
          dropped_++;
          dropped = true;
          sink.warn("augmentation vector dropped as linearly dependent");
          sink.diagnostic("dropped_augmentation", static_cast<double>(dropped_));
        }
      }
      if (!use_aug || dropped)
      {
        copy<T>(process.v(j), Z_.col(j));
        A_.apply(process.v(j), w);
        mv += 1;
        st = process.step_with_product(w);
      }
      ls.add_column(st.h);
      out.steps++;
      sink.record(static_cast<double>(ls.rho()), st.reductions, mv);
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
    V_ = process.basis();
    H_ = process.hessenberg();
    try
    {
      y_ = ls.solve();
    }
    catch (const SingularMatrixError &e)
    {
      out.failed = true;
      out.message = std::string("singular projected matrix: ") + e.what();
      return out;
    }
    out.dx = matvec(Z_, std::span<const T>(y_));
    after_cycle(out.dx);
    return out;
  }

  const DenseMatrix<T> &Z() const { return Z_; }
  const DenseMatrix<T> &V() const { return V_; }
  const DenseMatrix<T> &Hbar() const { return H_; }
  std::size_t dropped() const { return dropped_; }

protected:
  // Vectors available for this cycle, in order of use.
  virtual std::vector<AugmentVector<T>> augmentation() = 0;
  virtual void after_cycle(const Vector<T> &dx) = 0;

  const LinearOperator<T> &A_;
  const BasicGmresOptions<T> &opts_;
  std::size_t m1_, m2_;
  AugmentPlacement placement_;
  DenseMatrix<T> Z_, V_, H_;
  Vector<T> y_;
  std::size_t dropped_ = 0;
};

//
// LGMRES(m1, m2): augments with the previous corrections u_k = x_k - x_{k-1}, most recent
// first, stored unnormalized.
//
template <typename T>
class LgmresCycle : public AugmentedCycle<T>
{
public:
  LgmresCycle(const LinearOperator<T> &A, const BasicGmresOptions<T> &opts, std::size_t m1,
              std::size_t m2)
    : AugmentedCycle<T>(A, opts, m1, m2, AugmentPlacement::AfterFirstKrylovBlock)
  {
  }

protected:
  std::vector<AugmentVector<T>> augmentation() override
  {
    std::vector<AugmentVector<T>> out;
    for (const auto &u : history_)
    {
      out.push_back({u, {}});
    }
    return out;
  }

  void after_cycle(const Vector<T> &dx) override
  {
    if (this->m2_ == 0)
    {
      return;
    }
    history_.push_front(dx);
    while (history_.size() > this->m2_)
    {
      history_.pop_back();
    }
  }

private:
  std::deque<Vector<T>> history_;
};

template <typename T>
BasicSolveReport<T> lgmres(const LinearOperator<T> &A, std::span<const T> b,
                           std::span<const T> x0, std::size_t m1, std::size_t m2,
                           const BasicGmresOptions<T> &opts)
{
  LgmresCycle<T> cycle(A, opts, m1, m2);
  return run_restarted<T>(A, b, x0, opts, cycle, m1 + m2);
}

}  // namespace krylov

#endif  // KRYLOV_SOLVERS_LGMRES_HPP
