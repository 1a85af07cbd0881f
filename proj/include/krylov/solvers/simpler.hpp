// Copyright The Krylov Toolkit Authors.
// SPDX-License-Identifier: Apache-2.0

#ifndef KRYLOV_SOLVERS_SIMPLER_HPP
#define KRYLOV_SOLVERS_SIMPLER_HPP

#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <string>

#include "krylov/core/blas.hpp"
#include "krylov/core/dense.hpp"
#include "krylov/core/eig.hpp"
#include "krylov/core/triangular.hpp"
#include "krylov/solvers/gmres.hpp"

namespace krylov
{

enum class SimplerVariant
{
  SGMRES,       // z_j = v_{j-1}
  RB_SGMRES,    // z_j = r_{j-1} / ||r_{j-1}||
  Adaptive      // residual when ||r_{j-1}|| <= omega ||r_{j-2}||, else v_{j-1}
};

// Choice rule for z_j, j >= 2: true selects the normalized residual.
inline bool simpler_takes_residual(SimplerVariant variant, double omega, double rho_prev,
                                   double rho_prev2)
{
  switch (variant)
  {
    case SimplerVariant::SGMRES:
      return false;
    case SimplerVariant::RB_SGMRES:
      return true;
    case SimplerVariant::Adaptive:
      return rho_prev <= omega * rho_prev2;
  }
  return true;
}

//
// Generalized simpler GMRES: A Z_n = V_n T_n with T_n upper triangular; the residual is
// updated directly as r_j = r_{j-1} - alpha_j v_j and T_n y = alpha is solved once at the end.
//
template <typename T>
class SimplerCycle : public PreconditionedCycle<T>
{
public:
  SimplerCycle(const LinearOperator<T> &A, const BasicGmresOptions<T> &opts, SimplerVariant v)
    : PreconditionedCycle<T>(A, opts), variant_(v)
  {
  }

  CycleResult<T> run_cycle(std::span<const T>, std::span<const T> r_in, T target,
                           std::size_t max_steps, HistorySink<T> &sink) override
  {
    const std::size_t N = this->op_.size;
    Vector<T> r = this->start_vector(r_in);
    T rho = nrm2<T>(r);
    sink.add_overhead(1);
    T rho_prev2 = rho;
    DenseMatrix<T> Z(N, 0), V(N, 0);
    DenseMatrix<T> Tm(max_steps, max_steps);
    Vector<T> alpha;
    CycleResult<T> out;
    Vector<T> w(N);
    T t_norm = T(0);
    for (std::size_t j = 0; j < max_steps; j++)
    {
      Vector<T> z(N);
      if (j == 0 || simpler_takes_residual(variant_, this->opts_.simpler_omega,
                                           static_cast<double>(rho),
                                           static_cast<double>(rho_prev2)))
      {
        for (std::size_t i = 0; i < N; i++)
        {
          z[i] = r[i] / rho;
        }
        taken_residual_.push_back(true);
      }
      else
      {
        copy<T>(V.col(j - 1), z);
        taken_residual_.push_back(false);
      }
      this->op_.apply(z, w);
      // MGS against v_1..v_{j-1}: j-1 inner products and one norm.
      std::size_t reductions = 0;
      for (std::size_t i = 0; i < j; i++)
      {
        Tm(i, j) = dot<T>(V.col(i), w);
        axpy<T>(-Tm(i, j), V.col(i), w);
        reductions++;
      }
      const T tjj = nrm2<T>(w);
      reductions++;
      Tm(j, j) = tjj;
      for (std::size_t i = 0; i <= j; i++)
      {
        t_norm = std::max(t_norm, std::abs(Tm(i, j)));
      }
      Z.resize_cols(j + 1);
      copy<T>(z, Z.col(j));
      if (!(tjj > T(1e-14) * t_norm))
      {
        out.failed = true;
        out.message = "simpler GMRES: triangular factor T is singular at column " +
                      std::to_string(j + 1);
        sink.record(static_cast<double>(rho), reductions, 1);
        out.steps++;
        break;
      }
      V.resize_cols(j + 1);
      for (std::size_t i = 0; i < N; i++)
      {
        V(i, j) = w[i] / tjj;
      }
      const T a = dot<T>(r, V.col(j));
      axpy<T>(-a, V.col(j), r);
      alpha.push_back(a);
      rho_prev2 = rho;
      rho = nrm2<T>(r);
      reductions += 2;
      out.steps++;
      sink.record(static_cast<double>(rho), reductions, 1);
      if (rho <= target)
      {
        break;
      }
    }
    const std::size_t n = alpha.size();
    if (n > 0)
    {
      // kappa(Z) from the Gram matrix of the unit-norm columns.
      DenseMatrix<double> G(n, n);
      for (std::size_t j = 0; j < n; j++)
      {
        for (std::size_t i = 0; i < n; i++)
        {
          G(i, j) = static_cast<double>(dot<T>(Z.col(i), Z.col(j)));
        }
      }
      for (std::size_t j = 0; j < n; j++)
      {
        for (std::size_t i = j + 1; i < n; i++)
        {
          G(i, j) = G(j, i) = 0.5 * (G(i, j) + G(j, i));
        }
      }
      const auto ev = dense_eig_symmetric(G);
      const double kappa = ev.front() > 0.0 ? std::sqrt(ev.back() / ev.front())
                                            : std::numeric_limits<double>::infinity();
      sink.diagnostic("kappa_Z", std::max(kappa, sink.diagnostic_or("kappa_Z", 0.0)));
      const auto y = back_substitute<T>(Tm, alpha);
      out.dx = this->finish(matvec(Z, std::span<const T>(y)));
    }
    return out;
  }

  // Per-step record of the z choice (true = normalized residual), across all cycles.
  const std::vector<bool> &residual_choices() const { return taken_residual_; }

private:
  SimplerVariant variant_;
  std::vector<bool> taken_residual_;
};

template <typename T>
BasicSolveReport<T> simpler_gmres(const LinearOperator<T> &A, std::span<const T> b,
                                  std::span<const T> x0, const BasicGmresOptions<T> &opts,
                                  SimplerVariant variant = SimplerVariant::RB_SGMRES)
{
  SimplerCycle<T> cycle(A, opts, variant);
  const std::size_t m = opts.restart.value_or(std::max<std::size_t>(opts.max_iter, 1));
  return run_restarted<T>(A, b, x0, opts, cycle, m);
}

}  // namespace krylov

#endif  // KRYLOV_SOLVERS_SIMPLER_HPP
