// Copyright The Krylov Toolkit Authors.
// SPDX-License-Identifier: Apache-2.0

#include "krylov/ca/solvers.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "krylov/ca/tsqr.hpp"
#include "krylov/core/blas.hpp"
#include "krylov/core/errors.hpp"
#include "krylov/core/hessenberg_ls.hpp"
#include "krylov/core/triangular.hpp"
#include "krylov/solvers/gmres.hpp"

namespace krylov
{

namespace
{

void require_plain(const GmresOptions &opts, const char *who)
{
  if (opts.precond_side != PrecondSide::None)
  {
    throw KrylovError(std::string(who) + ": preconditioning is not supported");
  }
  if (!opts.weight.empty())
  {
    throw KrylovError(std::string(who) + ": weighted inner products are not supported");
  }
}

void bump(HistorySink<double> &sink, const std::string &key, double by = 1.0)
{
  sink.diagnostic(key, sink.diagnostic_or(key, 0.0) + by);
}

}  // namespace

// ---------------------------------------------------------------------------------------------
// s-step GMRES

SstepCycle::SstepCycle(const LinearOperator<double> &A, const GmresOptions &opts,
                       SstepOptions sopts)
  : A_(A), opts_(opts), sopts_(std::move(sopts)), spec_(sopts_.basis)
{
  require_plain(opts, "s-step GMRES");
  if (sopts_.s == 0 || sopts_.t == 0)
  {
    throw KrylovError("s-step GMRES: s and t must be at least 1");
  }
  spec_.validate();
}

CycleResult<double> SstepCycle::run_cycle(std::span<const double>, std::span<const double> r,
                                          double target, std::size_t max_steps,
                                          HistorySink<double> &sink)
{
  const std::size_t N = A_.size;
  const std::size_t s = sopts_.s;
  if (!resolved_)
  {
    if (spec_.needs_estimate())
    {
      auto est = warmup_ritz(A_, r, s);
      sink.add_overhead(est.reductions, est.matvecs);
      spec_ = resolve_spec(spec_, est.values);
    }
    resolved_ = true;
  }

  const double beta = nrm2<double>(r);
  sink.add_overhead(1);
  V_ = DenseMatrix<double>(N, 1);
  for (std::size_t i = 0; i < N; i++)
  {
    V_(i, 0) = r[i] / beta;
  }
  H_ = DenseMatrix<double>(1, 0);
  HessenbergLsState<double> ls(beta, max_steps);
  CycleResult<double> out;

  std::size_t steps = 0;
  bool stop = false;
  while (steps < max_steps && !stop)
  {
    const std::size_t sb = std::min(s, max_steps - steps);
    const std::size_t k0 = steps;
    const std::size_t nb = k0 + 1;

    auto basis = detail::build_basis_allow_zero(A_, V_.col(k0), sb, spec_);
    bump(sink, "mpk_messages");
    DenseMatrix<double> Wa = basis.W.block(0, 1, N, sb);

    // Reduction 1: the BGS batch, which also carries the column norms for the rank test.
    std::vector<double> wnorm(sb);
    for (std::size_t p = 0; p < sb; p++)
    {
      wnorm[p] = nrm2<double>(Wa.col(p));
    }
    const DenseMatrix<double> Ra = bgs_project(V_, Wa);

    // Reduction 2: TSQR of the projected block.
    const auto tree = tsqr(Wa, tsqr_feasible_blocks(N, sb, sopts_.tsqr_blocks));
    const DenseMatrix<double> Q = tree.explicit_q();
    DenseMatrix<double> Ta = tree.R;

    std::size_t se = sb;
    bool invariant = false;
    for (std::size_t p = 0; p < sb; p++)
    {
      if (!(Ta(p, p) > sopts_.rank_tol * wnorm[p]))
      {
        se = p + 1;
        invariant = true;
        if (wnorm[p] > 0.0 && Ta(p, p) > 0.0)
        {
          sink.warn("s-step GMRES: basis block numerically rank deficient at step " +
                    std::to_string(k0 + p + 1) + "; block cut short, consider a smaller s " +
                    "or a Newton/Chebyshev basis");
          bump(sink, "sstep_truncations");
        }
        Ta(p, p) = 0.0;
        break;
      }
    }

    // Hbar_K = T_{K+1} Bbar_K T_K^{-1} with T = [I R; 0 T'] and Bbar = [H_old 0; eta e1 e^T B].
    const std::size_t K = k0 + se;
    DenseMatrix<double> T(K + 1, K + 1);
    for (std::size_t i = 0; i < nb; i++)
    {
      T(i, i) = 1.0;
      for (std::size_t b = 0; b < se; b++)
      {
        T(i, nb + b) = Ra(i, b);
      }
    }
    for (std::size_t b = 0; b < se; b++)
    {
      for (std::size_t a = 0; a <= b; a++)
      {
        T(nb + a, nb + b) = Ta(a, b);
      }
    }
    DenseMatrix<double> B(K + 1, K);
    B.set_block(0, 0, H_);
    for (std::size_t b = 0; b < se; b++)
    {
      for (std::size_t a = 0; a <= se; a++)
      {
        B(k0 + a, k0 + b) = basis.Bbar(a, b);
      }
    }
    const auto Tinv = upper_triangular_inverse<double>(T.block(0, 0, K, K));
    DenseMatrix<double> Hn = matmul(matmul(T, B), Tinv);
    Hn.set_block(0, 0, H_);
    for (std::size_t c = k0; c < K; c++)
    {
      for (std::size_t i = c + 2; i <= K; i++)
      {
        Hn(i, c) = 0.0;
      }
    }
    if (invariant)
    {
      Hn(K, K - 1) = 0.0;
    }
    H_ = std::move(Hn);
    V_.resize_cols(nb + se);
    for (std::size_t b = 0; b < se; b++)
    {
      copy<double>(Q.col(b), V_.col(nb + b));
    }

    std::size_t recorded = 0;
    for (std::size_t c = k0; c < K; c++)
    {
      Vector<double> col(c + 2);
      for (std::size_t i = 0; i <= c + 1; i++)
      {
        col[i] = H_(i, c);
      }
      ls.add_column(col);
      out.steps++;
      recorded++;
      sink.record(ls.rho(), c == k0 ? 2 : 0, 1);
      if (ls.rho() <= target)
      {
        stop = true;
        break;
      }
    }
    if (basis.matvecs > recorded)
    {
      sink.add_overhead(0, basis.matvecs - recorded);
    }
    steps = k0 + recorded;
    if (invariant && !stop)
    {
      out.happy_breakdown = true;
      stop = true;
    }
  }

  try
  {
    const auto y = ls.solve();
    out.dx = matvec(leading_columns(V_, out.steps), std::span<const double>(y));
  }
  catch (const SingularMatrixError &e)
  {
    out.failed = true;
    out.message = std::string("singular projected matrix: ") + e.what();
  }
  return out;
}

SolveReport sstep_gmres(const LinearOperator<double> &A, std::span<const double> b,
                        std::span<const double> x0, const SstepOptions &sopts,
                        const GmresOptions &opts)
{
  SstepCycle cycle(A, opts, sopts);
  auto report = run_restarted<double>(A, b, x0, opts, cycle, sopts.s * sopts.t);
  report.diagnostics["s"] = static_cast<double>(sopts.s);
  return report;
}

// ---------------------------------------------------------------------------------------------
// Pipelined GMRES

PipelinedCycle::PipelinedCycle(const LinearOperator<double> &A, const GmresOptions &opts,
                               PipelinedOptions popts)
  : A_(A), opts_(opts), popts_(popts), theta_(popts.theta)
{
  require_plain(opts, "pipelined GMRES");
}

CycleResult<double> PipelinedCycle::run_cycle(std::span<const double>,
                                              std::span<const double> r, double target,
                                              std::size_t max_steps, HistorySink<double> &sink)
{
  const std::size_t N = A_.size;
  if (!theta_)
  {
    auto est = warmup_ritz(A_, r, popts_.warmup_steps);
    sink.add_overhead(est.reductions, est.matvecs);
    double mean = 0.0;
    for (auto z : est.values)
    {
      mean += z.real();
    }
    theta_ = est.values.empty() ? 0.0 : mean / static_cast<double>(est.values.size());
  }
  const double theta = *theta_;
  sink.diagnostic("theta", theta);

  const double beta = nrm2<double>(r);
  V_ = DenseMatrix<double>(N, 1);
  for (std::size_t i = 0; i < N; i++)
  {
    V_(i, 0) = r[i] / beta;
  }
  // W holds w_j = (A - theta I) v_j.
  DenseMatrix<double> W(N, 1);
  A_.apply(V_.col(0), W.col(0));
  axpy<double>(-theta, V_.col(0), W.col(0));
  sink.add_overhead(1, 1);

  HessenbergLsState<double> ls(beta, max_steps);
  std::vector<Vector<double>> cols;
  CycleResult<double> out;
  Vector<double> u(N), z(N);
  retries_ = 0;

  for (std::size_t j = 0; j < max_steps; j++)
  {
    const std::size_t k = j + 1;
    auto wj = W.col(j);
    // Single reduction: (w_j, v_i) for i <= j and (w_j, w_j).
    Vector<double> h(k + 1, 0.0);
    for (std::size_t i = 0; i < k; i++)
    {
      h[i] = dot<double>(wj, V_.col(i));
    }
    const double varsigma = dot<double>(wj, wj);
    A_.apply(wj, u);
    std::size_t reductions = 1, matvecs = 1;

    double radicand = varsigma;
    for (std::size_t i = 0; i < k; i++)
    {
      radicand -= h[i] * h[i];
    }
    copy<double>(wj, z);
    for (std::size_t i = 0; i < k; i++)
    {
      axpy<double>(-h[i], V_.col(i), z);
    }
    double hn = 0.0;
    bool recomputed = false;
    if (radicand > popts_.retry_threshold * varsigma)
    {
      hn = std::sqrt(radicand);
    }
    else if (retries_ < popts_.max_retries)
    {
      retries_++;
      recomputed = true;
      Vector<double> c(k);
      for (std::size_t i = 0; i < k; i++)
      {
        c[i] = dot<double>(V_.col(i), z);
      }
      for (std::size_t i = 0; i < k; i++)
      {
        axpy<double>(-c[i], V_.col(i), z);
        h[i] += c[i];
      }
      hn = nrm2<double>(z);
      reductions += 2;
    }
    else if (radicand < 0.0)
    {
      out.failed = true;
      out.message = "pipelined GMRES: negative radicand at step " + std::to_string(k) +
                    " after exhausting reorthogonalization retries";
      sink.warn(out.message);
      break;
    }
    else
    {
      hn = std::sqrt(radicand);
    }
    const bool breakdown = !(hn > opts_.breakdown_tol * std::sqrt(varsigma));
    if (recomputed && !breakdown)
    {
      sink.warn("pipelined GMRES: radicand lost accuracy at step " + std::to_string(k) +
                "; step recomputed with CGS2");
      bump(sink, "pipelined_retries");
    }

    h[k] = breakdown ? 0.0 : hn;
    Vector<double> hcol = h;
    hcol[j] += theta;
    cols.push_back(hcol);
    ls.add_column(hcol);
    out.steps++;

    if (!breakdown)
    {
      V_.resize_cols(k + 1);
      auto vn = V_.col(k);
      for (std::size_t i = 0; i < N; i++)
      {
        vn[i] = z[i] / hn;
      }
      W.resize_cols(k + 1);
      auto wn = W.col(k);
      if (recomputed)
      {
        A_.apply(V_.col(k), wn);
        axpy<double>(-theta, V_.col(k), wn);
        matvecs++;
      }
      else
      {
        for (std::size_t i = 0; i < N; i++)
        {
          wn[i] = u[i] / hn;
        }
        for (std::size_t i = 0; i < k; i++)
        {
          axpy<double>(-hcol[i] / hn, W.col(i), wn);
        }
      }
    }
    sink.record(ls.rho(), reductions, matvecs);
    if (breakdown)
    {
      out.happy_breakdown = true;
      break;
    }
    if (ls.rho() <= target)
    {
      break;
    }
  }

  H_ = DenseMatrix<double>(cols.size() + 1, cols.size());
  for (std::size_t c = 0; c < cols.size(); c++)
  {
    for (std::size_t i = 0; i < cols[c].size(); i++)
    {
      H_(i, c) = cols[c][i];
    }
  }
  if (out.steps == 0)
  {
    return out;
  }
  try
  {
    const auto y = ls.solve();
    out.dx = matvec(leading_columns(V_, out.steps), std::span<const double>(y));
  }
  catch (const SingularMatrixError &e)
  {
    out.failed = true;
    out.message = std::string("singular projected matrix: ") + e.what();
  }
  return out;
}

SolveReport pipelined_gmres(const LinearOperator<double> &A, std::span<const double> b,
                            std::span<const double> x0, const GmresOptions &opts,
                            const PipelinedOptions &popts)
{
  PipelinedCycle cycle(A, opts, popts);
  const std::size_t m = opts.restart.value_or(std::max<std::size_t>(opts.max_iter, 1));
  return run_restarted<double>(A, b, x0, opts, cycle, m);
}

// ---------------------------------------------------------------------------------------------
// Low-sync GMRES

SolveReport lowsync_gmres(const LinearOperator<double> &A, std::span<const double> b,
                          std::span<const double> x0, const GmresOptions &opts)
{
  GmresOptions o = opts;
  o.scheme = OrthoScheme::ICWY;
  ArnoldiCycle<double> cycle(A, o);
  const std::size_t m = o.restart.value_or(std::max<std::size_t>(o.max_iter, 1));
  return run_restarted<double>(A, b, x0, o, cycle, m);
}

}  // namespace krylov
