// Copyright The Krylov Toolkit Authors.
// SPDX-License-Identifier: Apache-2.0

#ifndef KRYLOV_MIXED_GMRES_IR_HPP
#define KRYLOV_MIXED_GMRES_IR_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <span>
#include <string>
#include <type_traits>

#include "krylov/core/blas.hpp"
#include "krylov/core/csr.hpp"
#include "krylov/core/dense.hpp"
#include "krylov/core/errors.hpp"
#include "krylov/core/lu.hpp"
#include "krylov/core/operator.hpp"
#include "krylov/mixed/precision.hpp"
#include "krylov/solvers/gmres.hpp"

namespace krylov
{

// LU factors held in format Low.
template <typename Low = float>
struct LowLU
{
  LuFactorization<Low> factors;
  double growth_factor = 1.0;

  std::size_t size() const { return factors.size(); }
  Vector<Low> solve(std::span<const Low> b) const { return factors.solve(b); }
};

template <typename Low = float>
LowLU<Low> lu_low(const DenseMatrix<double> &A)
{
  if (A.rows() != A.cols())
  {
    throw DimensionError("lu_low: matrix must be square");
  }
  for (double v : A.values())
  {
    if (!(std::abs(v) <= static_cast<double>(std::numeric_limits<Low>::max())))
    {
      throw KrylovError("lu_low: entry not representable in the low format");
    }
  }
  try
  {
    LowLU<Low> out{LuFactorization<Low>(A.template cast<Low>()), 1.0};
    out.growth_factor = static_cast<double>(out.factors.growth_factor());
    return out;
  }
  catch (const SingularMatrixError &e)
  {
    throw SingularMatrixError("lu_low: matrix is singular to low precision (zero pivot in "
                              "column " + std::to_string(e.index()) + ")",
                              e.index());
  }
}

struct IrOptions
{
  // Converged when the high-precision ||b - A x_k|| <= rtol ||b||.
  double rtol = 1e-12;
  std::size_t max_refinements = 40;
  double inner_rtol = 1e-4;
  std::size_t inner_restart = 50;
  std::size_t inner_max_iter = 500;
  OrthoScheme inner_scheme = OrthoScheme::MGS;
};

namespace detail
{

template <typename To, typename From>
Vector<To> scaled_cast(std::span<const From> x, double scale)
{
  Vector<To> out(x.size());
  for (std::size_t i = 0; i < x.size(); i++)
  {
    out[i] = static_cast<To>(static_cast<double>(x[i]) * scale);
  }
  return out;
}

// Factorization in TF, inner GMRES in TW.
template <typename TW, typename TF>
SolveReport gmres_ir_impl(const DenseMatrix<double> &A, std::span<const double> b,
                          const PrecisionPolicy &policy, const IrOptions &opts)
{
  const std::size_t n = A.rows();
  if (A.cols() != n)
  {
    throw DimensionError("gmres_ir: matrix must be square");
  }
  detail::check_same_size(b.size(), n, "gmres_ir: right-hand side");

  SolveReport report;
  report.x.assign(n, 0.0);
  const double bnorm = nrm2<double>(b);
  if (bnorm == 0.0)
  {
    report.termination = Termination::Converged;
    report.residual_history.assign(1, 0.0);
    report.message = "zero right-hand side";
    return report;
  }

  // Line 1: factorization.
  LuFactorization<TF> lu;
  if constexpr (std::is_same_v<TF, double>)
  {
    lu = LuFactorization<double>(A);
  }
  else
  {
    lu = lu_low<TF>(A).factors;
  }
  report.diagnostics["growth_factor"] = static_cast<double>(lu.growth_factor());

  const auto A_high = make_operator(A);
  const auto A_low = make_operator(A.template cast<float>());
  const auto A_work = make_operator(A.template cast<TW>());
  auto M = LinearOperator<TW>{n, [lu](std::span<const TW> v, std::span<TW> z)
                              {
                                Vector<TF> vf(v.size());
                                for (std::size_t i = 0; i < v.size(); i++)
                                {
                                  vf[i] = static_cast<TF>(v[i]);
                                }
                                const auto zf = lu.solve(vf);
                                for (std::size_t i = 0; i < z.size(); i++)
                                {
                                  z[i] = static_cast<TW>(zf[i]);
                                }
                              }};

  auto residual = [&](Vector<double> &r)
  {
    if (policy.residual() == Precision::High)
    {
      A_high.apply(report.x, r);
      for (std::size_t i = 0; i < n; i++)
      {
        r[i] = b[i] - r[i];
      }
    }
    else
    {
      Vector<float> xl(report.x.begin(), report.x.end()), yl(n);
      A_low.apply(xl, yl);
      for (std::size_t i = 0; i < n; i++)
      {
        r[i] = static_cast<double>(static_cast<float>(b[i]) - yl[i]);
      }
    }
  };
  auto update = [&](std::span<const double> d)
  {
    for (std::size_t i = 0; i < n; i++)
    {
      report.x[i] += d[i];
      if (policy.solution_update() == Precision::Low)
      {
        report.x[i] = static_cast<double>(static_cast<float>(report.x[i]));
      }
    }
  };

  // Line 2: x0 from the factors alone.
  {
    Vector<TF> bf(b.begin(), b.end());
    const auto x0 = lu.solve(bf);
    const Vector<double> d(x0.begin(), x0.end());
    update(d);
  }
  // Line 3.
  Vector<double> r(n);
  residual(r);
  double rnorm = nrm2<double>(r);
  report.residual_history.push_back(rnorm);
  report.checkpoints.push_back({0, rnorm, rnorm, rnorm});

  BasicGmresOptions<TW> inner;
  inner.rtol = opts.inner_rtol;
  inner.restart = opts.inner_restart;
  inner.max_iter = opts.inner_max_iter;
  inner.scheme = opts.inner_scheme;
  inner.precond_side = PrecondSide::Left;
  inner.preconditioner = M;

  std::size_t refinements = 0;
  report.termination = Termination::MaxIter;
  report.message = "refinement limit reached";
  while (true)
  {
    if (rnorm <= opts.rtol * bnorm)
    {
      report.termination = Termination::Converged;
      report.message = "converged";
      break;
    }
    if (refinements >= opts.max_refinements)
    {
      break;
    }
    // Line 5: inner solve on the normalized residual, in TW.
    const auto rw = scaled_cast<TW, double>(r, 1.0 / rnorm);
    const auto in = gmres_restarted<TW>(A_work, rw, {}, inner);
    refinements++;
    report.iterations += in.iterations;
    report.matvecs += in.matvecs;
    report.reductions += in.reductions;
    if (!in.converged())
    {
      report.warnings.push_back("refinement " + std::to_string(refinements) +
                                ": inner GMRES ended with " + to_string(in.termination));
    }
    // Lines 6-7.
    const auto d = scaled_cast<double, TW>(in.x, rnorm);
    update(d);
    residual(r);
    const double rnew = nrm2<double>(r);
    report.residual_history.push_back(rnew);
    report.checkpoints.push_back({refinements, rnew, rnew, rnew});
    if (!(rnew < rnorm) && !(rnew <= opts.rtol * bnorm))
    {
      report.termination = Termination::Stagnation;
      report.message = "refinement " + std::to_string(refinements) +
                       " did not reduce the residual (inner GMRES: " + to_string(in.termination) +
                       ", " + std::to_string(in.iterations) + " iterations)";
      report.diagnostics["stalled_inner_iterations"] = static_cast<double>(in.iterations);
      rnorm = rnew;
      break;
    }
    rnorm = rnew;
  }
  report.restarts = refinements;
  report.diagnostics["refinements"] = static_cast<double>(refinements);
  return report;
}

}  // namespace detail

//
// GMRES-based iterative refinement. residual_history holds the explicit ||b - A x_k|| for
// the initial solve from the factors (k = 0) and after every refinement, and checkpoints are
// indexed by k as well; iterations counts inner GMRES steps. Low is the format used wherever
// the policy says Low.
//
inline SolveReport gmres_ir(const DenseMatrix<double> &A, std::span<const double> b,
                            const PrecisionPolicy &policy, const IrOptions &opts = {})
{
  const bool wl = policy.working() == Precision::Low;
  const bool fl = policy.factorization() == Precision::Low;
  if (wl && fl)
  {
    return detail::gmres_ir_impl<float, float>(A, b, policy, opts);
  }
  if (wl)
  {
    return detail::gmres_ir_impl<float, double>(A, b, policy, opts);
  }
  if (fl)
  {
    return detail::gmres_ir_impl<double, float>(A, b, policy, opts);
  }
  return detail::gmres_ir_impl<double, double>(A, b, policy, opts);
}

inline SolveReport gmres_ir(const CsrMatrix<double> &A, std::span<const double> b,
                            const PrecisionPolicy &policy, const IrOptions &opts = {})
{
  return gmres_ir(A.to_dense(), b, policy, opts);
}

//
// One restart cycle run entirely in Low: the restart residual arrives in High, is normalized
// and rounded, and the correction V y is returned to the driver, which adds it to x and
// recomputes the residual in High.
//
template <typename Low = float>
class TwoPrecisionCycle : public CycleVariant<double>
{
public:
  TwoPrecisionCycle(LinearOperator<Low> A_low, const GmresOptions &opts)
    : A_low_(std::move(A_low))
  {
    low_.rtol = opts.rtol;
    low_.max_iter = opts.max_iter;
    low_.scheme = opts.scheme;
    low_.breakdown_tol = opts.breakdown_tol;
    if (opts.precond_side != PrecondSide::None || !opts.weight.empty())
    {
      throw KrylovError("two-precision GMRES: preconditioning and weights are not supported");
    }
  }

  CycleResult<double> run_cycle(std::span<const double>, std::span<const double> r,
                                double target, std::size_t max_steps,
                                HistorySink<double> &sink) override
  {
    const double rn = nrm2<double>(r);
    const auto rl = detail::scaled_cast<Low, double>(r, 1.0 / rn);
    ArnoldiCycle<Low> inner(A_low_, low_);
    BasicSolveReport<Low> tmp;
    std::function<void(std::size_t, double)> cb;
    HistorySink<Low> ts(tmp, cb);
    ts.start(1.0, 0);
    // Below a few hundred low-format ulps the low-precision residual estimate no longer tracks
    // the true residual; restart there so the driver refreshes it in High.
    const double floor = kLowCycleFloorUlps * static_cast<double>(std::numeric_limits<Low>::epsilon());
    auto res = inner.run_cycle({}, rl, static_cast<Low>(std::max(target / rn, floor)), max_steps,
                               ts);
    sink.add_overhead(tmp.reductions_history[0]);
    for (std::size_t k = 1; k < tmp.residual_history.size(); k++)
    {
      sink.record(tmp.residual_history[k] * rn,
                  tmp.reductions_history[k] - tmp.reductions_history[k - 1], 1);
    }
    if (tmp.matvecs > res.steps)
    {
      sink.add_overhead(0, tmp.matvecs - res.steps);
    }
    CycleResult<double> out;
    out.steps = res.steps;
    out.happy_breakdown = res.happy_breakdown;
    out.failed = res.failed;
    out.message = res.message;
    if (!res.dx.empty())
    {
      out.dx = detail::scaled_cast<double, Low>(res.dx, rn);
    }
    return out;
  }

  static constexpr double kLowCycleFloorUlps = 64.0;

private:
  LinearOperator<Low> A_low_;
  BasicGmresOptions<Low> low_;
};

// Restarted GMRES under a precision policy; all-High is exactly gmres_restarted.
template <typename Low = float>
SolveReport gmres_two_precision(const CsrMatrix<double> &A, std::span<const double> b,
                                std::span<const double> x0, const GmresOptions &opts,
                                const PrecisionPolicy &policy)
{
  const auto A_high = make_operator(A);
  if (policy.working() == Precision::High)
  {
    if (policy.residual() != Precision::High || policy.solution_update() != Precision::High)
    {
      throw KrylovError("gmres_two_precision: low residual or update with a high working "
                        "precision is not supported");
    }
    return gmres_restarted<double>(A_high, b, x0, opts);
  }
  TwoPrecisionCycle<Low> cycle(make_operator_low<Low>(A), opts);
  const std::size_t m = opts.restart.value_or(std::max<std::size_t>(opts.max_iter, 1));
  return run_restarted<double>(A_high, b, x0, opts, cycle, m);
}

}  // namespace krylov

#endif  // KRYLOV_MIXED_GMRES_IR_HPP
