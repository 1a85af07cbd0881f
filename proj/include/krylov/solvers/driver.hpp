// Copyright The Krylov Toolkit Authors.
// SPDX-License-Identifier: Apache-2.0

#ifndef KRYLOV_SOLVERS_DRIVER_HPP
#define KRYLOV_SOLVERS_DRIVER_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <span>
#include <string>

#include "krylov/core/blas.hpp"
#include "krylov/core/errors.hpp"
#include "krylov/core/operator.hpp"
#include "krylov/solvers/options.hpp"
#include "krylov/solvers/report.hpp"

namespace krylov
{

// Appends per-iteration entries to a report and forwards them to the iteration callback.
template <typename T>
class HistorySink
{
public:
  HistorySink(BasicSolveReport<T> &report, const std::function<void(std::size_t, double)> &cb)
    : report_(report), callback_(cb)
  {
  }

  void start(double rho, std::size_t reductions)
  {
    report_.residual_history.assign(1, rho);
    report_.reductions_history.assign(1, reductions);
    report_.reductions = reductions;
  }

  // One completed iteration.
  void record(double rho, std::size_t reductions, std::size_t matvecs)
  {
    report_.iterations++;
    report_.reductions += reductions;
    report_.matvecs += matvecs;
    report_.residual_history.push_back(rho);
    report_.reductions_history.push_back(report_.reductions);
    if (callback_)
    {
      callback_(report_.iterations, rho);
    }
  }

  // Work outside the iteration proper (cycle setup, explicit residuals), charged to the
  // most recent history entry so per-iteration differences stay the step costs.
  void add_overhead(std::size_t reductions, std::size_t matvecs = 0)
  {
    report_.reductions += reductions;
    report_.matvecs += matvecs;
    if (!report_.reductions_history.empty())
    {
      report_.reductions_history.back() = report_.reductions;
    }
  }

  void warn(std::string message) { report_.warnings.push_back(std::move(message)); }
  void diagnostic(const std::string &key, double value) { report_.diagnostics[key] = value; }
  double diagnostic_or(const std::string &key, double fallback) const
  {
    auto it = report_.diagnostics.find(key);
    return it == report_.diagnostics.end() ? fallback : it->second;
  }

  std::size_t iterations() const { return report_.iterations; }

private:
  BasicSolveReport<T> &report_;
  const std::function<void(std::size_t, double)> &callback_;
};

template <typename T>
struct CycleResult
{
  Vector<T> dx;
  std::size_t steps = 0;
  bool happy_breakdown = false;
  bool failed = false;
  std::string message;
};

//
// One restart cycle of a minimal-residual method. The driver owns x, the explicit residual
// and all termination decisions; the variant only produces a correction.
//
template <typename T>
class CycleVariant
{
public:
  virtual ~CycleVariant() = default;

  // Norm in which convergence is monitored and residual estimates are reported.
  virtual T monitor(std::span<const T> r) const { return nrm2<T>(r); }

  // Called with the explicit residual before the first cycle and at each restart.
  virtual void prepare(std::span<const T> /*r*/) {}

  // Runs at most max_steps iterations, recording each through the sink, and stops early when
  // the estimate drops to target.
  virtual CycleResult<T> run_cycle(std::span<const T> x, std::span<const T> r, T target,
                                   std::size_t max_steps, HistorySink<T> &sink) = 0;
};

// Relative progress below which a full cycle counts as stagnation.
inline constexpr double kStagnationTol = 1e-14;

template <typename T>
BasicSolveReport<T> run_restarted(const LinearOperator<T> &A, std::span<const T> b,
                                  std::span<const T> x0, const BasicGmresOptions<T> &opts,
                                  CycleVariant<T> &variant, std::size_t cycle_length)
{
  const std::size_t N = A.size;
  detail::check_same_size(b.size(), N, "solve: right-hand side");
  if (!x0.empty())
  {
    detail::check_same_size(x0.size(), N, "solve: initial guess");
  }
  opts.validate(N);
  if (cycle_length == 0)
  {
    throw KrylovError("solve: cycle length must be at least 1");
  }

  BasicSolveReport<T> report;
  HistorySink<T> sink(report, opts.on_iteration);
  report.x = x0.empty() ? Vector<T>(N, T(0)) : Vector<T>(x0.begin(), x0.end());

  if (nrm2<T>(b) == T(0))
  {
    report.x.assign(N, T(0));
    sink.start(0.0, 1);
    report.termination = Termination::Converged;
    report.checkpoints.push_back({0, 0.0, 0.0, 0.0});
    report.message = "zero right-hand side";
    return report;
  }

  auto residual = [&](Vector<T> &r)
  {
    A.apply(report.x, r);
    for (std::size_t i = 0; i < N; i++)
    {
      r[i] = b[i] - r[i];
    }
  };

  Vector<T> r(N);
  residual(r);
  variant.prepare(r);
  T target = static_cast<T>(opts.rtol) * variant.monitor(b);
  T mr = variant.monitor(r);
  sink.start(static_cast<double>(mr), 1);
  report.matvecs = 1;
  if (mr <= target)
  {
    report.termination = Termination::Converged;
    report.checkpoints.push_back(
        {0, static_cast<double>(mr), static_cast<double>(nrm2<T>(r)), static_cast<double>(mr)});
    report.message = "initial guess satisfies tolerance";
    return report;
  }

  while (true)
  {
    const std::size_t left = opts.max_iter - std::min(opts.max_iter, report.iterations);
    if (left == 0)
    {
      report.termination = Termination::MaxIter;
      report.message = "iteration limit reached";
      break;
    }
    auto cycle = variant.run_cycle(report.x, r, target, std::min(cycle_length, left), sink);
    if (cycle.happy_breakdown)
    {
      report.happy_breakdown = true;
    }
    if (!cycle.dx.empty())
    {
      axpy<T>(T(1), cycle.dx, report.x);
    }
    residual(r);
    sink.add_overhead(1, 1);
    const T mr_new = variant.monitor(r);
    report.checkpoints.push_back({report.iterations, report.residual_history.back(),
                                  static_cast<double>(nrm2<T>(r)),
                                  static_cast<double>(mr_new)});
    if (cycle.failed)
    {
      report.termination = Termination::Breakdown;
      report.message = cycle.message;
      break;
    }
    if (mr_new <= target)
    {
      report.termination = Termination::Converged;
      report.message = cycle.happy_breakdown ? "converged (invariant subspace reached)"
                                             : "converged";
      break;
    }
    if (report.iterations >= opts.max_iter)
    {
      report.termination = Termination::MaxIter;
      report.message = "iteration limit reached";
      break;
    }
    if (!(mr - mr_new > static_cast<T>(kStagnationTol) * mr))
    {
      report.termination = Termination::Stagnation;
      report.message = "restart cycle made no progress";
      break;
    }
    report.restarts++;
    variant.prepare(r);
    target = static_cast<T>(opts.rtol) * variant.monitor(b);
    mr = variant.monitor(r);
  }
  return report;
}

}  // namespace krylov

#endif  // KRYLOV_SOLVERS_DRIVER_HPP
