// Copyright The Krylov Toolkit Authors.
// SPDX-License-Identifier: Apache-2.0

#include "krylov/harness/runner.hpp"

#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <future>
#include <map>
#include <memory>
#include <sstream>

#include <json.hpp>

#include "krylov/ca/solvers.hpp"
#include "krylov/core/blas.hpp"
#include "krylov/core/errors.hpp"
#include "krylov/core/matrix_market.hpp"
#include "krylov/deflation/gmres_e.hpp"
#include "krylov/harness/generators.hpp"
#include "krylov/mixed/gmres_ir.hpp"
#include "krylov/solvers.hpp"

namespace krylov
{

namespace
{

using json = nlohmann::json;

// Dense paths (GMRES-IR, bound checks) are limited to desk-scale systems.
constexpr std::size_t kMaxDense = 2000;

Vector<double> residual_of(const CsrMatrix<double> &A, std::span<const double> b,
                           std::span<const double> x)
{
  Vector<double> r(b.size());
  A.multiply(x, r);
  for (std::size_t i = 0; i < r.size(); i++)
  {
    r[i] = b[i] - r[i];
  }
  return r;
}

SimplerVariant simpler_kind(const std::string &name)
{
  if (name == "sgmres")
  {
    return SimplerVariant::SGMRES;
  }
  if (name == "adaptive")
  {
    return SimplerVariant::Adaptive;
  }
  return SimplerVariant::RB_SGMRES;
}

PrecisionPolicy policy_of(const VariantSpec &v)
{
  return v.precision == "all_high" ? PrecisionPolicy::all_high() : PrecisionPolicy::mixed();
}

BasisSpec basis_of(const VariantSpec &v)
{
  switch (v.basis)
  {
    case BasisKind::Newton:
      return BasisSpec::newton();
    case BasisKind::Chebyshev:
      return BasisSpec::chebyshev_auto();
    case BasisKind::Monomial:
      break;
  }
  return BasisSpec::monomial();
}

std::string cell(double v) { return std::isnan(v) ? std::string() : format_number(v); }

json number_or_null(double v)
{
  return std::isfinite(v) ? json(v) : json(nullptr);
}

}  // namespace

std::string format_number(double v)
{
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

CsrMatrix<double> build_problem(const ProblemSpec &spec)
{
  switch (spec.kind)
  {
    case ProblemKind::MatrixMarket:
      return mm_read(spec.path);
    case ProblemKind::ConvDiff:
      return gen_convdiff(spec.nx, spec.ny, spec.peclet);
    case ProblemKind::Spectrum:
      return gen_spectrum(spec.eigs, spec.seed.value_or(0));
    case ProblemKind::Conditioned:
      return gen_conditioned(spec.n, spec.kappa, spec.seed.value_or(0));
  }
  throw KrylovError("build_problem: unknown problem kind");
}

std::vector<double> build_rhs(const RhsSpec &spec, std::size_t n)
{
  switch (spec.kind)
  {
    case RhsKind::Ones:
      return std::vector<double>(n, 1.0);
    case RhsKind::Random:
      return random_uniform_vector(n, spec.seed);
    case RhsKind::File:
    {
      std::ifstream in(spec.path);
      if (!in)
      {
        throw KrylovError("cannot open right-hand side file '" + spec.path.string() + "'");
      }
      std::vector<double> b;
      std::string line;
      std::size_t lineno = 0;
      bool header_done = false;
      while (std::getline(in, line))
      {
        lineno++;
        if (line.empty() || line[0] == '%')
        {
          continue;
        }
        std::istringstream ls(line);
        std::vector<double> fields;
        double v = 0.0;
        while (ls >> v)
        {
          fields.push_back(v);
        }
        if (!ls.eof())
        {
          throw ParseError("right-hand side: not a number", lineno);
        }
        // A Matrix Market array header line "n 1".
        if (!header_done && fields.size() == 2)
        {
          header_done = true;
          continue;
        }
        header_done = true;
        if (fields.size() != 1)
        {
          throw ParseError("right-hand side: expected one value per line", lineno);
        }
        b.push_back(fields[0]);
      }
      if (b.size() != n)
      {
        throw DimensionError("right-hand side has " + std::to_string(b.size()) +
                             " entries, matrix has " + std::to_string(n) + " rows");
      }
      return b;
    }
  }
  throw KrylovError("build_rhs: unknown kind");
}

double backward_error(const CsrMatrix<double> &A, std::span<const double> b,
                      std::span<const double> x)
{
  const auto r = residual_of(A, b, x);
  const double denom = A.frobenius_norm() * nrm2<double>(x) + nrm2<double>(b);
  return denom > 0.0 ? nrm2<double>(r) / denom : 0.0;
}

SolveReport run_variant(const VariantSpec &v, const CsrMatrix<double> &A,
                        std::span<const double> b,
                        const std::optional<PerturbationSchedule> &inexact)
{
  GmresOptions opts;
  opts.rtol = v.rtol;
  opts.max_iter = v.max_iter;
  opts.restart = v.restart;
  opts.scheme = v.scheme;
  opts.simpler_omega = v.simpler_omega;
  opts.weight_adaptive = v.weight_adaptive;
  const std::size_t m = opts.restart.value_or(std::max<std::size_t>(opts.max_iter, 1));

  if (v.solver == SolverKind::TwoPrecision || v.solver == SolverKind::GmresIr)
  {
    if (inexact && inexact->eta > 0.0)
    {
      throw KrylovError(to_string(v.solver) + ": inexact products are not supported");
    }
    if (v.solver == SolverKind::TwoPrecision)
    {
      return gmres_two_precision(A, b, {}, opts, policy_of(v));
    }
    if (A.rows() > kMaxDense)
    {
      throw KrylovError("gmres_ir: dense factorization limited to n <= " +
                        std::to_string(kMaxDense));
    }
    IrOptions ir;
    ir.rtol = v.rtol;
    ir.inner_scheme = v.scheme;
    return gmres_ir(A.to_dense(), b, policy_of(v), ir);
  }

  const auto exact = make_operator(A);
  std::optional<InexactOperator> perturbed;
  if (inexact)
  {
    PerturbationSchedule s = *inexact;
    s.rtol = v.rtol;
    perturbed.emplace(A, s);
    opts.on_iteration = perturbed->history_hook(nrm2<double>(b));
  }
  const LinearOperator<double> &Ak = perturbed ? perturbed->op() : exact;

  std::unique_ptr<CycleVariant<double>> cycle;
  std::size_t length = m;
  GmresOptions used = opts;
  SstepOptions sopts;
  switch (v.solver)
  {
    case SolverKind::Gmres:
      cycle = std::make_unique<ArnoldiCycle<double>>(Ak, used);
      break;
    case SolverKind::Lowsync:
      used.scheme = OrthoScheme::ICWY;
      cycle = std::make_unique<ArnoldiCycle<double>>(Ak, used);
      break;
    case SolverKind::Householder:
      cycle = std::make_unique<HouseholderCycle<double>>(Ak, used);
      break;
    case SolverKind::Simpler:
      cycle = std::make_unique<SimplerCycle<double>>(Ak, used, simpler_kind(v.simpler_variant));
      break;
    case SolverKind::Gcr:
      cycle = std::make_unique<GcrCycle<double>>(Ak, used, DirectionRule::GCR);
      break;
    case SolverKind::Orthodir:
      cycle = std::make_unique<GcrCycle<double>>(Ak, used, DirectionRule::ORTHODIR);
      break;
    case SolverKind::Weighted:
      cycle = std::make_unique<WeightedCycle<double>>(Ak, used);
      break;
    case SolverKind::Lgmres:
      cycle = std::make_unique<LgmresCycle<double>>(Ak, used, v.m1, v.m2);
      length = v.m1 + v.m2;
      break;
    case SolverKind::GmresE:
      cycle = std::make_unique<GmresECycle>(Ak, used, v.m1, v.m2);
      length = v.m1 + v.m2;
      break;
    case SolverKind::Sstep:
      sopts.s = v.s;
      sopts.t = v.t;
      sopts.basis = basis_of(v);
      sopts.tsqr_blocks = v.tsqr_blocks;
      cycle = std::make_unique<SstepCycle>(Ak, used, sopts);
      length = v.s * v.t;
      break;
    case SolverKind::Pipelined:
    {
      PipelinedOptions p;
      p.theta = v.theta;
      cycle = std::make_unique<PipelinedCycle>(Ak, used, p);
      break;
    }
    case SolverKind::TwoPrecision:
    case SolverKind::GmresIr:
      break;
  }
  auto report = run_restarted<double>(exact, b, {}, used, *cycle, length);
  if (v.solver == SolverKind::Sstep)
  {
    report.diagnostics["s"] = static_cast<double>(v.s);
  }
  if (perturbed)
  {
    report.diagnostics["inexact_products"] = static_cast<double>(perturbed->products());
    report.diagnostics["inexact_final_eta"] = perturbed->current_eta();
  }
  return report;
}

bool ExperimentResult::ok() const
{
  for (const auto &v : variants)
  {
    if (!v.ok())
    {
      return false;
    }
  }
  return bound_error.empty();
}

ExperimentResult run_experiment(const ExperimentConfig &config)
{
  config.validate();
  const auto A = build_problem(config.problem);
  if (A.rows() != A.cols())
  {
    throw DimensionError("experiment: matrix must be square");
  }
  const auto b = build_rhs(config.rhs, A.rows());

  ExperimentResult out;
  out.n = A.rows();
  out.nnz = A.nnz();
  out.bnorm = nrm2<double>(b);

  auto task = [&](const VariantSpec &v)
  {
    VariantResult r;
    r.name = v.name;
    const auto t0 = std::chrono::steady_clock::now();
    try
    {
      r.report = run_variant(v, A, b, config.inexact);
      r.true_residual = nrm2<double>(residual_of(A, b, r.report.x));
      r.backward_error = backward_error(A, b, r.report.x);
    }
    catch (const std::exception &e)
    {
      r.error = e.what();
    }
    r.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return r;
  };

  if (config.parallel && config.variants.size() > 1)
  {
    std::vector<std::future<VariantResult>> futures;
    for (const auto &v : config.variants)
    {
      futures.push_back(std::async(std::launch::async, task, std::cref(v)));
    }
    for (auto &f : futures)
    {
      out.variants.push_back(f.get());
    }
  }
  else
  {
    for (const auto &v : config.variants)
    {
      out.variants.push_back(task(v));
    }
  }

  if (config.bound_checks)
  {
    try
    {
      if (A.rows() > kMaxDense)
      {
        throw KrylovError("bound checks limited to n <= " + std::to_string(kMaxDense));
      }
      out.bounds = bound_report(A.to_dense(), b, config.bound_steps);
    }
    catch (const std::exception &e)
    {
      out.bound_error = e.what();
    }
  }
  return out;
}

std::string history_csv(const SolveReport &report)
{
  std::map<std::size_t, double> checkpoints;
  for (const auto &c : report.checkpoints)
  {
    checkpoints[c.iteration] = c.true_residual;
  }
  std::string out = "iter,rho,true_residual,reductions_cum\n";
  for (std::size_t k = 0; k < report.residual_history.size(); k++)
  {
    out += std::to_string(k);
    out += ',';
    out += format_number(report.residual_history[k]);
    out += ',';
    const auto it = checkpoints.find(k);
    if (it != checkpoints.end())
    {
      out += format_number(it->second);
    }
    out += ',';
    if (k < report.reductions_history.size())
    {
      out += std::to_string(report.reductions_history[k]);
    }
    out += '\n';
  }
  return out;
}

std::string bounds_csv(const BoundReport &report)
{
  std::string out = "iter,measured,eigen_bound,elman_bound,fov_bound\n";
  for (std::size_t n = 0; n < report.measured.size(); n++)
  {
    out += std::to_string(n) + ',' + cell(report.measured[n]) + ',' + cell(report.eigen[n]) +
           ',' + cell(report.elman[n]) + ',' + cell(report.fov[n]) + '\n';
  }
  return out;
}

std::string summary_json(const ExperimentConfig &config, const ExperimentResult &result)
{
  json j;
  j["config"] = json::parse(config_to_json(config));
  j["problem"] = {{"n", result.n}, {"nnz", result.nnz}, {"rhs_norm", result.bnorm}};
  json vs = json::array();
  for (const auto &v : result.variants)
  {
    json o;
    o["name"] = v.name;
    o["ok"] = v.ok();
    if (!v.ok())
    {
      o["error"] = v.error;
      vs.push_back(o);
      continue;
    }
    const auto &r = v.report;
    o["termination"] = to_string(r.termination);
    o["message"] = r.message;
    o["iterations"] = r.iterations;
    o["restarts"] = r.restarts;
    o["matvecs"] = r.matvecs;
    o["reductions"] = r.reductions;
    o["happy_breakdown"] = r.happy_breakdown;
    o["final_rho"] = number_or_null(r.residual_history.empty() ? 0.0 : r.residual_history.back());
    o["true_residual"] = number_or_null(v.true_residual);
    o["final_backward_error"] = number_or_null(v.backward_error);
    json diag = json::object();
    for (const auto &[k, val] : r.diagnostics)
    {
      diag[k] = number_or_null(val);
    }
    o["diagnostics"] = diag;
    o["warnings"] = r.warnings;
    vs.push_back(o);
  }
  j["variants"] = vs;
  if (result.bounds)
  {
    const auto &br = *result.bounds;
    j["bounds"] = {{"steps", br.steps()},
                   {"normal", br.normal},
                   {"diagonalizable", br.diagonalizable},
                   {"pd_symmetric_part", br.pd_symmetric_part},
                   {"origin_outside_fov", br.origin_outside_fov},
                   {"kappa_x", number_or_null(br.kappa_x)},
                   {"eigen_reason", br.eigen_reason},
                   {"elman_reason", br.elman_reason},
                   {"fov_reason", br.fov_reason},
                   {"worst_violation", number_or_null(br.worst_violation())},
                   {"warnings", br.warnings}};
  }
  else if (!result.bound_error.empty())
  {
    j["bounds"] = {{"error", result.bound_error}};
  }
  j["all_ok"] = result.ok();
  return j.dump(2) + "\n";
}

std::string timing_json(const ExperimentResult &result)
{
  json j = json::object();
  for (const auto &v : result.variants)
  {
    j[v.name] = {{"wall_seconds", v.wall_seconds}};
  }
  return j.dump(2) + "\n";
}

void write_file_atomic(const std::filesystem::path &path, const std::string &content)
{
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out)
    {
      throw KrylovError("cannot write '" + tmp.string() + "'");
    }
    out << content;
    out.flush();
    if (!out)
    {
      throw KrylovError("write failed for '" + tmp.string() + "'");
    }
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec)
  {
    std::filesystem::remove(tmp);
    throw KrylovError("cannot rename '" + tmp.string() + "' to '" + path.string() +
                      "': " + ec.message());
  }
}

std::vector<std::filesystem::path> write_outputs(const ExperimentConfig &config,
                                                 const ExperimentResult &result)
{
  std::filesystem::create_directories(config.output_dir);
  std::vector<std::filesystem::path> written;
  for (const auto &v : result.variants)
  {
    if (!v.ok())
    {
      continue;
    }
    const auto p = config.output_dir / (v.name + ".csv");
    write_file_atomic(p, history_csv(v.report));
    written.push_back(p);
  }
  if (result.bounds)
  {
    const auto p = config.output_dir / "bounds.csv";
    write_file_atomic(p, bounds_csv(*result.bounds));
    written.push_back(p);
  }
  const auto s = config.output_dir / "summary.json";
  write_file_atomic(s, summary_json(config, result));
  written.push_back(s);
  const auto t = config.output_dir / "timing.json";
  write_file_atomic(t, timing_json(result));
  written.push_back(t);
  return written;
}

std::vector<CompareRow> compare_rows(const ExperimentResult &result)
{
  std::vector<CompareRow> rows;
  for (const auto &v : result.variants)
  {
    CompareRow row;
    row.variant = v.name;
    if (!v.ok())
    {
      row.termination = "error";
      row.backward_error = std::numeric_limits<double>::quiet_NaN();
      rows.push_back(row);
      continue;
    }
    row.iterations = v.report.iterations;
    if (v.report.converged())
    {
      row.iterations_to_rtol = v.report.iterations;
    }
    row.matvecs = v.report.matvecs;
    row.reductions = v.report.reductions;
    row.backward_error = v.backward_error;
    row.termination = to_string(v.report.termination);
    rows.push_back(row);
  }
  return rows;
}

std::string compare_text(const std::vector<CompareRow> &rows)
{
  std::size_t w = 7;
  for (const auto &r : rows)
  {
    w = std::max(w, r.variant.size());
  }
  std::string out;
  char line[256];
  std::snprintf(line, sizeof(line), "%-*s %10s %9s %11s %14s  %s\n", static_cast<int>(w),
                "variant", "iters", "matvecs", "reductions", "backward_err", "termination");
  out += line;
  for (const auto &r : rows)
  {
    const std::string it = r.iterations_to_rtol ? std::to_string(*r.iterations_to_rtol) : "-";
    std::snprintf(line, sizeof(line), "%-*s %10s %9zu %11zu %14.3e  %s\n", static_cast<int>(w),
                  r.variant.c_str(), it.c_str(), r.matvecs, r.reductions, r.backward_error,
                  r.termination.c_str());
    out += line;
  }
  return out;
}

std::string compare_csv(const std::vector<CompareRow> &rows)
{
  std::string out = "variant,iterations_to_rtol,matvecs,reductions,backward_error,termination\n";
  for (const auto &r : rows)
  {
    out += r.variant + ',';
    if (r.iterations_to_rtol)
    {
      out += std::to_string(*r.iterations_to_rtol);
    }
    out += ',' + std::to_string(r.matvecs) + ',' + std::to_string(r.reductions) + ',' +
           cell(r.backward_error) + ',' + r.termination + '\n';
  }
  return out;
}

}  // namespace krylov
