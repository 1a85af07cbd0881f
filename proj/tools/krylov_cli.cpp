// Copyright The Krylov Toolkit Authors.
// SPDX-License-Identifier: Apache-2.0

// krylov_cli: run, compare, gen, info.

#include <cmath>
#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "krylov/core/errors.hpp"
#include "krylov/core/matrix_market.hpp"
#include "krylov/harness/config.hpp"
#include "krylov/harness/generators.hpp"
#include "krylov/harness/runner.hpp"

namespace
{

using namespace krylov;

struct Overrides
{
  std::optional<double> rtol;
  std::optional<std::size_t> max_iter;
  std::optional<std::size_t> restart;
  std::optional<std::string> scheme;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> output_dir;
};

void add_override_flags(CLI::App *cmd, Overrides &o)
{
  cmd->add_option("--rtol", o.rtol, "Relative residual tolerance for every variant");
  cmd->add_option("--max-iter", o.max_iter, "Iteration limit for every variant");
  cmd->add_option("--restart", o.restart, "Restart length for every variant");
  cmd->add_option("--scheme", o.scheme, "Orthogonalization scheme for every variant")
      ->check(CLI::IsMember({"mgs", "cgs", "cgs2", "cgsp", "icwy", "householder"}));
  cmd->add_option("--seed", o.seed, "Seed for a random right-hand side and perturbations");
  cmd->add_option("-o,--output-dir", o.output_dir, "Output directory");
}

void apply(const Overrides &o, ExperimentConfig &cfg)
{
  for (auto &v : cfg.variants)
  {
    if (o.rtol)
    {
      v.rtol = *o.rtol;
    }
    if (o.max_iter)
    {
      v.max_iter = *o.max_iter;
    }
    if (o.restart)
    {
      v.restart = *o.restart;
    }
    if (o.scheme)
    {
      if (*o.scheme == "householder")
      {
        v.solver = SolverKind::Householder;
      }
      else
      {
        v.scheme = *parse_scheme(*o.scheme);
      }
    }
  }
  if (o.seed)
  {
    if (cfg.rhs.kind == RhsKind::Random)
    {
      cfg.rhs.seed = *o.seed;
    }
    if (cfg.inexact)
    {
      cfg.inexact->seed = *o.seed;
    }
  }
  if (o.output_dir)
  {
    cfg.output_dir = *o.output_dir;
  }
  cfg.validate();
}

void configure_logging()
{
  auto logger = spdlog::stderr_color_mt("krylov");
  spdlog::set_default_logger(logger);
  spdlog::set_pattern("[%l] %v");
  spdlog::set_level(spdlog::level::info);
  if (const char *env = std::getenv("KRYLOV_LOG"))
  {
    spdlog::set_level(spdlog::level::from_str(env));
  }
}

int run_or_compare(const std::string &config_path, const Overrides &o, bool compare)
{
  auto cfg = load_config(config_path);
  apply(o, cfg);
  if (compare && cfg.variants.size() < 2)
  {
    throw ConfigError("compare needs at least two variants");
  }
  spdlog::info("experiment '{}': {} variant(s)", cfg.name, cfg.variants.size());
  const auto result = run_experiment(cfg);
  spdlog::debug("problem n = {}, nnz = {}", result.n, result.nnz);
  for (const auto &v : result.variants)
  {
    if (!v.ok())
    {
      spdlog::error("variant '{}' failed: {}", v.name, v.error);
      continue;
    }
    spdlog::info("{}: {} after {} iterations, backward error {:.3e}", v.name,
                 to_string(v.report.termination), v.report.iterations, v.backward_error);
    for (const auto &w : v.report.warnings)
    {
      spdlog::warn("{}: {}", v.name, w);
    }
  }
  if (!result.bound_error.empty())
  {
    spdlog::error("bound checks failed: {}", result.bound_error);
  }
  else if (result.bounds && result.bounds->worst_violation() > 1e-10)
  {
    spdlog::warn("a convergence bound fell below the measured ratio by {:.3e}",
                 result.bounds->worst_violation());
  }
  for (const auto &p : write_outputs(cfg, result))
  {
    spdlog::debug("wrote {}", p.string());
  }
  if (compare)
  {
    const auto rows = compare_rows(result);
    const auto text = compare_text(rows);
    std::cout << text;
    write_file_atomic(cfg.output_dir / "compare.txt", text);
    write_file_atomic(cfg.output_dir / "compare.csv", compare_csv(rows));
  }
  return result.ok() ? 0 : 1;
}

std::vector<double> parse_list(const std::string &text)
{
  std::vector<double> out;
  std::size_t pos = 0;
  while (pos < text.size())
  {
    const auto comma = text.find(',', pos);
    const auto item = text.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos);
    std::size_t used = 0;
    const double v = std::stod(item, &used);
    if (used != item.size())
    {
      throw ConfigError("not a number: '" + item + "'");
    }
    out.push_back(v);
    if (comma == std::string::npos)
    {
      break;
    }
    pos = comma + 1;
  }
  return out;
}

void info(const std::string &path)
{
  const auto A = mm_read(path);
  double asym = 0.0;
  double diag_min = INFINITY;
  const bool small = A.rows() == A.cols() && A.rows() <= 4000;
  if (small)
  {
    const auto D = A.to_dense();
    const auto DT = A.transpose().to_dense();
    for (std::size_t j = 0; j < A.cols(); j++)
    {
      for (std::size_t i = 0; i < A.rows(); i++)
      {
        asym = std::max(asym, std::abs(D(i, j) - DT(i, j)));
      }
      diag_min = std::min(diag_min, D(j, j));
    }
  }
  std::cout << "rows " << A.rows() << "\ncols " << A.cols() << "\nnnz " << A.nnz()
            << "\nfrobenius_norm " << format_number(A.frobenius_norm()) << "\n";
  if (small)
  {
    std::cout << "max_asymmetry " << format_number(asym) << "\nmin_diagonal "
              << format_number(diag_min) << "\n";
  }
}

}  // namespace

int main(int argc, char **argv)
{
  configure_logging();
  CLI::App app{"Krylov toolkit experiment runner"};
  app.require_subcommand(1);

  std::string config_path;
  Overrides overrides;
  auto *run = app.add_subcommand("run", "Run every variant of an experiment config");
  run->add_option("config", config_path, "Experiment JSON")->required()->check(CLI::ExistingFile);
  add_override_flags(run, overrides);

  auto *cmp = app.add_subcommand("compare", "Run and print a comparison table");
  cmp->add_option("config", config_path, "Experiment JSON")->required()->check(CLI::ExistingFile);
  add_override_flags(cmp, overrides);

  std::string generator;
  std::string out_path;
  std::size_t nx = 10;
  std::size_t ny = 10;
  double peclet = 0.0;
  std::string eigs;
  std::size_t n = 100;
  double kappa = 1e3;
  std::uint64_t seed = 0;
  auto *gen = app.add_subcommand("gen", "Write a generated matrix in Matrix Market format");
  gen->add_option("generator", generator, "convdiff | spectrum | conditioned")
      ->required()
      ->check(CLI::IsMember({"convdiff", "spectrum", "conditioned"}));
  gen->add_option("-o,--output", out_path, "Output .mtx file")->required();
  gen->add_option("--nx", nx, "convdiff: interior points in x");
  gen->add_option("--ny", ny, "convdiff: interior points in y");
  gen->add_option("--peclet", peclet, "convdiff: Peclet number");
  gen->add_option("--eigs", eigs, "spectrum: comma-separated eigenvalues");
  gen->add_option("--n", n, "conditioned: dimension");
  gen->add_option("--kappa", kappa, "conditioned: 2-norm condition number");
  gen->add_option("--seed", seed, "spectrum, conditioned: seed");

  std::string matrix_path;
  auto *inf = app.add_subcommand("info", "Print basic properties of a Matrix Market file");
  inf->add_option("matrix", matrix_path, "Matrix Market file")
      ->required()
      ->check(CLI::ExistingFile);

  CLI11_PARSE(app, argc, argv);

  try
  {
    if (*run)
    {
      return run_or_compare(config_path, overrides, false);
    }
    if (*cmp)
    {
      return run_or_compare(config_path, overrides, true);
    }
    if (*gen)
    {
      CsrMatrix<double> A;
      if (generator == "convdiff")
      {
        if (nx < 2 || ny < 2)
        {
          throw ConfigError("convdiff needs nx, ny >= 2");
        }
        A = gen_convdiff(nx, ny, peclet);
      }
      else if (generator == "spectrum")
      {
        const auto values = parse_list(eigs);
        if (values.empty())
        {
          throw ConfigError("spectrum needs --eigs");
        }
        A = gen_spectrum(values, seed);
      }
      else
      {
        A = gen_conditioned(n, kappa, seed);
      }
      mm_write(out_path, A);
      spdlog::info("wrote {} ({} x {}, {} nonzeros)", out_path, A.rows(), A.cols(), A.nnz());
      return 0;
    }
    if (*inf)
    {
      info(matrix_path);
      return 0;
    }
  }
  catch (const ParseError &e)
  {
    spdlog::error("parse error: {}", e.what());
    return 2;
  }
  catch (const std::exception &e)
  {
    spdlog::error("{}", e.what());
    return 2;
  }
  return 0;
}
