// Copyright The Krylov Toolkit Authors.
// SPDX-License-Identifier: Apache-2.0

#ifndef KRYLOV_HARNESS_RUNNER_HPP
#define KRYLOV_HARNESS_RUNNER_HPP

#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "krylov/analysis/bounds.hpp"
#include "krylov/core/csr.hpp"
#include "krylov/harness/config.hpp"
#include "krylov/harness/inexact.hpp"
#include "krylov/solvers/report.hpp"

namespace krylov
{

CsrMatrix<double> build_problem(const ProblemSpec &spec);
std::vector<double> build_rhs(const RhsSpec &spec, std::size_t n);

// ||b - A x||_2 / (||A||_F ||x||_2 + ||b||_2), with the residual computed explicitly.
double backward_error(const CsrMatrix<double> &A, std::span<const double> b,
                      std::span<const double> x);

//
// Runs one variant from x0 = 0. With a schedule the Krylov products go through an
// InexactOperator while restart residuals and convergence checks use A exactly.
//
SolveReport run_variant(const VariantSpec &variant, const CsrMatrix<double> &A,
                        std::span<const double> b,
                        const std::optional<PerturbationSchedule> &inexact = std::nullopt);

struct VariantResult
{
  std::string name;
  SolveReport report;
  double wall_seconds = 0.0;
  double backward_error = 0.0;
  double true_residual = 0.0;  // ||b - A x||_2 at exit
  std::string error;           // nonempty when the solve threw
  bool ok() const { return error.empty(); }
};

struct ExperimentResult
{
  std::size_t n = 0;
  std::size_t nnz = 0;
  double bnorm = 0.0;
  std::vector<VariantResult> variants;  // in config order
  std::optional<BoundReport> bounds;
  std::string bound_error;
  bool ok() const;
};

// Variants run concurrently unless config.parallel is false; results are in config order.
ExperimentResult run_experiment(const ExperimentConfig &config);

// CSV columns: iter,rho,true_residual,reductions_cum. true_residual is empty where no
// checkpoint was taken.
std::string history_csv(const SolveReport &report);
// CSV columns: iter,measured,eigen_bound,elman_bound,fov_bound; empty where inapplicable.
std::string bounds_csv(const BoundReport &report);
// Deterministic run summary (no timing).
std::string summary_json(const ExperimentConfig &config, const ExperimentResult &result);
std::string timing_json(const ExperimentResult &result);

// Writes path via a temporary file in the same directory and an atomic rename.
void write_file_atomic(const std::filesystem::path &path, const std::string &content);

//
// Writes <variant>.csv for every variant, summary.json, timing.json and, when bound checks
// ran, bounds.csv into config.output_dir. Returns the files written.
//
std::vector<std::filesystem::path> write_outputs(const ExperimentConfig &config,
                                                 const ExperimentResult &result);

struct CompareRow
{
  std::string variant;
  std::optional<std::size_t> iterations_to_rtol;  // empty unless converged
  std::size_t iterations = 0;
  std::size_t matvecs = 0;
  std::size_t reductions = 0;
  double backward_error = 0.0;
  std::string termination;
};

std::vector<CompareRow> compare_rows(const ExperimentResult &result);
std::string compare_text(const std::vector<CompareRow> &rows);
// CSV columns: variant,iterations_to_rtol,matvecs,reductions,backward_error,termination.
std::string compare_csv(const std::vector<CompareRow> &rows);

// Shortest round-trip decimal form; used for every number in CSV output.
std::string format_number(double v);

}  // namespace krylov

#endif  // KRYLOV_HARNESS_RUNNER_HPP
