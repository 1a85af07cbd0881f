// Copyright The Krylov Toolkit Authors.
// SPDX-License-Identifier: Apache-2.0

#ifndef KRYLOV_HARNESS_CONFIG_HPP
#define KRYLOV_HARNESS_CONFIG_HPP

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "krylov/ca/basis.hpp"
#include "krylov/harness/inexact.hpp"
#include "krylov/ortho/scheme.hpp"

namespace krylov
{

enum class ProblemKind
{
  MatrixMarket,
  ConvDiff,
  Spectrum,
  Conditioned
};

struct ProblemSpec
{
  ProblemKind kind = ProblemKind::ConvDiff;
  std::filesystem::path path;  // MatrixMarket
  std::size_t nx = 10;         // ConvDiff
  std::size_t ny = 10;
  double peclet = 0.0;
  std::vector<double> eigs;  // Spectrum
  std::size_t n = 0;         // Conditioned
  double kappa = 1.0;
  std::optional<std::uint64_t> seed;  // Spectrum, Conditioned
};

enum class RhsKind
{
  Ones,
  Random,
  File
};

struct RhsSpec
{
  RhsKind kind = RhsKind::Ones;
  std::uint64_t seed = 0;      // Random: entries uniform in [-1, 1]
  std::filesystem::path path;  // File: one value per line, or a Matrix Market n x 1 array
};

enum class SolverKind
{
  Gmres,
  Householder,
  Simpler,
  Gcr,
  Orthodir,
  Weighted,
  Lgmres,
  GmresE,
  Sstep,
  Pipelined,
  Lowsync,
  TwoPrecision,
  GmresIr
};

std::string to_string(SolverKind k);
std::optional<SolverKind> parse_solver(const std::string &name);

struct VariantSpec
{
  std::string name;
  SolverKind solver = SolverKind::Gmres;
  OrthoScheme scheme = OrthoScheme::MGS;
  double rtol = 1e-8;
  std::size_t max_iter = 1000;
  std::optional<std::size_t> restart;

  // simpler: "sgmres", "rb", "adaptive"
  std::string simpler_variant = "rb";
  double simpler_omega = 0.5;
  // weighted
  bool weight_adaptive = true;
  // lgmres, gmres_e: m1 Krylov steps plus m2 augmentation vectors per cycle
  std::size_t m1 = 20;
  std::size_t m2 = 3;
  // sstep
  std::size_t s = 4;
  std::size_t t = 5;
  BasisKind basis = BasisKind::Monomial;
  std::size_t tsqr_blocks = 4;
  // pipelined
  std::optional<double> theta;
  // two_precision, gmres_ir: "all_high" or "mixed"
  std::string precision = "mixed";
};

struct ExperimentConfig
{
  std::string name = "experiment";
  ProblemSpec problem;
  RhsSpec rhs;
  std::vector<VariantSpec> variants;
  std::filesystem::path output_dir = "out";
  bool bound_checks = false;
  std::size_t bound_steps = 30;
  std::optional<PerturbationSchedule> inexact;
  bool parallel = true;

  // Throws ConfigError naming the offending field.
  void validate() const;
};

//
// Parses one experiment from a JSON document. Relative paths are resolved against base_dir.
// Syntax errors report line and column; schema errors report the JSON path of the field.
//
ExperimentConfig parse_config(const std::string &text,
                              const std::filesystem::path &base_dir = {});
ExperimentConfig load_config(const std::filesystem::path &path);

// Canonical JSON form of a configuration (stable key order), used in the run summary.
std::string config_to_json(const ExperimentConfig &config);

}  // namespace krylov

#endif  // KRYLOV_HARNESS_CONFIG_HPP
