// Copyright The Krylov Toolkit Authors.
// SPDX-License-Identifier: Apache-2.0

#ifndef KRYLOV_ANALYSIS_BOUNDS_HPP
#define KRYLOV_ANALYSIS_BOUNDS_HPP

#include <cstddef>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "krylov/core/dense.hpp"
#include "krylov/core/eig.hpp"
#include "krylov/core/operator.hpp"
#include "krylov/deflation/polynomial.hpp"

namespace krylov
{

// A bound value, or the reason it does not apply.
struct BoundValue
{
  bool applicable = false;
  double value = std::numeric_limits<double>::quiet_NaN();
  std::string reason;
};

//
// Eigenvalue bound kappa(X) max_i |p(lambda_i)| for a fixed residual polynomial p with
// p(0) = 1. Any such p bounds the minimum over all polynomials from above.
//
double eigen_bound(std::span<const Complex> eigs, double kappa_x, const ResidualPolynomial &p);

// Spectrum and eigenvector conditioning of a dense matrix.
struct SpectralData
{
  std::vector<Complex> eigs;
  double kappa_x = 1.0;  // set to exactly 1 for normal matrices
  bool normal = false;
  bool diagonalizable = true;  // false when kappa_x is infinite or above 1e14
  std::vector<std::string> warnings;
};

SpectralData spectral_data(const DenseMatrix<double> &A);

// ||A^T A - A A^T||_F <= tol ||A||_F^2.
bool is_normal(const DenseMatrix<double> &A, double tol = 1e-12);

// (1 - lambda_min(M)^2 / lambda_max(A^T A))^{n/2}, M = (A + A^T)/2; inapplicable unless M is
// positive definite.
BoundValue elman_bound(const DenseMatrix<double> &A, std::size_t n);

struct FovEstimate
{
  double mu = 0.0;  // certified lower bound of the distance from 0 to the field of values
  bool contains_origin = true;  // no sampled direction separates 0 from the field of values
  double theta = 0.0;           // best separating direction
  std::size_t grid = 0;
};

//
// Distance from the origin to the field of values: the maximum over theta_k = 2 pi k / grid
// of lambda_min((e^{i theta} A + e^{-i theta} A^T) / 2). Grids that divide each other are
// nested, so the estimate cannot decrease under such refinement.
//
FovEstimate fov_distance(const DenseMatrix<double> &A, std::size_t grid_count = 256);

// (1 - mu_F(A) mu_F(A^{-1}))^{n/2}; inapplicable when 0 may lie in either field of values or
// A is singular.
BoundValue fov_bound(const DenseMatrix<double> &A, std::size_t n, std::size_t grid_count = 256);

struct ResidualPolyCheck
{
  double deviation = 0.0;  // ||p(A) r0 - r_n|| / ||r0||
  double rn_ratio = 0.0;   // ||r_n|| / ||r0||
  std::size_t steps = 0;   // may stop early at the grade of r0
  ResidualPolynomial poly;
};

//
// Runs n MGS-GMRES steps on A x = r0 from x = 0, builds p from the harmonic Ritz values of
// the run and compares p(A) r0 with the explicit residual r_n = r0 - A x_n.
//
ResidualPolyCheck residual_poly_check(const LinearOperator<double> &A,
                                      std::span<const double> r0, std::size_t n);

//
// Per-iteration comparison of the measured ratio ||r_n|| / ||r_0|| of full MGS-GMRES with the
// eigenvalue, Elman and field-of-values bounds. Index n runs from 0 to the number of steps
// taken. Entries of a bound are NaN where it does not apply; the reason is recorded.
//
struct BoundReport
{
  std::vector<double> measured;
  std::vector<double> eigen;
  std::vector<double> elman;
  std::vector<double> fov;

  bool diagonalizable = false;
  bool normal = false;
  bool pd_symmetric_part = false;
  bool origin_outside_fov = false;
  double kappa_x = 1.0;

  std::string eigen_reason;
  std::string elman_reason;
  std::string fov_reason;
  std::vector<std::string> warnings;

  std::size_t steps() const { return measured.empty() ? 0 : measured.size() - 1; }
  // Largest measured - bound over every applicable entry (negative when all bounds hold).
  double worst_violation() const;
};

BoundReport bound_report(const DenseMatrix<double> &A, std::span<const double> b,
                         std::size_t max_steps, std::size_t grid_count = 256);

}  // namespace krylov

#endif  // KRYLOV_ANALYSIS_BOUNDS_HPP
