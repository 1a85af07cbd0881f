// Copyright The Krylov Toolkit Authors.
// SPDX-License-Identifier: Apache-2.0

#include "krylov/analysis/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <Eigen/Dense>

#include "krylov/core/blas.hpp"
#include "krylov/core/errors.hpp"
#include "krylov/core/hessenberg_ls.hpp"
#include "krylov/deflation/harmonic_ritz.hpp"
#include "krylov/deflation/leja.hpp"
#include "krylov/ortho/arnoldi.hpp"

namespace krylov
{

namespace
{

Eigen::MatrixXd to_eigen(const DenseMatrix<double> &A)
{
  return Eigen::Map<const Eigen::MatrixXd>(A.values().data(), static_cast<Eigen::Index>(A.rows()),
                                           static_cast<Eigen::Index>(A.cols()));
}

DenseMatrix<double> from_eigen(const Eigen::MatrixXd &E)
{
  DenseMatrix<double> out(static_cast<std::size_t>(E.rows()), static_cast<std::size_t>(E.cols()));
  for (Eigen::Index j = 0; j < E.cols(); j++)
  {
    for (Eigen::Index i = 0; i < E.rows(); i++)
    {
      out(static_cast<std::size_t>(i), static_cast<std::size_t>(j)) = E(i, j);
    }
  }
  return out;
}

void check_square(const DenseMatrix<double> &A, const char *what)
{
  if (A.rows() != A.cols())
  {
    throw DimensionError(std::string(what) + ": matrix must be square");
  }
}

double power_half(double base, std::size_t n)
{
  return std::pow(std::max(base, 0.0), 0.5 * static_cast<double>(n));
}

struct ElmanData
{
  bool applicable = false;
  double base = 1.0;
  std::string reason;
};

ElmanData elman_data(const DenseMatrix<double> &A)
{
  check_square(A, "elman_bound");
  ElmanData out;
  const Eigen::MatrixXd E = to_eigen(A);
  const Eigen::MatrixXd M = 0.5 * (E + E.transpose());
  const double lmin = dense_eig_symmetric(from_eigen(M)).front();
  if (!(lmin > 0.0))
  {
    out.reason = "symmetric part is not positive definite (lambda_min = " +
                 std::to_string(lmin) + ")";
    return out;
  }
  const Eigen::MatrixXd AtA = E.transpose() * E;
  const double lmax = dense_eig_symmetric(from_eigen(0.5 * (AtA + AtA.transpose()))).back();
  out.applicable = true;
  out.base = 1.0 - lmin * lmin / lmax;
  return out;
}

struct FovData
{
  bool applicable = false;
  double base = 1.0;
  std::string reason;
};

FovData fov_data(const DenseMatrix<double> &A, std::size_t grid_count)
{
  check_square(A, "fov_bound");
  FovData out;
  const auto fa = fov_distance(A, grid_count);
  if (fa.contains_origin)
  {
    out.reason = "0 may lie in the field of values of A";
    return out;
  }
  const Eigen::MatrixXd E = to_eigen(A);
  const auto lu = E.fullPivLu();
  if (!lu.isInvertible())
  {
    out.reason = "A is singular";
    return out;
  }
  const auto fi = fov_distance(from_eigen(lu.inverse()), grid_count);
  if (fi.contains_origin)
  {
    out.reason = "0 may lie in the field of values of A^{-1}";
    return out;
  }
  out.applicable = true;
  out.base = 1.0 - fa.mu * fi.mu;
  return out;
}

}  // namespace

double eigen_bound(std::span<const Complex> eigs, double kappa_x, const ResidualPolynomial &p)
{
  double worst = 0.0;
  for (const auto &z : eigs)
  {
    worst = std::max(worst, std::abs(p(z)));
  }
  return kappa_x * worst;
}

bool is_normal(const DenseMatrix<double> &A, double tol)
{
  check_square(A, "is_normal");
  const Eigen::MatrixXd E = to_eigen(A);
  const double scale = E.squaredNorm();
  if (scale == 0.0)
  {
    return true;
  }
  return (E.transpose() * E - E * E.transpose()).norm() <= tol * scale;
}

SpectralData spectral_data(const DenseMatrix<double> &A)
{
  check_square(A, "spectral_data");
  SpectralData out;
  out.eigs = dense_eig_general(A);
  out.normal = is_normal(A);
  if (out.normal)
  {
    out.kappa_x = 1.0;
    return out;
  }
  out.kappa_x = eigenvector_condition(A);
  if (!std::isfinite(out.kappa_x) || out.kappa_x > 1e14)
  {
    out.diagonalizable = false;
    out.warnings.push_back("eigenvector matrix is numerically singular; A treated as defective");
  }
  else if (out.kappa_x > 1e8)
  {
    out.warnings.push_back("eigenvectors are nearly defective (kappa(X) = " +
                           std::to_string(out.kappa_x) + ")");
  }
  return out;
}

BoundValue elman_bound(const DenseMatrix<double> &A, std::size_t n)
{
  const auto d = elman_data(A);
  BoundValue out;
  out.applicable = d.applicable;
  out.reason = d.reason;
  if (d.applicable)
  {
    out.value = power_half(d.base, n);
  }
  return out;
}

FovEstimate fov_distance(const DenseMatrix<double> &A, std::size_t grid_count)
{
  check_square(A, "fov_distance");
  if (grid_count < 8)
  {
    throw KrylovError("fov_distance: grid_count must be at least 8");
  }
  const Eigen::MatrixXd E = to_eigen(A);
  const Eigen::MatrixXd S = 0.5 * (E + E.transpose());
  const Eigen::MatrixXd K = 0.5 * (E - E.transpose());
  FovEstimate out;
  out.grid = grid_count;
  out.mu = -std::numeric_limits<double>::infinity();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver;
  for (std::size_t k = 0; k < grid_count; k++)
  {
    const double theta = 2.0 * std::numbers::pi * static_cast<double>(k) /
                         static_cast<double>(grid_count);
    // Hermitian part of e^{i theta} A.
    const Eigen::MatrixXcd H = std::cos(theta) * S.cast<Complex>() +
                               Complex(0.0, std::sin(theta)) * K.cast<Complex>();
    solver.compute(H, Eigen::EigenvaluesOnly);
    const double lmin = solver.eigenvalues()(0);
    if (lmin > out.mu)
    {
      out.mu = lmin;
      out.theta = theta;
    }
  }
  out.contains_origin = !(out.mu > 0.0);
  if (out.contains_origin)
  {
    out.mu = 0.0;
  }
  return out;
}

BoundValue fov_bound(const DenseMatrix<double> &A, std::size_t n, std::size_t grid_count)
{
  const auto d = fov_data(A, grid_count);
  BoundValue out;
  out.applicable = d.applicable;
  out.reason = d.reason;
  if (d.applicable)
  {
    out.value = power_half(d.base, n);
  }
  return out;
}

ResidualPolyCheck residual_poly_check(const LinearOperator<double> &A,
                                      std::span<const double> r0, std::size_t n)
{
  if (n == 0)
  {
    throw KrylovError("residual_poly_check: n must be at least 1");
  }
  const double beta = nrm2<double>(r0);
  if (beta == 0.0)
  {
    throw KrylovError("residual_poly_check: r0 is zero");
  }
  ArnoldiOptions aopts;
  aopts.scheme = OrthoScheme::MGS;
  ArnoldiProcess<double> process(A, aopts);
  process.start(r0);
  HessenbergLsState<double> ls(beta, n);
  for (std::size_t j = 0; j < n && j < A.size; j++)
  {
    const auto step = process.step();
    ls.add_column(step.h);
    if (step.breakdown)
    {
      break;
    }
  }
  ResidualPolyCheck out;
  out.steps = process.steps();
  const std::size_t m = out.steps;

  // r_m = r0 - A V_m y.
  const auto y = ls.solve();
  const auto &V = process.basis();
  Vector<double> x(A.size, 0.0);
  for (std::size_t j = 0; j < m; j++)
  {
    axpy<double>(y[j], V.col(j), x);
  }
  Vector<double> rn(A.size);
  A.apply(x, rn);
  for (std::size_t i = 0; i < rn.size(); i++)
  {
    rn[i] = r0[i] - rn[i];
  }
  out.rn_ratio = nrm2<double>(rn) / beta;

  const auto Hbar = process.hessenberg();
  const double h_next = process.broken_down() ? 0.0 : Hbar(m, m - 1);
  const auto set = harmonic_ritz(Hbar.block(0, 0, m, m), h_next);
  out.poly = ResidualPolynomial(leja_order(std::span<const Complex>(set.values)));
  const auto pr = out.poly.apply(A, r0);
  for (std::size_t i = 0; i < rn.size(); i++)
  {
    rn[i] = pr[i] - rn[i];
  }
  out.deviation = nrm2<double>(rn) / beta;
  return out;
}

double BoundReport::worst_violation() const
{
  double worst = -std::numeric_limits<double>::infinity();
  for (const auto *bound : {&eigen, &elman, &fov})
  {
    for (std::size_t n = 0; n < bound->size() && n < measured.size(); n++)
    {
      if (!std::isnan((*bound)[n]))
      {
        worst = std::max(worst, measured[n] - (*bound)[n]);
      }
    }
  }
  return worst;
}

BoundReport bound_report(const DenseMatrix<double> &A, std::span<const double> b,
                         std::size_t max_steps, std::size_t grid_count)
{
  check_square(A, "bound_report");
  const double beta = nrm2<double>(b);
  if (beta == 0.0)
  {
    throw KrylovError("bound_report: right-hand side is zero");
  }
  BoundReport out;
  const auto spec = spectral_data(A);
  out.kappa_x = spec.kappa_x;
  out.normal = spec.normal;
  out.diagonalizable = spec.diagonalizable;
  out.warnings = spec.warnings;
  if (!out.diagonalizable)
  {
    out.eigen_reason = "A is not numerically diagonalizable";
  }
  const auto el = elman_data(A);
  out.pd_symmetric_part = el.applicable;
  out.elman_reason = el.reason;
  const auto fv = fov_data(A, grid_count);
  out.origin_outside_fov = fv.applicable;
  out.fov_reason = fv.reason;

  const double nan = std::numeric_limits<double>::quiet_NaN();
  auto push_bounds = [&](std::size_t n, double eig)
  {
    out.eigen.push_back(out.diagonalizable ? eig : nan);
    out.elman.push_back(el.applicable ? power_half(el.base, n) : nan);
    out.fov.push_back(fv.applicable ? power_half(fv.base, n) : nan);
  };
  out.measured.push_back(1.0);
  push_bounds(0, out.kappa_x);

  const auto op = make_operator(A);
  ArnoldiOptions aopts;
  aopts.scheme = OrthoScheme::MGS;
  ArnoldiProcess<double> process(op, aopts);
  process.start(b);
  HessenbergLsState<double> ls(beta, max_steps);
  const std::size_t limit = std::min(max_steps, A.rows());
  for (std::size_t j = 0; j < limit; j++)
  {
    const auto step = process.step();
    ls.add_column(step.h);
    const std::size_t n = j + 1;
    out.measured.push_back(ls.rho() / beta);

    double eig = nan;
    if (out.diagonalizable)
    {
      const auto Hbar = process.hessenberg();
      const double h_next = step.breakdown ? 0.0 : Hbar(n, n - 1);
      try
      {
        const auto set = harmonic_ritz(Hbar.block(0, 0, n, n), h_next);
        eig = eigen_bound(spec.eigs, out.kappa_x, ResidualPolynomial(set.values));
      }
      catch (const KrylovError &e)
      {
        out.warnings.push_back("step " + std::to_string(n) + ": eigenvalue bound unavailable (" +
                               e.what() + ")");
      }
    }
    push_bounds(n, eig);
    if (step.breakdown)
    {
      break;
    }
  }
  return out;
}

}  // namespace krylov
