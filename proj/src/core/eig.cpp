// Copyright The Krylov Toolkit Authors.
// SPDX-License-Identifier: Apache-2.0

#include "krylov/core/eig.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include <Eigen/Dense>

#include "krylov/core/errors.hpp"

namespace krylov
{

namespace
{

Eigen::MatrixXd to_eigen(const DenseMatrix<double> &A)
{
  return Eigen::Map<const Eigen::MatrixXd>(A.values().data(), static_cast<Eigen::Index>(A.rows()),
                                           static_cast<Eigen::Index>(A.cols()));
}

bool complex_less(const Complex &a, const Complex &b)
{
  if (a.real() != b.real())
  {
    return a.real() < b.real();
  }
  return a.imag() < b.imag();
}

void check_square(const DenseMatrix<double> &M, const char *what)
{
  if (M.rows() != M.cols())
  {
    throw DimensionError(std::string(what) + ": matrix must be square");
  }
}

GeneralEigen sort_eigen(std::vector<Complex> values, const Eigen::MatrixXcd *vectors)
{
  const std::size_t n = values.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b)
                   { return complex_less(values[a], values[b]); });
  GeneralEigen out;
  out.values.resize(n);
  for (std::size_t k = 0; k < n; k++)
  {
    out.values[k] = values[order[k]];
  }
  if (vectors)
  {
    out.n = static_cast<std::size_t>(vectors->rows());
    out.vectors.resize(out.n * n);
    for (std::size_t k = 0; k < n; k++)
    {
      Eigen::VectorXcd v = vectors->col(static_cast<Eigen::Index>(order[k]));
      const double nv = v.norm();
      if (nv > 0.0)
      {
        v /= nv;
      }
      for (std::size_t i = 0; i < out.n; i++)
      {
        out.vectors[k * out.n + i] = v(static_cast<Eigen::Index>(i));
      }
    }
  }
  return out;
}

}  // namespace

SymmetricEigen dense_eig_symmetric_full(const DenseMatrix<double> &S)
{
  check_square(S, "dense_eig_symmetric");
  const std::size_t n = S.rows();
  const double fro = frobenius_norm(S);
  for (std::size_t j = 0; j < n; j++)
  {
    for (std::size_t i = j + 1; i < n; i++)
    {
      if (std::abs(S(i, j) - S(j, i)) > 1e-12 * fro)
      {
        throw KrylovError("dense_eig_symmetric: input is not symmetric");
      }
    }
  }
  DenseMatrix<double> A = S;
  DenseMatrix<double> V = DenseMatrix<double>::identity(n);
  auto off_norm = [&]()
  {
    double s = 0.0;
    for (std::size_t j = 0; j < n; j++)
    {
      for (std::size_t i = 0; i < n; i++)
      {
        if (i != j)
        {
          s += A(i, j) * A(i, j);
        }
      }
    }
    return std::sqrt(s);
  };
  const double threshold = 1e-14 * fro;
  int sweep = 0;
  for (; sweep < 30 && off_norm() > threshold; sweep++)
  {
    for (std::size_t p = 0; p + 1 < n; p++)
    {
      for (std::size_t q = p + 1; q < n; q++)
      {
        const double apq = A(p, q);
        if (apq == 0.0)
        {
          continue;
        }
        const double app = A(p, p);
        const double aqq = A(q, q);
        const double theta = (aqq - app) / (2.0 * apq);
        const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                         (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (std::size_t k = 0; k < n; k++)
        {
          const double akp = A(k, p);
          const double akq = A(k, q);
          A(k, p) = c * akp - s * akq;
          A(k, q) = s * akp + c * akq;
        }
        for (std::size_t k = 0; k < n; k++)
        {
          const double apk = A(p, k);
          const double aqk = A(q, k);
          A(p, k) = c * apk - s * aqk;
          A(q, k) = s * apk + c * aqk;
        }
        A(p, q) = 0.0;
        A(q, p) = 0.0;
        for (std::size_t k = 0; k < n; k++)
        {
          const double vkp = V(k, p);
          const double vkq = V(k, q);
          V(k, p) = c * vkp - s * vkq;
          V(k, q) = s * vkp + c * vkq;
        }
      }
    }
  }
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return A(a, a) < A(b, b); });
  SymmetricEigen out;
  out.sweeps = sweep;
  out.values.resize(n);
  out.vectors = DenseMatrix<double>(n, n);
  for (std::size_t k = 0; k < n; k++)
  {
    out.values[k] = A(order[k], order[k]);
    std::copy(V.col(order[k]).begin(), V.col(order[k]).end(), out.vectors.col(k).begin());
  }
  return out;
}

std::vector<double> dense_eig_symmetric(const DenseMatrix<double> &S)
{
  return dense_eig_symmetric_full(S).values;
}

GeneralEigen dense_eig_general_full(const DenseMatrix<double> &M, bool want_vectors)
{
  check_square(M, "dense_eig_general");
  if (M.rows() == 0)
  {
    return {};
  }
  Eigen::EigenSolver<Eigen::MatrixXd> solver(to_eigen(M), want_vectors);
  if (solver.info() != Eigen::Success)
  {
    throw ConvergenceError("dense_eig_general: QR iteration did not converge");
  }
  const auto &ev = solver.eigenvalues();
  std::vector<Complex> values(ev.data(), ev.data() + ev.size());
  if (want_vectors)
  {
    Eigen::MatrixXcd vecs = solver.eigenvectors();
    return sort_eigen(std::move(values), &vecs);
  }
  return sort_eigen(std::move(values), nullptr);
}

std::vector<Complex> dense_eig_general(const DenseMatrix<double> &M)
{
  return dense_eig_general_full(M, false).values;
}

GeneralEigen dense_eig_generalized(const DenseMatrix<double> &A, const DenseMatrix<double> &B,
                                   bool want_vectors)
{
  check_square(A, "dense_eig_generalized");
  if (A.rows() != B.rows() || B.rows() != B.cols())
  {
    throw DimensionError("dense_eig_generalized: shape mismatch");
  }
  Eigen::GeneralizedEigenSolver<Eigen::MatrixXd> solver(to_eigen(A), to_eigen(B), want_vectors);
  if (solver.info() != Eigen::Success)
  {
    throw ConvergenceError("dense_eig_generalized: QZ iteration did not converge");
  }
  const auto alphas = solver.alphas();
  const auto betas = solver.betas();
  const double scale = std::max(to_eigen(B).norm(), 1.0);
  std::vector<Complex> values;
  std::vector<Eigen::Index> keep;
  for (Eigen::Index k = 0; k < alphas.size(); k++)
  {
    if (std::abs(betas(k)) > 1e-14 * scale)
    {
      values.push_back(alphas(k) / betas(k));
      keep.push_back(k);
    }
  }
  if (!want_vectors)
  {
    return sort_eigen(std::move(values), nullptr);
  }
  Eigen::MatrixXcd all = solver.eigenvectors();
  Eigen::MatrixXcd kept(all.rows(), static_cast<Eigen::Index>(keep.size()));
  for (std::size_t k = 0; k < keep.size(); k++)
  {
    kept.col(static_cast<Eigen::Index>(k)) = all.col(keep[k]);
  }
  return sort_eigen(std::move(values), &kept);
}

double eigenvector_condition(const DenseMatrix<double> &M)
{
  const auto eig = dense_eig_general_full(M, true);
  const auto n = static_cast<Eigen::Index>(eig.n);
  Eigen::MatrixXcd X(n, n);
  for (Eigen::Index k = 0; k < n; k++)
  {
    for (Eigen::Index i = 0; i < n; i++)
    {
      X(i, k) = eig.vector_entry(static_cast<std::size_t>(i), static_cast<std::size_t>(k));
    }
  }
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(X);
  const auto &s = svd.singularValues();
  const double smin = s(s.size() - 1);
  return smin > 0.0 ? s(0) / smin : std::numeric_limits<double>::infinity();
}

std::vector<double> singular_values(const DenseMatrix<double> &M)
{
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(to_eigen(M));
  const auto &s = svd.singularValues();
  return {s.data(), s.data() + s.size()};
}

double condition_number(const DenseMatrix<double> &M)
{
  const auto s = singular_values(M);
  if (s.empty())
  {
    return 1.0;
  }
  return s.back() > 0.0 ? s.front() / s.back() : std::numeric_limits<double>::infinity();
}

}  // namespace krylov
