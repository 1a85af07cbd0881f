// Copyright The Krylov Toolkit Authors.
// SPDX-License-Identifier: Apache-2.0

#include "krylov/harness/generators.hpp"

#include <cmath>
#include <random>

#include "krylov/core/errors.hpp"
#include "krylov/core/qr.hpp"

namespace krylov
{

CsrMatrix<double> gen_convdiff(std::size_t nx, std::size_t ny, double peclet)
{
  if (nx < 2 || ny < 2)
  {
    throw KrylovError("gen_convdiff: nx and ny must be at least 2");
  }
  const double h = 1.0 / static_cast<double>(nx + 1);
  const double gamma = peclet * h;
  std::vector<Triplet<double>> t;
  t.reserve(5 * nx * ny);
  for (std::size_t j = 0; j < ny; j++)
  {
    for (std::size_t i = 0; i < nx; i++)
    {
      const std::size_t row = i + nx * j;
      if (j > 0)
      {
        t.push_back({row, row - nx, -1.0 - gamma});
      }
      if (i > 0)
      {
        t.push_back({row, row - 1, -1.0 - gamma});
      }
      t.push_back({row, row, 4.0 + 2.0 * gamma});
      if (i + 1 < nx)
      {
        t.push_back({row, row + 1, -1.0});
      }
      if (j + 1 < ny)
      {
        t.push_back({row, row + nx, -1.0});
      }
    }
  }
  return CsrMatrix<double>::from_triplets(nx * ny, nx * ny, std::move(t));
}

DenseMatrix<double> random_orthogonal(std::size_t n, std::uint64_t seed)
{
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> dist(0.0, 1.0);
  DenseMatrix<double> G(n, n);
  for (auto &v : G.values())
  {
    v = dist(rng);
  }
  auto qr = householder_qr(G);
  normalize_qr_signs(qr.Q, qr.R);
  return qr.Q;
}

CsrMatrix<double> gen_spectrum(const std::vector<double> &eigs, std::uint64_t seed)
{
  if (eigs.empty())
  {
    throw KrylovError("gen_spectrum: eigenvalue list is empty");
  }
  const std::size_t n = eigs.size();
  const auto Q = random_orthogonal(n, seed);
  DenseMatrix<double> QD = Q;
  for (std::size_t j = 0; j < n; j++)
  {
    for (std::size_t i = 0; i < n; i++)
    {
      QD(i, j) *= eigs[j];
    }
  }
  auto A = matmul(QD, Q.transpose());
  // exact symmetry
  for (std::size_t j = 0; j < n; j++)
  {
    for (std::size_t i = j + 1; i < n; i++)
    {
      const double s = 0.5 * (A(i, j) + A(j, i));
      A(i, j) = s;
      A(j, i) = s;
    }
  }
  return CsrMatrix<double>::from_dense(A, 0.0);
}

CsrMatrix<double> gen_conditioned(std::size_t n, double kappa, std::uint64_t seed)
{
  if (n == 0 || !(kappa >= 1.0))
  {
    throw KrylovError("gen_conditioned: need n >= 1 and kappa >= 1");
  }
  const auto U = random_orthogonal(n, seed);
  const auto V = random_orthogonal(n, seed + 1);
  DenseMatrix<double> US = U;
  for (std::size_t j = 0; j < n; j++)
  {
    const double t = n > 1 ? static_cast<double>(j) / static_cast<double>(n - 1) : 0.0;
    const double sigma = std::pow(kappa, -t);
    for (std::size_t i = 0; i < n; i++)
    {
      US(i, j) *= sigma;
    }
  }
  return CsrMatrix<double>::from_dense(matmul(US, V.transpose()), 0.0);
}

std::vector<double> random_uniform_vector(std::size_t n, std::uint64_t seed)
{
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  std::vector<double> v(n);
  for (auto &x : v)
  {
    x = dist(rng);
  }
  return v;
}

}  // namespace krylov
