// Copyright The Krylov Toolkit Authors.
// SPDX-License-Identifier: Apache-2.0

#include "krylov/deflation/harmonic_ritz.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "krylov/core/errors.hpp"
#include "krylov/core/lu.hpp"

namespace krylov
{

namespace
{

// f = H_m^{-T} e_m, or empty when H_m is numerically singular.
std::vector<double> transpose_solve_last(const DenseMatrix<double> &Hm)
{
  const std::size_t m = Hm.rows();
  try
  {
    LuFactorization<double> lu(Hm.transpose());
    const auto U = lu.U();
    double dmax = 0.0, dmin = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < m; i++)
    {
      dmax = std::max(dmax, std::abs(U(i, i)));
      dmin = std::min(dmin, std::abs(U(i, i)));
    }
    if (!(dmin > 1e-14 * dmax))
    {
      return {};
    }
    std::vector<double> e(m, 0.0);
    e[m - 1] = 1.0;
    return lu.solve(e);
  }
  catch (const SingularMatrixError &)
  {
    return {};
  }
}

std::vector<Complex> column(const GeneralEigen &ev, std::size_t k)
{
  std::vector<Complex> y(ev.n);
  double nrm = 0.0;
  for (std::size_t i = 0; i < ev.n; i++)
  {
    y[i] = ev.vector_entry(i, k);
    nrm += std::norm(y[i]);
  }
  nrm = std::sqrt(nrm);
  if (nrm > 0.0)
  {
    for (auto &v : y)
    {
      v /= nrm;
    }
  }
  return y;
}

std::vector<Complex> complex_matvec(const DenseMatrix<double> &M, const std::vector<Complex> &y)
{
  std::vector<Complex> out(M.rows(), 0.0);
  for (std::size_t j = 0; j < M.cols(); j++)
  {
    for (std::size_t i = 0; i < M.rows(); i++)
    {
      out[i] += M(i, j) * y[j];
    }
  }
  return out;
}

void sort_by_magnitude(HarmonicRitzSet &set)
{
  std::vector<std::size_t> idx(set.values.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b)
                   { return std::abs(set.values[a]) < std::abs(set.values[b]); });
  HarmonicRitzSet out;
  out.generalized = set.generalized;
  for (auto k : idx)
  {
    out.values.push_back(set.values[k]);
    out.vectors.push_back(std::move(set.vectors[k]));
    out.residual_norms.push_back(set.residual_norms[k]);
  }
  set = std::move(out);
}

}  // namespace

HarmonicRitzSet harmonic_ritz(const DenseMatrix<double> &Hm, double h_next)
{
  const std::size_t m = Hm.rows();
  if (m == 0 || Hm.cols() != m)
  {
    throw DimensionError("harmonic_ritz: H_m must be square and nonempty");
  }
  HarmonicRitzSet set;
  const auto f = transpose_solve_last(Hm);
  if (!f.empty())
  {
    DenseMatrix<double> K = Hm;
    for (std::size_t i = 0; i < m; i++)
    {
      K(i, m - 1) += h_next * h_next * f[i];
    }
    const auto ev = dense_eig_general_full(K, true);
    for (std::size_t k = 0; k < ev.values.size(); k++)
    {
      set.values.push_back(ev.values[k]);
      set.vectors.push_back(column(ev, k));
      auto r = complex_matvec(K, set.vectors.back());
      double res = 0.0;
      for (std::size_t i = 0; i < m; i++)
      {
        res += std::norm(r[i] - ev.values[k] * set.vectors.back()[i]);
      }
      set.residual_norms.push_back(std::sqrt(res));
    }
  }
  else
  {
    // Hbar^T Hbar y = theta H_m^T y, with Hbar^T Hbar = H_m^T H_m + h^2 e_m e_m^T.
    set.generalized = true;
    DenseMatrix<double> G = matmul(Hm.transpose(), Hm);
    G(m - 1, m - 1) += h_next * h_next;
    const DenseMatrix<double> B = Hm.transpose();
    const auto ev = dense_eig_generalized(G, B, true);
    for (std::size_t k = 0; k < ev.values.size(); k++)
    {
      set.values.push_back(ev.values[k]);
      set.vectors.push_back(column(ev, k));
      auto gy = complex_matvec(G, set.vectors.back());
      auto by = complex_matvec(B, set.vectors.back());
      double res = 0.0;
      for (std::size_t i = 0; i < m; i++)
      {
        res += std::norm(gy[i] - ev.values[k] * by[i]);
      }
      set.residual_norms.push_back(std::sqrt(res));
    }
  }
  sort_by_magnitude(set);
  return set;
}

HarmonicRitzSet harmonic_ritz(const DenseMatrix<double> &Hbar)
{
  const std::size_t m = Hbar.cols();
  if (Hbar.rows() != m + 1)
  {
    throw DimensionError("harmonic_ritz: Hbar must be (m+1) x m");
  }
  return harmonic_ritz(Hbar.block(0, 0, m, m), Hbar(m, m - 1));
}

double harmonic_residual(const DenseMatrix<double> &Hm, double h_next, Complex theta,
                         const std::vector<Complex> &y)
{
  const std::size_t m = Hm.rows();
  detail::check_same_size(y.size(), m, "harmonic_residual");
  // H_m y + h^2 f (e_m^T y) - theta y with f = H_m^{-T} e_m, computed by its own solve.
  LuFactorization<double> lu(Hm.transpose());
  std::vector<double> e(m, 0.0);
  e[m - 1] = 1.0;
  const auto f = lu.solve(e);
  auto r = complex_matvec(Hm, y);
  double res = 0.0;
  for (std::size_t i = 0; i < m; i++)
  {
    r[i] += h_next * h_next * f[i] * y[m - 1] - theta * y[i];
    res += std::norm(r[i]);
  }
  return std::sqrt(res);
}

}  // namespace krylov
