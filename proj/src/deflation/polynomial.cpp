// Copyright The Krylov Toolkit Authors.
// SPDX-License-Identifier: Apache-2.0

#include "krylov/deflation/polynomial.hpp"

#include <cmath>
#include <limits>
#include <memory>

#include "krylov/core/errors.hpp"
#include "krylov/deflation/harmonic_ritz.hpp"
#include "krylov/deflation/leja.hpp"
#include "krylov/ortho/arnoldi.hpp"

namespace krylov
{

namespace
{

bool is_real(Complex z) { return std::abs(z.imag()) <= 1e-12 * std::abs(z); }

}  // namespace

ResidualPolynomial::ResidualPolynomial(std::vector<Complex> roots)
{
  std::vector<bool> used(roots.size(), false);
  for (std::size_t k = 0; k < roots.size(); k++)
  {
    if (used[k])
    {
      continue;
    }
    const Complex z = roots[k];
    if (!(std::abs(z) > 0.0))
    {
      throw KrylovError("ResidualPolynomial: a root at zero is incompatible with p(0) = 1");
    }
    used[k] = true;
    if (is_real(z))
    {
      roots_.push_back(Complex(z.real(), 0.0));
      factors_.push_back({1.0 / z.real(), 0.0});
      continue;
    }
    std::size_t partner = roots.size();
    double gap = std::numeric_limits<double>::infinity();
    for (std::size_t i = k + 1; i < roots.size(); i++)
    {
      const double d = std::abs(roots[i] - std::conj(z));
      if (!used[i] && d < gap)
      {
        gap = d;
        partner = i;
      }
    }
    if (partner == roots.size() || gap > 1e-8 * std::abs(z))
    {
      throw KrylovError("ResidualPolynomial: roots are not closed under conjugation");
    }
    used[partner] = true;
    roots_.push_back(z);
    roots_.push_back(std::conj(z));
    const double m2 = std::norm(z);
    factors_.push_back({2.0 * z.real() / m2, 1.0 / m2});
  }
}

Complex ResidualPolynomial::operator()(Complex z) const
{
  Complex p = 1.0;
  for (const auto &f : factors_)
  {
    p *= 1.0 - z * (f.a - f.b * z);
  }
  return p;
}

Vector<double> ResidualPolynomial::apply(const LinearOperator<double> &A,
                                         std::span<const double> v) const
{
  Vector<double> p(v.begin(), v.end());
  Vector<double> t(A.size), q(A.size);
  for (const auto &f : factors_)
  {
    // q = q_k(A) p, then p -= A q
    if (f.b == 0.0)
    {
      for (std::size_t i = 0; i < p.size(); i++)
      {
        q[i] = f.a * p[i];
      }
    }
    else
    {
      A.apply(p, t);
      for (std::size_t i = 0; i < p.size(); i++)
      {
        q[i] = f.a * p[i] - f.b * t[i];
      }
    }
    A.apply(q, t);
    axpy<double>(-1.0, t, p);
  }
  return p;
}

Vector<double> ResidualPolynomial::apply_s(const LinearOperator<double> &A,
                                           std::span<const double> v) const
{
  // P_k = P_{k-1} (1 - z q_k) and S_k = S_{k-1} + q_k P_{k-1} keep P_k = 1 - z S_k.
  Vector<double> p(v.begin(), v.end());
  Vector<double> s(A.size, 0.0), t(A.size), q(A.size);
  for (std::size_t k = 0; k < factors_.size(); k++)
  {
    const auto &f = factors_[k];
    if (f.b == 0.0)
    {
      for (std::size_t i = 0; i < p.size(); i++)
      {
        q[i] = f.a * p[i];
      }
    }
    else
    {
      A.apply(p, t);
      for (std::size_t i = 0; i < p.size(); i++)
      {
        q[i] = f.a * p[i] - f.b * t[i];
      }
    }
    axpy<double>(1.0, q, s);
    if (k + 1 < factors_.size())
    {
      A.apply(q, t);
      axpy<double>(-1.0, t, p);
    }
  }
  return s;
}

LinearOperator<double> ResidualPolynomial::p_operator(LinearOperator<double> A) const
{
  auto self = std::make_shared<const ResidualPolynomial>(*this);
  return {A.size, [self, A](std::span<const double> x, std::span<double> y)
          {
            auto r = self->apply(A, x);
            std::copy(r.begin(), r.end(), y.begin());
          }};
}

LinearOperator<double> ResidualPolynomial::s_operator(LinearOperator<double> A) const
{
  auto self = std::make_shared<const ResidualPolynomial>(*this);
  return {A.size, [self, A](std::span<const double> x, std::span<double> y)
          {
            auto r = self->apply_s(A, x);
            std::copy(r.begin(), r.end(), y.begin());
          }};
}

PolyPreconditioner build_poly_preconditioner(const LinearOperator<double> &A,
                                             std::span<const double> b, std::size_t degree)
{
  if (degree == 0)
  {
    throw KrylovError("build_poly_preconditioner: degree must be at least 1");
  }
  PolyPreconditioner out;
  out.requested_degree = degree;
  std::size_t m = degree;
  if (m > kMaxPolyDegree)
  {
    m = kMaxPolyDegree;
    out.warnings.push_back("polynomial degree capped at " + std::to_string(kMaxPolyDegree) +
                           "; high degrees are numerically unstable");
  }
  m = std::min(m, A.size);
  ArnoldiOptions opts;
  opts.scheme = OrthoScheme::MGS;
  ArnoldiProcess<double> process(A, opts);
  process.start(b);
  for (std::size_t j = 0; j < m; j++)
  {
    if (process.step().breakdown)
    {
      break;
    }
  }
  const std::size_t n = process.steps();
  out.gmres_steps = n;
  const auto Hbar = process.hessenberg();
  const auto Hn = Hbar.block(0, 0, n, n);
  const double h_next = process.broken_down() ? 0.0 : Hbar(n, n - 1);
  const auto set = harmonic_ritz(Hn, h_next);
  const double hnorm = frobenius_norm(Hbar);
  std::vector<Complex> roots;
  std::size_t removed = 0;
  for (const auto &z : set.values)
  {
    if (std::abs(z) <= 1e-14 * hnorm)
    {
      removed++;
      continue;
    }
    roots.push_back(z);
  }
  if (removed > 0)
  {
    out.warnings.push_back("removed " + std::to_string(removed) +
                           " harmonic Ritz value(s) at zero; degree reduced");
  }
  if (roots.empty())
  {
    throw KrylovError("build_poly_preconditioner: no usable roots");
  }
  out.poly = ResidualPolynomial(leja_order(std::span<const Complex>(roots)));
  return out;
}

}  // namespace krylov
