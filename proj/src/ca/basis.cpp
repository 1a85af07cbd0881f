// Copyright The Krylov Toolkit Authors.
// SPDX-License-Identifier: Apache-2.0

#include "krylov/ca/basis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "krylov/core/blas.hpp"
#include "krylov/core/errors.hpp"
#include "krylov/deflation/leja.hpp"
#include "krylov/ortho/arnoldi.hpp"

namespace krylov
{

namespace
{

bool is_real(Complex z) { return std::abs(z.imag()) <= 1e-12 * std::abs(z); }

bool is_conjugate(Complex a, Complex b)
{
  return std::abs(b - std::conj(a)) <= 1e-8 * std::max(std::abs(a), 1e-300);
}

// Recurrence coefficients of one new column: y = A w_{j-1} - alpha w_{j-1} - beta w_{j-2}.
struct Step
{
  double alpha = 0.0;
  double beta = 0.0;
  double divisor = 1.0;  // nominal d_j with w_j = y / d_j
};

BasisResult build(const LinearOperator<double> &A, std::span<const double> start, std::size_t s,
                  const BasisSpec &spec, bool allow_zero)
{
  if (s == 0)
  {
    throw KrylovError("build_basis: s must be at least 1");
  }
  detail::check_same_size(start.size(), A.size, "build_basis: start vector");
  spec.validate();
  if (spec.needs_estimate())
  {
    throw KrylovError("build_basis: spec has no shifts or rectangle; resolve it first");
  }
  const std::size_t N = A.size;
  BasisResult out{DenseMatrix<double>(N, s + 1), DenseMatrix<double>(s + 1, s), 0};
  copy<double>(start, out.W.col(0));

  std::vector<Complex> seq;
  if (spec.kind == BasisKind::Newton)
  {
    seq = spec.shift_sequence(s);
  }
  std::vector<double> divisor(s + 1, 1.0), nominal(s + 1, 1.0);
  bool pair_open = false;
  bool vanished = false;
  Vector<double> y(N);

  for (std::size_t j = 1; j <= s; j++)
  {
    if (vanished)
    {
      // Every later column of an invariant space stays zero; A 0 = 0 needs no coefficients.
      out.Bbar(j, j - 1) = 0.0;
      continue;
    }
    Step st;
    switch (spec.kind)
    {
      case BasisKind::Monomial:
        break;
      case BasisKind::Newton:
      {
        const Complex theta = seq[j - 1];
        const double rho =
            spec.scalings.empty() ? 1.0 : spec.scalings[(j - 1) % spec.scalings.size()];
        st.alpha = theta.real();
        st.divisor = 1.0 / rho;
        if (pair_open)
        {
          // Second member of a conjugate pair: (A - a)^2 + b^2 in real arithmetic.
          const double b = seq[j - 2].imag();
          st.beta = -b * b / divisor[j - 1];
          pair_open = false;
        }
        else if (!is_real(theta))
        {
          pair_open = true;
        }
        break;
      }
      case BasisKind::Chebyshev:
        st.alpha = spec.center;
        if (j == 1)
        {
          st.divisor = 2.0 * spec.scale;
        }
        else
        {
          st.divisor = spec.scale;
          st.beta = spec.focal_sq / (4.0 * spec.scale) * (nominal[j - 1] / divisor[j - 1]);
        }
        break;
    }

    auto prev = out.W.col(j - 1);
    A.apply(prev, y);
    out.matvecs++;
    axpy<double>(-st.alpha, prev, y);
    if (st.beta != 0.0)
    {
      axpy<double>(-st.beta, out.W.col(j - 2), y);
    }
    const double ynorm = nrm2<double>(y);
    if (!std::isfinite(ynorm))
    {
      throw BasisCollapseError("build_basis: column " + std::to_string(j) +
                               " overflowed; use a smaller s or a better-scaled basis");
    }
    if (ynorm <= std::numeric_limits<double>::min())
    {
      if (!allow_zero)
      {
        throw BasisCollapseError("build_basis: column " + std::to_string(j) +
                                 " norm underflow (basis collapse); use a smaller s or "
                                 "better shifts");
      }
      vanished = true;
      out.Bbar(j - 1, j - 1) = st.alpha;
      if (j >= 2)
      {
        out.Bbar(j - 2, j - 1) = st.beta;
      }
      out.Bbar(j, j - 1) = 0.0;
      continue;
    }
    const double d = spec.normalize ? ynorm : st.divisor;
    nominal[j] = st.divisor;
    divisor[j] = d;
    auto wj = out.W.col(j);
    for (std::size_t i = 0; i < N; i++)
    {
      wj[i] = y[i] / d;
    }
    out.Bbar(j - 1, j - 1) = st.alpha;
    out.Bbar(j, j - 1) = d;
    if (j >= 2)
    {
      out.Bbar(j - 2, j - 1) = st.beta;
    }
  }
  return out;
}

}  // namespace

BasisSpec BasisSpec::monomial() { return {}; }

BasisSpec BasisSpec::newton(std::vector<Complex> shifts, std::vector<double> scalings)
{
  BasisSpec s;
  s.kind = BasisKind::Newton;
  s.shifts = std::move(shifts);
  s.scalings = std::move(scalings);
  return s;
}

BasisSpec BasisSpec::chebyshev(double zeta, double xi1, double xi2)
{
  if (!(xi1 >= 0.0 && xi2 >= 0.0))
  {
    throw KrylovError("BasisSpec::chebyshev: rectangle half-widths must be nonnegative");
  }
  BasisSpec s;
  s.kind = BasisKind::Chebyshev;
  s.center = zeta;
  s.scale = std::max(xi1, xi2);
  s.focal_sq = xi1 * xi1 - xi2 * xi2;
  s.validate();
  return s;
}

BasisSpec BasisSpec::chebyshev_auto()
{
  BasisSpec s;
  s.kind = BasisKind::Chebyshev;
  return s;
}

bool BasisSpec::needs_estimate() const
{
  switch (kind)
  {
    case BasisKind::Monomial:
      return false;
    case BasisKind::Newton:
      return shifts.empty();
    case BasisKind::Chebyshev:
      return scale == 0.0;
  }
  return false;
}

void BasisSpec::validate() const
{
  for (double r : scalings)
  {
    if (!(r > 0.0) || !std::isfinite(r))
    {
      throw KrylovError("BasisSpec: Newton scalings must be positive and finite");
    }
  }
  if (kind == BasisKind::Newton)
  {
    for (std::size_t k = 0; k < shifts.size(); k++)
    {
      if (!std::isfinite(shifts[k].real()) || !std::isfinite(shifts[k].imag()))
      {
        throw KrylovError("BasisSpec: non-finite Newton shift");
      }
      if (is_real(shifts[k]))
      {
        continue;
      }
      if (k + 1 >= shifts.size() || !is_conjugate(shifts[k], shifts[k + 1]))
      {
        throw KrylovError("BasisSpec: Newton shifts must be conjugate-closed with each pair "
                          "stored adjacently");
      }
      k++;
    }
  }
  if (kind == BasisKind::Chebyshev && scale != 0.0)
  {
    if (!(scale > 0.0) || !std::isfinite(scale) || !std::isfinite(focal_sq) ||
        !std::isfinite(center))
    {
      throw KrylovError("BasisSpec: Chebyshev scale must be positive and finite");
    }
    if (focal_sq > scale * scale * (1.0 + 1e-12) || -focal_sq > scale * scale * (1.0 + 1e-12))
    {
      throw KrylovError("BasisSpec: |tau^2| cannot exceed gamma^2");
    }
  }
}

std::vector<Complex> BasisSpec::shift_sequence(std::size_t s) const
{
  std::vector<Complex> seq;
  if (shifts.empty())
  {
    return seq;
  }
  seq.reserve(s);
  std::size_t k = 0;
  while (seq.size() < s)
  {
    const Complex theta = shifts[k % shifts.size()];
    if (is_real(theta))
    {
      seq.emplace_back(theta.real(), 0.0);
      k++;
    }
    else if (seq.size() + 1 < s)
    {
      seq.push_back(theta);
      seq.push_back(std::conj(theta));
      k += 2;
    }
    else
    {
      seq.emplace_back(theta.real(), 0.0);
      k++;
    }
  }
  return seq;
}

BasisSpec newton_from_ritz(std::span<const Complex> ritz)
{
  if (ritz.empty())
  {
    throw KrylovError("newton_from_ritz: no Ritz values");
  }
  return BasisSpec::newton(leja_order(ritz));
}

BasisSpec chebyshev_from_ritz(std::span<const Complex> ritz)
{
  if (ritz.empty())
  {
    throw KrylovError("chebyshev_from_ritz: no Ritz values");
  }
  double lo = ritz[0].real(), hi = lo, im = 0.0;
  for (auto z : ritz)
  {
    lo = std::min(lo, z.real());
    hi = std::max(hi, z.real());
    im = std::max(im, std::abs(z.imag()));
  }
  const double zeta = 0.5 * (lo + hi);
  double xi1 = 0.5 * (hi - lo);
  if (std::max(xi1, im) == 0.0)
  {
    // A single point: widen to an interval so that gamma > 0.
    xi1 = 0.5 * std::max(std::abs(zeta), 1.0);
  }
  return BasisSpec::chebyshev(zeta, xi1, im);
}

RitzEstimate warmup_ritz(const LinearOperator<double> &A, std::span<const double> r,
                         std::size_t k)
{
  RitzEstimate out;
  if (k == 0)
  {
    return out;
  }
  auto dec = arnoldi<double>(A, r, std::min(k, A.size), OrthoScheme::MGS);
  out.steps = dec.n;
  out.matvecs = dec.n;
  out.reductions = dec.reductions;
  out.values = dense_eig_general(dec.Hbar.block(0, 0, dec.n, dec.n));
  return out;
}

BasisSpec resolve_spec(const BasisSpec &spec, std::span<const Complex> ritz)
{
  if (!spec.needs_estimate())
  {
    return spec;
  }
  BasisSpec out = spec.kind == BasisKind::Newton ? newton_from_ritz(ritz)
                                                 : chebyshev_from_ritz(ritz);
  out.scalings = spec.scalings;
  out.normalize = spec.normalize;
  return out;
}

BasisResult build_basis(const LinearOperator<double> &A, std::span<const double> start,
                        std::size_t s, const BasisSpec &spec)
{
  return build(A, start, s, spec, false);
}

namespace detail
{

BasisResult build_basis_allow_zero(const LinearOperator<double> &A,
                                   std::span<const double> start, std::size_t s,
                                   const BasisSpec &spec)
{
  return build(A, start, s, spec, true);
}

}  // namespace detail

}  // namespace krylov
