// Copyright The Krylov Toolkit Authors.
// SPDX-License-Identifier: Apache-2.0

#ifndef KRYLOV_CA_BASIS_HPP
#define KRYLOV_CA_BASIS_HPP

#include <cstddef>
#include <span>
#include <vector>

#include "krylov/core/dense.hpp"
#include "krylov/core/eig.hpp"
#include "krylov/core/operator.hpp"

namespace krylov
{

enum class BasisKind
{
  Monomial,
  Newton,
  Chebyshev
};

//
// Polynomial basis phi_0(A) w, ..., phi_s(A) w.
//   Monomial:  phi_j = z^j
//   Newton:    phi_j = rho_j (z - theta_j) phi_{j-1}
//   Chebyshev: phi_1 = (z - zeta) / (2 gamma),
//              phi_j = ((z - zeta) phi_{j-1} - tau^2 / (4 gamma) phi_{j-2}) / gamma
// Newton shifts must be conjugate-closed with each complex pair stored adjacently (the order
// leja_order produces); pairs are applied in real arithmetic. Shifts and scalings shorter than
// s are reused cyclically; empty scalings mean rho_j = 1.
//
struct BasisSpec
{
  BasisKind kind = BasisKind::Monomial;
  std::vector<Complex> shifts;
  std::vector<double> scalings;
  double center = 0.0;   // zeta
  double scale = 0.0;    // gamma
  double focal_sq = 0.0;  // tau^2; negative when the ellipse foci lie on the imaginary axis
  // Scale every new column to unit norm and fold the factor into Bbar. Replaces the
  // Newton scalings when set.
  bool normalize = false;

  static BasisSpec monomial();
  // Empty shifts: solvers estimate them from warmup Ritz values.
  static BasisSpec newton(std::vector<Complex> shifts = {}, std::vector<double> scalings = {});
  // Spectrum inside {|Re z - zeta| <= xi1, |Im z| <= xi2}: gamma = max(xi1, xi2),
  // tau^2 = xi1^2 - xi2^2.
  static BasisSpec chebyshev(double zeta, double xi1, double xi2);
  // Unset rectangle: solvers estimate it from warmup Ritz values.
  static BasisSpec chebyshev_auto();

  // True when the solver has to fill in shifts or the rectangle.
  bool needs_estimate() const;
  void validate() const;
  // Shift sequence of length s; a pair cut by the end of the block is replaced by its real part.
  std::vector<Complex> shift_sequence(std::size_t s) const;
};

// Newton spec from Ritz values (Leja-ordered); Chebyshev spec from their bounding box.
BasisSpec newton_from_ritz(std::span<const Complex> ritz);
BasisSpec chebyshev_from_ritz(std::span<const Complex> ritz);

// Eigenvalues of H_k after k MGS Arnoldi steps from r (fewer at breakdown).
struct RitzEstimate
{
  std::vector<Complex> values;
  std::size_t steps = 0;
  std::size_t matvecs = 0;
  std::size_t reductions = 0;
};
RitzEstimate warmup_ritz(const LinearOperator<double> &A, std::span<const double> r,
                         std::size_t k);

// Fills in shifts or the rectangle of an auto spec; other specs are returned unchanged.
BasisSpec resolve_spec(const BasisSpec &spec, std::span<const Complex> ritz);

// A W_s = W_{s+1} Bbar_s for the generated W (N x (s+1)).
struct BasisResult
{
  DenseMatrix<double> W;
  DenseMatrix<double> Bbar;  // (s+1) x s
  std::size_t matvecs = 0;
};

// Throws BasisCollapseError when a column overflows or its norm underflows.
BasisResult build_basis(const LinearOperator<double> &A, std::span<const double> start,
                        std::size_t s, const BasisSpec &spec);

namespace detail
{
// As build_basis, but an exactly vanishing column (invariant Krylov space) is kept as zero
// with a zero Bbar subdiagonal instead of raising.
BasisResult build_basis_allow_zero(const LinearOperator<double> &A,
                                   std::span<const double> start, std::size_t s,
                                   const BasisSpec &spec);
}  // namespace detail

}  // namespace krylov

#endif  // KRYLOV_CA_BASIS_HPP
