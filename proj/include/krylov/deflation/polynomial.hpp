// Copyright The Krylov Toolkit Authors.
// SPDX-License-Identifier: Apache-2.0

#ifndef KRYLOV_DEFLATION_POLYNOMIAL_HPP
#define KRYLOV_DEFLATION_POLYNOMIAL_HPP

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "krylov/core/eig.hpp"
#include "krylov/core/operator.hpp"
#include "krylov/solvers/report.hpp"

namespace krylov
{

//
// p(z) = prod_i (1 - z / theta_i), so p(0) = 1. Conjugate root pairs are applied through the
// real quadratic factor 1 - 2 Re(theta)/|theta|^2 z + z^2/|theta|^2. Writing p(z) = 1 - z s(z),
// s(A) is the polynomial preconditioner.
//
class ResidualPolynomial
{
public:
  ResidualPolynomial() = default;
  // Roots must be nonzero and closed under conjugation; the order given is the application
  // order (Leja order is recommended).
  explicit ResidualPolynomial(std::vector<Complex> roots);

  const std::vector<Complex> &roots() const { return roots_; }
  std::size_t degree() const { return roots_.size(); }

  Complex operator()(Complex z) const;

  // out = p(A) v
  Vector<double> apply(const LinearOperator<double> &A, std::span<const double> v) const;
  // out = s(A) v
  Vector<double> apply_s(const LinearOperator<double> &A, std::span<const double> v) const;

  LinearOperator<double> p_operator(LinearOperator<double> A) const;
  LinearOperator<double> s_operator(LinearOperator<double> A) const;

private:
  // One real factor 1 - z q(z) with q(z) = a - b z (b = 0 for a real root).
  struct Factor
  {
    double a = 0.0;
    double b = 0.0;
  };

  std::vector<Complex> roots_;
  std::vector<Factor> factors_;
};

struct PolyPreconditioner
{
  ResidualPolynomial poly;
  std::size_t requested_degree = 0;
  std::size_t gmres_steps = 0;  // may stop early at the grade of b
  std::vector<std::string> warnings;
};

// Degree cap for polynomial preconditioners.
inline constexpr std::size_t kMaxPolyDegree = 20;

//
// Runs `degree` MGS-GMRES steps on A x = b from x0 = 0, takes the harmonic Ritz values as the
// roots of the GMRES residual polynomial, Leja-orders them and returns the polynomial.
//
PolyPreconditioner build_poly_preconditioner(const LinearOperator<double> &A,
                                             std::span<const double> b, std::size_t degree);

}  // namespace krylov

#endif  // KRYLOV_DEFLATION_POLYNOMIAL_HPP
