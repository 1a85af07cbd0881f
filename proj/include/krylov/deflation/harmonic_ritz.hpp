// Copyright The Krylov Toolkit Authors.
// SPDX-License-Identifier: Apache-2.0

#ifndef KRYLOV_DEFLATION_HARMONIC_RITZ_HPP
#define KRYLOV_DEFLATION_HARMONIC_RITZ_HPP

#include <vector>

#include "krylov/core/dense.hpp"
#include "krylov/core/eig.hpp"

namespace krylov
{

struct HarmonicRitzSet
{
  std::vector<Complex> values;               // ascending |theta|
  std::vector<std::vector<Complex>> vectors;  // y_i in the Krylov basis, unit 2-norm
  std::vector<double> residual_norms;         // eigenproblem residual of each pair
  // True when H_m was singular and the pencil H^T Hbar y = theta H_m^T y was solved instead.
  bool generalized = false;
};

//
// Harmonic Ritz pairs of the Arnoldi matrix H_m (m x m) with subdiagonal continuation
// h_next = h_{m+1,m}: eigenpairs of H_m + h_next^2 H_m^{-T} e_m e_m^T.
//
HarmonicRitzSet harmonic_ritz(const DenseMatrix<double> &Hm, double h_next);

// Convenience form taking the (m+1) x m Hessenberg matrix.
HarmonicRitzSet harmonic_ritz(const DenseMatrix<double> &Hbar);

// ||(H_m + h^2 H_m^{-T} e_m e_m^T) y - theta y||, the direct-substitution audit.
double harmonic_residual(const DenseMatrix<double> &Hm, double h_next, Complex theta,
                         const std::vector<Complex> &y);

}  // namespace krylov

#endif  // KRYLOV_DEFLATION_HARMONIC_RITZ_HPP
