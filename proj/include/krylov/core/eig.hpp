// Copyright The Krylov Toolkit Authors.
// SPDX-License-Identifier: Apache-2.0

#ifndef KRYLOV_CORE_EIG_HPP
#define KRYLOV_CORE_EIG_HPP

#include <complex>
#include <vector>

#include "krylov/core/dense.hpp"

namespace krylov
{

using Complex = std::complex<double>;

struct SymmetricEigen
{
  std::vector<double> values;  // ascending
  DenseMatrix<double> vectors;  // column k belongs to values[k]
  int sweeps = 0;
};

// Cyclic Jacobi: at most 30 sweeps, stops when the off-diagonal Frobenius norm drops below
// 1e-14 ||S||_F. Throws KrylovError if S is not symmetric to 1e-12 ||S||_F.
SymmetricEigen dense_eig_symmetric_full(const DenseMatrix<double> &S);
std::vector<double> dense_eig_symmetric(const DenseMatrix<double> &S);

struct GeneralEigen
{
  std::vector<Complex> values;
  // Column-major complex eigenvectors, unit 2-norm columns; empty unless requested.
  std::vector<Complex> vectors;
  std::size_t n = 0;

  Complex vector_entry(std::size_t i, std::size_t k) const { return vectors[k * n + i]; }
};

// Eigenvalues of a real square matrix (Hessenberg reduction followed by shifted QR).
// Values are sorted by real part, then imaginary part. Throws ConvergenceError if the
// QR iteration does not converge.
GeneralEigen dense_eig_general_full(const DenseMatrix<double> &M, bool want_vectors);
std::vector<Complex> dense_eig_general(const DenseMatrix<double> &M);

// Generalized problem A y = lambda B y; infinite eigenvalues are dropped.
GeneralEigen dense_eig_generalized(const DenseMatrix<double> &A, const DenseMatrix<double> &B,
                                   bool want_vectors);

// 2-norm condition number of the eigenvector matrix of M (columns scaled to unit norm).
double eigenvector_condition(const DenseMatrix<double> &M);

// Singular values, descending.
std::vector<double> singular_values(const DenseMatrix<double> &M);

double condition_number(const DenseMatrix<double> &M);

}  // namespace krylov

#endif  // KRYLOV_CORE_EIG_HPP
