// Copyright The Krylov Toolkit Authors.
// SPDX-License-Identifier: Apache-2.0

#ifndef KRYLOV_HARNESS_GENERATORS_HPP
#define KRYLOV_HARNESS_GENERATORS_HPP

#include <cstddef>
#include <cstdint>
#include <vector>

#include "krylov/core/csr.hpp"
#include "krylov/core/dense.hpp"

namespace krylov
{

//
// 5-point upwind convection-diffusion on the unit square with Dirichlet boundaries and
// h = 1/(nx+1). Rows are scaled by h^2: the diffusion stencil is (-1,-1,4,-1,-1) and the
// convection with unit velocity in both directions adds gamma = peclet*h to the diagonal
// and -gamma to the west and south neighbours, per direction.
// Unknowns are ordered x-fastest: index = i + nx*j.
//
CsrMatrix<double> gen_convdiff(std::size_t nx, std::size_t ny, double peclet);

// Haar-like random orthogonal matrix: Q of the QR factorization of a Gaussian matrix with the
// diagonal of R made positive.
DenseMatrix<double> random_orthogonal(std::size_t n, std::uint64_t seed);

// Q diag(eigs) Q^T with Q = random_orthogonal(n, seed), stored densely in CSR.
CsrMatrix<double> gen_spectrum(const std::vector<double> &eigs, std::uint64_t seed);

// U diag(sigma) V^T with singular values geometrically spaced from 1 down to 1/kappa.
CsrMatrix<double> gen_conditioned(std::size_t n, double kappa, std::uint64_t seed);

// Seeded vector with independent entries uniform in [-1, 1].
std::vector<double> random_uniform_vector(std::size_t n, std::uint64_t seed);

}  // namespace krylov

#endif  // KRYLOV_HARNESS_GENERATORS_HPP
