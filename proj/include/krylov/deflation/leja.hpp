// Copyright The Krylov Toolkit Authors.
// SPDX-License-Identifier: Apache-2.0

#ifndef KRYLOV_DEFLATION_LEJA_HPP
#define KRYLOV_DEFLATION_LEJA_HPP

#include <span>
#include <vector>

#include "krylov/core/eig.hpp"

namespace krylov
{

//
// Modified Leja ordering: start from the point of largest modulus, then repeatedly take the
// point maximizing sum_k log|z - z_k| over the chosen prefix. A point with nonzero imaginary
// part is followed immediately by its conjugate.
//
std::vector<Complex> leja_order(std::span<const Complex> points);

// Real-only convenience overload.
std::vector<Complex> leja_order(std::span<const double> points);

}  // namespace krylov

#endif  // KRYLOV_DEFLATION_LEJA_HPP
