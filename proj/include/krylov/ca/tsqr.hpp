// Copyright The Krylov Toolkit Authors.
// SPDX-License-Identifier: Apache-2.0

#ifndef KRYLOV_CA_TSQR_HPP
#define KRYLOV_CA_TSQR_HPP

#include <cstddef>
#include <vector>

#include "krylov/core/dense.hpp"

namespace krylov
{

//
// Tall skinny QR by a binary reduction tree. Level 0 factors each row block; level j
// factors pairs of stacked R factors from level j-1, and an odd last node passes through
// unchanged (its Q factor is the identity, stored as an empty matrix).
//
struct TsqrTree
{
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<std::size_t> block_offsets;  // nblocks + 1 row offsets
  // levels[j][i]: Q factor of node i at level j; empty means identity.
  std::vector<std::vector<DenseMatrix<double>>> levels;
  // +1 or -1 per column; applied at the root so that diag(R) >= 0.
  std::vector<double> signs;
  DenseMatrix<double> R;

  std::size_t nblocks() const { return block_offsets.empty() ? 0 : block_offsets.size() - 1; }
  std::size_t depth() const { return levels.empty() ? 0 : levels.size() - 1; }

  // Q = Q^(0) Q^(1) ... Q^(L) diag(signs), rows x cols.
  DenseMatrix<double> explicit_q() const;
};

// Splits W into nblocks near-equal row blocks; throws DimensionError when a block would
// have fewer rows than W has columns.
TsqrTree tsqr(const DenseMatrix<double> &W, std::size_t nblocks);

// Largest block count (at most `wanted`) for which every block has >= cols rows.
std::size_t tsqr_feasible_blocks(std::size_t rows, std::size_t cols, std::size_t wanted);

// Block Gram-Schmidt step: R = Vprev^T W, W <- W - Vprev R. One reduction.
DenseMatrix<double> bgs_project(const DenseMatrix<double> &Vprev, DenseMatrix<double> &W);

}  // namespace krylov

#endif  // KRYLOV_CA_TSQR_HPP
