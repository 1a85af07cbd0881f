// Copyright The Krylov Toolkit Authors.
// SPDX-License-Identifier: Apache-2.0

#include "krylov/ca/tsqr.hpp"

#include <algorithm>
#include <string>

#include "krylov/core/blas.hpp"
#include "krylov/core/errors.hpp"
#include "krylov/core/qr.hpp"

namespace krylov
{

namespace
{

DenseMatrix<double> stack(const DenseMatrix<double> &top, const DenseMatrix<double> &bottom)
{
  DenseMatrix<double> S(top.rows() + bottom.rows(), top.cols());
  S.set_block(0, 0, top);
  S.set_block(top.rows(), 0, bottom);
  return S;
}

}  // namespace

std::size_t tsqr_feasible_blocks(std::size_t rows, std::size_t cols, std::size_t wanted)
{
  if (cols == 0)
  {
    return std::max<std::size_t>(wanted, 1);
  }
  return std::clamp<std::size_t>(std::min(wanted, rows / cols), 1, std::max<std::size_t>(wanted, 1));
}

TsqrTree tsqr(const DenseMatrix<double> &W, std::size_t nblocks)
{
  const std::size_t m = W.rows();
  const std::size_t n = W.cols();
  if (nblocks == 0)
  {
    throw KrylovError("tsqr: nblocks must be at least 1");
  }
  if (n == 0)
  {
    throw DimensionError("tsqr: matrix has no columns");
  }
  TsqrTree tree;
  tree.rows = m;
  tree.cols = n;
  tree.block_offsets.resize(nblocks + 1);
  for (std::size_t i = 0; i <= nblocks; i++)
  {
    tree.block_offsets[i] = i * m / nblocks;
  }
  for (std::size_t i = 0; i < nblocks; i++)
  {
    const std::size_t len = tree.block_offsets[i + 1] - tree.block_offsets[i];
    if (len < n)
    {
      throw DimensionError("tsqr: block " + std::to_string(i) + " has " + std::to_string(len) +
                           " rows, fewer than the " + std::to_string(n) + " columns");
    }
  }

  // Level 0: independent block factorizations.
  std::vector<DenseMatrix<double>> Rs(nblocks);
  tree.levels.emplace_back(nblocks);
  for (std::size_t i = 0; i < nblocks; i++)
  {
    const std::size_t r0 = tree.block_offsets[i];
    auto qr = householder_qr(W.block(r0, 0, tree.block_offsets[i + 1] - r0, n));
    tree.levels[0][i] = std::move(qr.Q);
    Rs[i] = std::move(qr.R);
  }

  // Levels 1..ceil(log2 nblocks): pairwise reduction with odd passthrough.
  while (Rs.size() > 1)
  {
    const std::size_t pairs = Rs.size() / 2;
    const bool odd = Rs.size() % 2 != 0;
    std::vector<DenseMatrix<double>> next(pairs + (odd ? 1 : 0));
    std::vector<DenseMatrix<double>> qs(next.size());
    for (std::size_t i = 0; i < pairs; i++)
    {
      auto qr = householder_qr(stack(Rs[2 * i], Rs[2 * i + 1]));
      qs[i] = std::move(qr.Q);
      next[i] = std::move(qr.R);
    }
    if (odd)
    {
      next.back() = std::move(Rs.back());
    }
    tree.levels.push_back(std::move(qs));
    Rs = std::move(next);
  }

  tree.R = std::move(Rs.front());
  tree.signs.assign(n, 1.0);
  for (std::size_t i = 0; i < n; i++)
  {
    if (tree.R(i, i) < 0.0)
    {
      tree.signs[i] = -1.0;
      for (std::size_t j = 0; j < n; j++)
      {
        tree.R(i, j) = -tree.R(i, j);
      }
    }
  }
  return tree;
}

DenseMatrix<double> TsqrTree::explicit_q() const
{
  const std::size_t n = cols;
  // Coefficient blocks C_i per node, starting from diag(signs) at the root.
  std::vector<DenseMatrix<double>> C(1, DenseMatrix<double>(n, n));
  for (std::size_t i = 0; i < n; i++)
  {
    C[0](i, i) = signs[i];
  }
  for (std::size_t j = levels.size(); j-- > 1;)
  {
    const std::size_t children = levels[j - 1].size();
    std::vector<DenseMatrix<double>> below(children);
    for (std::size_t i = 0; i < levels[j].size(); i++)
    {
      if (levels[j][i].empty())
      {
        below[2 * i] = std::move(C[i]);
        continue;
      }
      const auto P = matmul(levels[j][i], C[i]);
      below[2 * i] = P.block(0, 0, n, n);
      below[2 * i + 1] = P.block(n, 0, n, n);
    }
    C = std::move(below);
  }
  DenseMatrix<double> Q(rows, n);
  for (std::size_t i = 0; i < levels[0].size(); i++)
  {
    Q.set_block(block_offsets[i], 0, matmul(levels[0][i], C[i]));
  }
  return Q;
}

DenseMatrix<double> bgs_project(const DenseMatrix<double> &Vprev, DenseMatrix<double> &W)
{
  const std::size_t k = Vprev.cols();
  DenseMatrix<double> R(k, W.cols());
  if (k == 0)
  {
    return R;
  }
  detail::check_same_size(Vprev.rows(), W.rows(), "bgs_project");
  for (std::size_t j = 0; j < W.cols(); j++)
  {
    for (std::size_t i = 0; i < k; i++)
    {
      R(i, j) = dot<double>(Vprev.col(i), W.col(j));
    }
  }
  for (std::size_t j = 0; j < W.cols(); j++)
  {
    for (std::size_t i = 0; i < k; i++)
    {
      axpy<double>(-R(i, j), Vprev.col(i), W.col(j));
    }
  }
  return R;
}

}  // namespace krylov
