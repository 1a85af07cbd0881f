// Copyright The Krylov Toolkit Authors.
// SPDX-License-Identifier: Apache-2.0

#ifndef KRYLOV_ORTHO_HOUSEHOLDER_HPP
#define KRYLOV_ORTHO_HOUSEHOLDER_HPP

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "krylov/core/blas.hpp"
#include "krylov/core/dense.hpp"
#include "krylov/core/errors.hpp"
#include "krylov/core/operator.hpp"
#include "krylov/core/qr.hpp"
#include "krylov/ortho/arnoldi.hpp"

namespace krylov
{

//
// Arnoldi by Householder reflections. Reflector k acts on entries k..N-1 only. Basis
// vectors are never stored during the iteration; v_j = P_1 ... P_j e_j is formed when
// needed and V_n y is evaluated by the nested (Horner) product.
//
// The reported V and Hbar are sign-normalized (v_1 = r0/||r0||, h_{j+1,j} >= 0); the raw
// reflector output differs from them by a diagonal +-1 similarity.
//
// Reduction model: each reflector application and each norm counts as one reduction.
//
template <typename T>
class HouseholderArnoldi
{
public:
  explicit HouseholderArnoldi(LinearOperator<T> A, double breakdown_tol = 1e-14)
    : A_(std::move(A)), tol_(breakdown_tol)
  {
  }

  T start(std::span<const T> r0)
  {
    const std::size_t N = A_.size;
    detail::check_same_size(r0.size(), N, "HouseholderArnoldi::start");
    reflectors_.clear();
    H_.clear();
    signs_.clear();
    step_reductions_.clear();
    broken_ = false;
    matvecs_ = 0;
    auto h = make_householder<T>(r0);
    if (h.beta == T(0))
    {
      throw KrylovError("HouseholderArnoldi::start: zero starting vector");
    }
    beta_raw_ = h.beta;
    reflectors_.push_back(std::move(h));
    setup_reductions_ = 1;
    signs_.push_back(beta_raw_ >= T(0) ? T(1) : T(-1));
    return std::abs(beta_raw_);
  }

  std::size_t steps() const { return H_.size(); }
  bool broken_down() const { return broken_; }
  std::size_t matvecs() const { return matvecs_; }
  std::size_t setup_reductions() const { return setup_reductions_; }
  std::span<const std::size_t> step_reductions() const { return step_reductions_; }
  std::size_t reductions() const
  {
    std::size_t total = setup_reductions_;
    for (auto r : step_reductions_)
    {
      total += r;
    }
    return total;
  }

  // Full-length reflector vector w_{k+1} (zero in its first k entries), unit leading entry.
  Vector<T> reflector_vector(std::size_t k) const
  {
    Vector<T> w(A_.size, T(0));
    const auto &h = reflectors_.at(k);
    std::copy(h.v.begin(), h.v.end(), w.begin() + static_cast<std::ptrdiff_t>(k));
    return w;
  }
  std::size_t reflector_count() const { return reflectors_.size(); }

  // Raw v_j = P_0 ... P_j e_j.
  Vector<T> raw_basis_vector(std::size_t j) const
  {
    Vector<T> v(A_.size, T(0));
    v[j] = T(1);
    for (std::size_t k = j + 1; k-- > 0;)
    {
      apply_householder<T>(reflectors_[k], v, k);
    }
    return v;
  }

  Vector<T> basis_vector(std::size_t j) const
  {
    auto v = raw_basis_vector(j);
    scal<T>(signs_[j], v);
    return v;
  }

  ArnoldiStep<T> step()
  {
    if (broken_)
    {
      throw KrylovError("HouseholderArnoldi: cannot extend past breakdown");
    }
    const std::size_t N = A_.size;
    const std::size_t j = steps();
    auto v = raw_basis_vector(j);
    Vector<T> u(N);
    A_.apply(v, u);
    matvecs_++;
    const T av_norm = nrm2<T>(u);
    std::size_t reductions = j + 1;  // forming v_j
    for (std::size_t k = 0; k <= j; k++)
    {
      apply_householder<T>(reflectors_[k], u, k);
    }
    reductions += j + 1;
    ArnoldiStep<T> out;
    out.h.assign(u.begin(), u.begin() + static_cast<std::ptrdiff_t>(j + 1));
    T hnext = T(0);
    if (j + 1 < N)
    {
      auto h = make_householder<T>(std::span<const T>(u).subspan(j + 1));
      reductions += 1;
      hnext = h.beta;
      reflectors_.push_back(std::move(h));
    }
    out.h.push_back(hnext);
    out.breakdown = !(std::abs(hnext) > T(tol_) * av_norm);
    // Sign normalization: h'_{ij} = d_i h_{ij} d_j with h'_{j+1,j} >= 0.
    const T dj = signs_[j];
    for (std::size_t i = 0; i <= j; i++)
    {
      out.h[i] *= signs_[i] * dj;
    }
    const T dnext = (hnext * dj >= T(0)) ? T(1) : T(-1);
    out.h[j + 1] = std::abs(hnext);
    out.reductions = reductions;
    signs_.push_back(dnext);
    H_.push_back(out.h);
    step_reductions_.push_back(reductions);
    broken_ = out.breakdown;
    return out;
  }

  // V_n y for the sign-normalized basis, by the nested reflector product.
  Vector<T> combine(std::span<const T> y) const
  {
    Vector<T> z(A_.size, T(0));
    for (std::size_t k = y.size(); k-- > 0;)
    {
      z[k] += signs_[k] * y[k];
      apply_householder<T>(reflectors_[k], z, k);
    }
    return z;
  }

  DenseMatrix<T> hessenberg() const
  {
    const std::size_t n = steps();
    DenseMatrix<T> H(n + 1, n);
    for (std::size_t j = 0; j < n; j++)
    {
      for (std::size_t i = 0; i < H_[j].size(); i++)
      {
        H(i, j) = H_[j][i];
      }
    }
    return H;
  }

  DenseMatrix<T> basis() const
  {
    const std::size_t n = steps();
    const std::size_t cols = broken_ ? n : std::min(n + 1, A_.size);
    DenseMatrix<T> V(A_.size, cols);
    for (std::size_t j = 0; j < cols; j++)
    {
      auto v = basis_vector(j);
      std::copy(v.begin(), v.end(), V.col(j).begin());
    }
    return V;
  }

  ArnoldiDecomposition<T> decomposition() const
  {
    ArnoldiDecomposition<T> d;
    d.V = basis();
    d.Hbar = hessenberg();
    d.n = steps();
    d.setup_reductions = setup_reductions_;
    d.step_reductions = step_reductions_;
    d.reductions = reductions();
    if (broken_)
    {
      d.breakdown_at = steps();
    }
    return d;
  }

private:
  LinearOperator<T> A_;
  double tol_;
  std::vector<Householder<T>> reflectors_;
  std::vector<Vector<T>> H_;
  std::vector<T> signs_;
  std::vector<std::size_t> step_reductions_;
  std::size_t setup_reductions_ = 0;
  std::size_t matvecs_ = 0;
  T beta_raw_ = T(0);
  bool broken_ = false;
};

template <typename T>
struct HouseholderArnoldiResult
{
  ArnoldiDecomposition<T> decomposition;
  std::vector<Vector<T>> reflectors;  // full-length w_1 .. w_{n+1}
};

template <typename T>
HouseholderArnoldiResult<T> householder_arnoldi(const LinearOperator<T> &A, std::span<const T> r0,
                                                std::size_t n)
{
  HouseholderArnoldi<T> process(A);
  process.start(r0);
  for (std::size_t j = 0; j < n; j++)
  {
    if (process.step().breakdown)
    {
      break;
    }
  }
  HouseholderArnoldiResult<T> out;
  out.decomposition = process.decomposition();
  for (std::size_t k = 0; k < process.reflector_count(); k++)
  {
    out.reflectors.push_back(process.reflector_vector(k));
  }
  return out;
}

}  // namespace krylov

#endif  // KRYLOV_ORTHO_HOUSEHOLDER_HPP
