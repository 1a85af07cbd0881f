// Copyright The Krylov Toolkit Authors.
// SPDX-License-Identifier: Apache-2.0

#ifndef KRYLOV_ORTHO_ARNOLDI_HPP
#define KRYLOV_ORTHO_ARNOLDI_HPP

#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "krylov/core/blas.hpp"
#include "krylov/core/dense.hpp"
#include "krylov/core/errors.hpp"
#include "krylov/core/operator.hpp"
#include "krylov/ortho/icwy.hpp"
#include "krylov/ortho/scheme.hpp"

namespace krylov
{

struct ArnoldiOptions
{
  OrthoScheme scheme = OrthoScheme::MGS;
  // Happy breakdown when h_{j+1,j} <= breakdown_tol * ||A v_j||.
  double breakdown_tol = 1e-14;
  // CGSP: a radicand below this fraction of ||A v_j||^2 is recomputed by CGS2.
  double cgsp_retry_threshold = 1e-10;
  // CGSP: recomputations allowed per process before a negative radicand is fatal.
  int cgsp_max_retries = 1;
};

template <typename T>
struct ArnoldiDecomposition
{
  DenseMatrix<T> V;     // N x (n+1); N x n when the run ended in breakdown
  DenseMatrix<T> Hbar;  // (n+1) x n upper Hessenberg
  std::size_t n = 0;
  std::size_t reductions = 0;
  std::size_t setup_reductions = 0;
  std::vector<std::size_t> step_reductions;
  std::optional<std::size_t> breakdown_at;  // 1-based step count at happy breakdown
};

template <typename T>
struct ArnoldiStep
{
  Vector<T> h;  // column j of Hbar, entries 0..j+1
  bool breakdown = false;
  std::size_t reductions = 0;
};

//
// Incremental Arnoldi process A V_n = V_{n+1} Hbar_n with a selectable orthogonalization
// scheme and optional diagonal inner-product weight. Each call to step() appends one column.
// ICWY runs with lagged normalization: the product A w is taken on the not yet normalized
// candidate so that projection, correction row and normalization share one reduction.
//
template <typename T>
class ArnoldiProcess
{
public:
  ArnoldiProcess(LinearOperator<T> A, ArnoldiOptions opts = {}, Vector<T> weight = {})
    : A_(std::move(A)), opts_(opts), weight_(std::move(weight)), V_(A_.size, 0)
  {
    if (!weight_.empty())
    {
      detail::check_same_size(weight_.size(), A_.size, "ArnoldiProcess weight");
      for (auto d : weight_)
      {
        if (!(d > T(0)))
        {
          throw KrylovError("ArnoldiProcess: inner-product weights must be positive");
        }
      }
    }
  }

  const ArnoldiOptions &options() const { return opts_; }
  OrthoScheme scheme() const { return opts_.scheme; }
  std::size_t size() const { return A_.size; }

  // v_1 = r0 / ||r0||_D; returns ||r0||_D.
  T start(std::span<const T> r0)
  {
    detail::check_same_size(r0.size(), A_.size, "ArnoldiProcess::start");
    V_ = DenseMatrix<T>(A_.size, 0);
    H_.clear();
    step_reductions_.clear();
    icwy_ = IcwyState<T>(8);
    broken_ = false;
    retries_ = 0;
    matvecs_ = 0;
    if (opts_.scheme == OrthoScheme::ICWY)
    {
      return start_icwy(r0);
    }
    setup_reductions_ = 1;
    const T beta = norm(r0);
    if (beta == T(0))
    {
      throw KrylovError("ArnoldiProcess::start: zero starting vector");
    }
    append_basis(r0, T(1) / beta);
    return beta;
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
  int cgsp_retries() const { return retries_; }

  const DenseMatrix<T> &basis() const { return V_; }
  std::span<const T> v(std::size_t j) const { return V_.col(j); }
  std::span<const T> column(std::size_t j) const { return H_[j]; }

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

  // V_n y over the first y.size() basis vectors.
  Vector<T> combine(std::span<const T> y) const { return matvec(V_, y); }

  // Appends column j with w = A v_j.
  ArnoldiStep<T> step()
  {
    check_can_step();
    if (opts_.scheme == OrthoScheme::ICWY)
    {
      return step_icwy();
    }
    Vector<T> w(A_.size);
    A_.apply(V_.col(steps()), w);
    matvecs_++;
    return orthogonalize_and_commit(std::move(w));
  }

  // Appends a column for an externally formed product w = A z_j (flexible and augmented
  // variants). Not available with ICWY, whose lagged normalization needs A v_j itself.
  ArnoldiStep<T> step_with_product(std::span<const T> w)
  {
    check_can_step();
    if (opts_.scheme == OrthoScheme::ICWY)
    {
      throw KrylovError("ArnoldiProcess: ICWY does not support externally supplied products");
    }
    detail::check_same_size(w.size(), A_.size, "ArnoldiProcess::step_with_product");
    return orthogonalize_and_commit(Vector<T>(w.begin(), w.end()));
  }

  // Removes the most recent column and its basis vector (dropping a dependent augmentation
  // vector). Not available with ICWY.
  void drop_last()
  {
    if (steps() == 0 || opts_.scheme == OrthoScheme::ICWY)
    {
      throw KrylovError("ArnoldiProcess::drop_last: nothing to drop");
    }
    if (!broken_)
    {
      V_.resize_cols(V_.cols() - 1);
    }
    H_.pop_back();
    step_reductions_.pop_back();
    broken_ = false;
  }

  ArnoldiDecomposition<T> decomposition() const
  {
    ArnoldiDecomposition<T> d;
    d.V = V_;
    d.Hbar = hessenberg();
    d.n = steps();
    d.setup_reductions = setup_reductions_;
    d.step_reductions.assign(step_reductions_.begin(), step_reductions_.end());
    d.reductions = reductions();
    if (broken_)
    {
      d.breakdown_at = steps();
    }
    return d;
  }

private:
  T inner(std::span<const T> x, std::span<const T> y) const
  {
    return weight_.empty() ? dot<T>(x, y) : dot<T>(x, y, weight_);
  }
  T norm(std::span<const T> x) const { return std::sqrt(inner(x, x)); }

  void check_can_step() const
  {
    if (V_.cols() == 0)
    {
      throw KrylovError("ArnoldiProcess: start() not called");
    }
    if (broken_)
    {
      throw KrylovError("ArnoldiProcess: cannot extend past breakdown");
    }
  }

  void append_basis(std::span<const T> w, T scale)
  {
    const std::size_t k = V_.cols();
    V_.resize_cols(k + 1);
    auto col = V_.col(k);
    for (std::size_t i = 0; i < w.size(); i++)
    {
      col[i] = w[i] * scale;
    }
  }

  // h = V_k^T w (one batch); w -= V_k h.
  Vector<T> project_batch(Vector<T> &w, std::size_t k) const
  {
    Vector<T> h(k);
    for (std::size_t i = 0; i < k; i++)
    {
      h[i] = inner(V_.col(i), w);
    }
    for (std::size_t i = 0; i < k; i++)
    {
      axpy<T>(-h[i], V_.col(i), w);
    }
    return h;
  }

  ArnoldiStep<T> orthogonalize_and_commit(Vector<T> w)
  {
    const std::size_t j = steps();  // 0-based column index
    const std::size_t k = j + 1;    // basis vectors to project against
    ArnoldiStep<T> out;
    out.h.assign(k + 1, T(0));
    // ||A v_j|| sets the breakdown scale; it is batched with the first inner products.
    T w_norm = norm(w);
    T hnext = T(0);
    switch (opts_.scheme)
    {
      case OrthoScheme::MGS:
        for (std::size_t i = 0; i < k; i++)
        {
          out.h[i] = inner(V_.col(i), w);
          axpy<T>(-out.h[i], V_.col(i), w);
        }
        hnext = norm(w);
        out.reductions = k + 1;
        break;
      case OrthoScheme::CGS:
      {
        auto h = project_batch(w, k);
        std::copy(h.begin(), h.end(), out.h.begin());
        hnext = norm(w);
        out.reductions = 2;
        break;
      }
      case OrthoScheme::CGS2:
      {
        auto h1 = project_batch(w, k);
        auto h2 = project_batch(w, k);
        for (std::size_t i = 0; i < k; i++)
        {
          out.h[i] = h1[i] + h2[i];
        }
        hnext = norm(w);
        out.reductions = 3;
        break;
      }
      case OrthoScheme::CGSP:
      {
        // One batch: V^T w and (w, w); the new norm follows from the Pythagorean identity.
        const T varsigma = w_norm * w_norm;
        auto h = project_batch(w, k);
        T radicand = varsigma;
        for (auto v : h)
        {
          radicand -= v * v;
        }
        out.reductions = 1;
        if (radicand > T(opts_.cgsp_retry_threshold) * varsigma)
        {
          hnext = std::sqrt(radicand);
        }
        else if (retries_ < opts_.cgsp_max_retries)
        {
          retries_++;
          auto h2 = project_batch(w, k);
          for (std::size_t i = 0; i < k; i++)
          {
            h[i] += h2[i];
          }
          hnext = norm(w);
          out.reductions += 2;
        }
        else if (radicand < T(0))
        {
          throw OrthogonalityBreakdown("CGS-P: negative radicand at step " + std::to_string(k) +
                                           " after exhausting reorthogonalization retries",
                                       k);
        }
        else
        {
          hnext = std::sqrt(radicand);
        }
        std::copy(h.begin(), h.end(), out.h.begin());
        break;
      }
      case OrthoScheme::ICWY:
        throw KrylovError("unreachable");
    }
    out.h[k] = hnext;
    out.breakdown = !(hnext > T(opts_.breakdown_tol) * w_norm);
    H_.push_back(out.h);
    step_reductions_.push_back(out.reductions);
    if (out.breakdown)
    {
      broken_ = true;
    }
    else
    {
      append_basis(w, T(1) / hnext);
    }
    return out;
  }

  T start_icwy(std::span<const T> r0)
  {
    // One merged reduction gives ||r0||, (A r0, r0) and ||A r0||.
    Vector<T> ar0(A_.size);
    A_.apply(r0, ar0);
    matvecs_++;
    setup_reductions_ = 1;
    const T beta2 = inner(r0, r0);
    const T rar = inner(r0, ar0);
    const T arar = inner(ar0, ar0);
    const T beta = std::sqrt(beta2);
    if (beta == T(0))
    {
      throw KrylovError("ArnoldiProcess::start: zero starting vector");
    }
    append_basis(r0, T(1) / beta);
    icwy_.append_row({});
    const T h11 = rar / beta2;
    pending_ = {h11};
    w_ = ar0;
    scal<T>(T(1) / beta, w_);
    axpy<T>(-h11, V_.col(0), w_);
    av_norm_ = std::sqrt(arar) / beta;
    return beta;
  }

  ArnoldiStep<T> step_icwy()
  {
    const std::size_t j = steps();  // completes column j; w_ is the candidate for v_{j+1}
    const std::size_t k = j + 1;
    Vector<T> wn(A_.size);
    A_.apply(w_, wn);
    matvecs_++;
    // Single reduction: l = V^T w, u = [V, w]^T wn, ||w||^2, ||wn||^2.
    Vector<T> l(k), u(k + 1);
    for (std::size_t i = 0; i < k; i++)
    {
      l[i] = inner(V_.col(i), w_);
      u[i] = inner(V_.col(i), wn);
    }
    u[k] = inner(w_, wn);
    const T hnext = norm(w_);
    const T wn_norm = norm(wn);

    ArnoldiStep<T> out;
    out.reductions = 1;
    out.h = pending_;
    out.h.push_back(hnext);
    out.breakdown = !(hnext > T(opts_.breakdown_tol) * av_norm_);
    H_.push_back(out.h);
    step_reductions_.push_back(1);
    if (out.breakdown)
    {
      broken_ = true;
      return out;
    }
    const T inv = T(1) / hnext;
    append_basis(w_, inv);
    scal<T>(inv, l);
    scal<T>(inv, u);
    u[k] *= inv;
    scal<T>(inv, wn);
    av_norm_ = wn_norm * inv;
    icwy_.append_row(l);
    pending_ = icwy_.solve(u);
    for (std::size_t i = 0; i <= k; i++)
    {
      axpy<T>(-pending_[i], V_.col(i), wn);
    }
    w_ = std::move(wn);
    return out;
  }

  LinearOperator<T> A_;
  ArnoldiOptions opts_;
  Vector<T> weight_;
  DenseMatrix<T> V_;
  std::vector<Vector<T>> H_;
  std::vector<std::size_t> step_reductions_;
  std::size_t setup_reductions_ = 0;
  std::size_t matvecs_ = 0;
  bool broken_ = false;
  int retries_ = 0;

  // ICWY lagged state
  IcwyState<T> icwy_;
  Vector<T> w_;
  Vector<T> pending_;
  T av_norm_ = T(0);
};

// Runs up to n steps from r0, stopping early at happy breakdown.
template <typename T>
ArnoldiDecomposition<T> arnoldi(const LinearOperator<T> &A, std::span<const T> r0, std::size_t n,
                                OrthoScheme scheme, Vector<T> weight = {})
{
  ArnoldiOptions opts;
  opts.scheme = scheme;
  ArnoldiProcess<T> process(A, opts, std::move(weight));
  process.start(r0);
  for (std::size_t j = 0; j < n; j++)
  {
    if (process.step().breakdown)
    {
      break;
    }
  }
  return process.decomposition();
}

// ||A V_n - V_{k} Hbar(0:k, :)||_F with k = V.cols(); covers the breakdown layout.
template <typename T>
T arnoldi_relation_residual(const LinearOperator<T> &A, const DenseMatrix<T> &V,
                            const DenseMatrix<T> &Hbar)
{
  const std::size_t n = Hbar.cols();
  const std::size_t k = std::min(V.cols(), Hbar.rows());
  T sum = T(0);
  Vector<T> av(A.size);
  for (std::size_t j = 0; j < n; j++)
  {
    A.apply(V.col(j), av);
    for (std::size_t i = 0; i < k; i++)
    {
      axpy<T>(-Hbar(i, j), V.col(i), av);
    }
    sum += dot<T>(av, av);
  }
  return std::sqrt(sum);
}

// ||V^T V - I||_2 via the largest singular value is not available in templated code; this
// returns the Frobenius norm, an upper bound of the 2-norm.
template <typename T>
T orthogonality_loss_fro(const DenseMatrix<T> &V, std::span<const T> weight = {})
{
  T sum = T(0);
  for (std::size_t j = 0; j < V.cols(); j++)
  {
    for (std::size_t i = 0; i < V.cols(); i++)
    {
      const T g = weight.empty() ? dot<T>(V.col(i), V.col(j)) : dot<T>(V.col(i), V.col(j), weight);
      const T e = g - (i == j ? T(1) : T(0));
      sum += e * e;
    }
  }
  return std::sqrt(sum);
}

}  // namespace krylov

#endif  // KRYLOV_ORTHO_ARNOLDI_HPP
