// Copyright The Krylov Toolkit Authors.
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <cmath>
#include <vector>

#include "krylov/harness/generators.hpp"
#include "krylov/ortho/arnoldi.hpp"
#include "krylov/ortho/householder.hpp"
#include "krylov/ortho/icwy.hpp"
#include "oracles.hpp"

using namespace krylov;

namespace
{

const std::vector<OrthoScheme> kSchemes = {OrthoScheme::MGS, OrthoScheme::CGS, OrthoScheme::CGS2,
                                           OrthoScheme::CGSP, OrthoScheme::ICWY};

// Plain Gram-Schmidt on the explicit Krylov sequence, Eigen-based.
struct GsOracle
{
  Eigen::MatrixXd V, H;
};

GsOracle dense_gram_schmidt(const Eigen::MatrixXd &A, const Eigen::VectorXd &r0, int n)
{
  GsOracle o;
  o.V = Eigen::MatrixXd::Zero(A.rows(), n + 1);
  o.H = Eigen::MatrixXd::Zero(n + 1, n);
  o.V.col(0) = r0 / r0.norm();
  for (int j = 0; j < n; j++)
  {
    Eigen::VectorXd w = A * o.V.col(j);
    // twice, for an accurate reference
    for (int pass = 0; pass < 2; pass++)
    {
      const Eigen::VectorXd c = o.V.leftCols(j + 1).transpose() * w;
      w -= o.V.leftCols(j + 1) * c;
      o.H.col(j).head(j + 1) += c;
    }
    o.H(j + 1, j) = w.norm();
    o.V.col(j + 1) = w / w.norm();
  }
  return o;
}

DenseMatrix<double> hilbert_like(std::size_t n)
{
  DenseMatrix<double> H(n, n);
  for (std::size_t j = 0; j < n; j++)
  {
    for (std::size_t i = 0; i < n; i++)
    {
      H(i, j) = 1.0 / static_cast<double>(i + j + 1);
    }
  }
  return H;
}

}  // namespace

TEST_CASE("Arnoldi on the identity breaks down at step 1 for every scheme")
{
  auto A = identity_operator<double>(4);
  std::vector<double> r0{1, -2, 0.5, 3};
  for (auto s : kSchemes)
  {
    CAPTURE(to_string(s));
    auto d = arnoldi<double>(A, r0, 3, s);
    CHECK(d.n == 1);
    REQUIRE(d.breakdown_at.has_value());
    CHECK(*d.breakdown_at == 1);
    CHECK(d.Hbar.rows() == 2);
    CHECK(d.Hbar(0, 0) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(std::abs(d.Hbar(1, 0)) <= 1e-15);
  }
}

TEST_CASE("Arnoldi on diag(1,2) matches the Gram-Schmidt oracle")
{
  auto A = make_operator(DenseMatrix<double>::from_rows({{1, 0}, {0, 2}}));
  const double s = 1.0 / std::sqrt(2.0);
  std::vector<double> r0{s, s};
  for (auto sc : kSchemes)
  {
    CAPTURE(to_string(sc));
    auto d = arnoldi<double>(A, r0, 1, sc);
    CHECK(d.Hbar(0, 0) == doctest::Approx(1.5).epsilon(1e-14));
    CHECK(d.Hbar(1, 0) == doctest::Approx(0.5).epsilon(1e-14));
    auto o = dense_gram_schmidt(oracle::dense_of(A), oracle::to_eigen(r0), 1);
    CHECK((oracle::to_eigen(d.V) - o.V).norm() <= 1e-14);
  }
}

TEST_CASE("per-step reduction counts follow the scheme model exactly")
{
  auto A = make_operator(gen_convdiff(6, 6, 10.0));
  auto r0 = random_uniform_vector(36, 3);
  for (auto s : kSchemes)
  {
    CAPTURE(to_string(s));
    auto d = arnoldi<double>(A, r0, 12, s);
    REQUIRE(d.n == 12);
    REQUIRE(d.step_reductions.size() == 12);
    for (std::size_t j = 0; j < 12; j++)
    {
      CHECK(d.step_reductions[j] == modeled_step_reductions(s, j + 1));
    }
    std::size_t total = d.setup_reductions;
    for (auto c : d.step_reductions)
    {
      total += c;
    }
    CHECK(d.reductions == total);
  }
  CHECK(modeled_step_reductions(OrthoScheme::MGS, 5) == 6);
}

TEST_CASE("Arnoldi relation, orthogonality and scheme equivalence on convection-diffusion")
{
  auto Acsr = gen_convdiff(10, 10, 10.0);
  auto A = make_operator(Acsr);
  auto r0 = random_uniform_vector(100, 17);
  const double anorm = Acsr.frobenius_norm();
  auto ref = arnoldi<double>(A, r0, 20, OrthoScheme::MGS);
  for (auto s : kSchemes)
  {
    CAPTURE(to_string(s));
    auto d = arnoldi<double>(A, r0, 30, s);
    REQUIRE(d.n == 30);
    CHECK(arnoldi_relation_residual(A, d.V, d.Hbar) <= 1e-12 * anorm);
    if (s == OrthoScheme::CGS2)
    {
      CHECK(oracle::orthogonality_loss_2(d.V) <= 1e-10);
    }
    if (s == OrthoScheme::MGS)
    {
      // MGS loses orthogonality in proportion to the residual reduction; reported only at
      // n = 30, bounded at n = 20 below.
      MESSAGE("MGS orthogonality loss at n = 30: " << oracle::orthogonality_loss_2(d.V));
    }
    // structure
    for (std::size_t j = 0; j < d.n; j++)
    {
      CHECK(d.Hbar(j + 1, j) >= 0.0);
      for (std::size_t i = j + 2; i < d.Hbar.rows(); i++)
      {
        CHECK(d.Hbar(i, j) == 0.0);
      }
    }
    auto e = arnoldi<double>(A, r0, 20, s);
    if (s == OrthoScheme::MGS)
    {
      CHECK(oracle::orthogonality_loss_2(e.V) <= 1e-8);
    }
    for (std::size_t j = 0; j <= 20; j++)
    {
      double diff = 0.0;
      for (std::size_t i = 0; i < 100; i++)
      {
        diff = std::max(diff, std::abs(std::abs(e.V(i, j)) - std::abs(ref.V(i, j))));
      }
      CHECK(diff <= 1e-8);
    }
    CHECK(frobenius_norm(e.Hbar - ref.Hbar) <= 1e-8 * frobenius_norm(ref.Hbar));
  }
  auto hh = householder_arnoldi<double>(A, r0, 30);
  CHECK(arnoldi_relation_residual(A, hh.decomposition.V, hh.decomposition.Hbar) <= 1e-12 * anorm);
  CHECK(oracle::orthogonality_loss_2(hh.decomposition.V) <= 1e-10);
  auto hh20 = householder_arnoldi<double>(A, r0, 20);
  CHECK(frobenius_norm(hh20.decomposition.Hbar - ref.Hbar) <= 1e-8 * frobenius_norm(ref.Hbar));
}

TEST_CASE("happy breakdown at the grade of r0 for every scheme")
{
  // 5 distinct eigenvalues, each repeated, in a 12x12 symmetric matrix: grade 5.
  std::vector<double> eigs{1, 2, 3, 4, 5, 1, 2, 3, 4, 5, 1, 2};
  auto A = make_operator(gen_spectrum(eigs, 5));
  auto r0 = random_uniform_vector(12, 6);
  for (auto s : kSchemes)
  {
    CAPTURE(to_string(s));
    auto d = arnoldi<double>(A, r0, 11, s);
    REQUIRE(d.breakdown_at.has_value());
    CHECK(*d.breakdown_at == 5);
    CHECK(d.V.cols() == 5);
  }
  auto hh = householder_arnoldi<double>(A, r0, 11);
  REQUIRE(hh.decomposition.breakdown_at.has_value());
  CHECK(*hh.decomposition.breakdown_at == 5);
}

TEST_CASE("weighted Arnoldi produces a D-orthonormal basis")
{
  auto A = make_operator(gen_convdiff(6, 6, 5.0));
  auto r0 = random_uniform_vector(36, 9);
  std::vector<double> w(36);
  for (std::size_t i = 0; i < 36; i++)
  {
    w[i] = 0.5 + static_cast<double>(i % 5);
  }
  auto d = arnoldi<double>(A, r0, 15, OrthoScheme::MGS, w);
  CHECK(oracle::orthogonality_loss_2(d.V, w) <= 1e-10);
  CHECK(arnoldi_relation_residual(A, d.V, d.Hbar) <= 1e-12 * frobenius_norm(to_dense(A)));
}

TEST_CASE("CGSP negative radicand is reported distinctly from happy breakdown")
{
  // On the 20x20 Hilbert matrix the Pythagorean radicand turns negative at step 14.
  auto A = make_operator(hilbert_like(20));
  std::vector<double> r0(20, 1.0);
  auto run = [&](int budget, ArnoldiProcess<double> &p)
  {
    p.start(r0);
    for (int j = 0; j < 19; j++)
    {
      if (p.step().breakdown)
      {
        break;
      }
    }
  };
  ArnoldiOptions opts;
  opts.scheme = OrthoScheme::CGSP;
  opts.cgsp_max_retries = 0;
  ArnoldiProcess<double> p(A, opts);
  CHECK_THROWS_AS(run(0, p), OrthogonalityBreakdown);
  CHECK(!p.broken_down());

  opts.cgsp_max_retries = 100;
  ArnoldiProcess<double> q(A, opts);
  CHECK_NOTHROW(run(100, q));
  CHECK(q.cgsp_retries() > 0);
  // each retry adds the two CGS2 reductions to its step
  std::size_t extra = 0;
  for (std::size_t j = 0; j < q.step_reductions().size(); j++)
  {
    extra += q.step_reductions()[j] - 1;
  }
  CHECK(extra == 2 * static_cast<std::size_t>(q.cgsp_retries()));
}

TEST_CASE("Householder Arnoldi")
{
  SUBCASE("identity matches MGS up to signs")
  {
    auto A = identity_operator<double>(5);
    std::vector<double> r0{0.3, -1, 2, 0.1, 0.7};
    auto hh = householder_arnoldi<double>(A, r0, 3);
    auto m = arnoldi<double>(A, r0, 3, OrthoScheme::MGS);
    REQUIRE(hh.decomposition.n == m.n);
    for (std::size_t i = 0; i < m.Hbar.rows(); i++)
    {
      CHECK(std::abs(std::abs(hh.decomposition.Hbar(i, 0)) - std::abs(m.Hbar(i, 0))) <= 1e-15);
    }
  }
  SUBCASE("sign(0) = +1 for the first reflector")
  {
    auto A = make_operator(gen_convdiff(3, 3, 0.0));
    std::vector<double> r0{0, 3, 4, 0, 0, 0, 0, 0, 0};
    auto hh = householder_arnoldi<double>(A, r0, 2);
    const auto &w1 = hh.reflectors[0];
    // w1 = r0 + ||r0|| e1, up to normalization
    const double scale = w1[1] / 3.0;
    CHECK(w1[0] == doctest::Approx(5.0 * scale));
    CHECK(w1[2] == doctest::Approx(4.0 * scale));
    // reflector k vanishes in its first k entries
    for (std::size_t k = 0; k < hh.reflectors.size(); k++)
    {
      for (std::size_t i = 0; i < k; i++)
      {
        CHECK(hh.reflectors[k][i] == 0.0);
      }
    }
  }
  SUBCASE("ill-conditioned Hilbert matrix keeps orthogonality while MGS loses it")
  {
    auto A = make_operator(hilbert_like(12));
    std::vector<double> r0(12);
    for (std::size_t i = 0; i < 12; i++)
    {
      r0[i] = 1.0 + 0.1 * static_cast<double>(i);
    }
    auto hh = householder_arnoldi<double>(A, r0, 8);
    auto m = arnoldi<double>(A, r0, 8, OrthoScheme::MGS);
    const double loss_hh = oracle::orthogonality_loss_2(hh.decomposition.V);
    const double loss_mgs = oracle::orthogonality_loss_2(m.V);
    MESSAGE("Householder loss " << loss_hh << ", MGS loss " << loss_mgs);
    CHECK(loss_hh <= 1e-13);
    CHECK(loss_mgs > loss_hh);
  }
}

TEST_CASE("icwy_project")
{
  SUBCASE("one column: plain projection")
  {
    DenseMatrix<double> V(3, 1);
    V(0, 0) = 1.0;
    auto st = IcwyState<double>::from_basis(V);
    std::vector<double> w{2, 3, 4};
    auto h = icwy_project(st, V, std::span<const double>(w));
    REQUIRE(h.size() == 1);
    CHECK(h[0] == 2.0);
  }
  SUBCASE("matches the MGS loop on a nearly orthonormal basis")
  {
    auto Q = random_orthogonal(20, 4);
    auto V = leading_columns(Q, 5);
    // perturb orthogonality slightly so the correction matters
    for (std::size_t j = 1; j < 5; j++)
    {
      axpy<double>(1e-6, V.col(j - 1), V.col(j));
    }
    auto st = IcwyState<double>::from_basis(V);
    for (std::size_t i = 0; i < st.size(); i++)
    {
      for (std::size_t j = i; j < st.size(); j++)
      {
        CHECK(st.L()(i, j) == 0.0);
      }
    }
    auto w = random_uniform_vector(20, 8);
    auto h = icwy_project(st, V, std::span<const double>(w));
    auto ww = w;
    for (std::size_t j = 0; j < 5; j++)
    {
      const double c = dot<double>(V.col(j), ww);
      axpy<double>(-c, V.col(j), ww);
      CHECK(std::abs(h[j] - c) <= 1e-13 * std::max(1.0, std::abs(c)));
    }
  }
}
