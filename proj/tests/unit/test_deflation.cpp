// Copyright The Krylov Toolkit Authors.
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <vector>

#include <Eigen/Eigenvalues>

#include "krylov/deflation/gmres_e.hpp"
#include "krylov/deflation/harmonic_ritz.hpp"
#include "krylov/deflation/leja.hpp"
#include "krylov/deflation/polynomial.hpp"
#include "krylov/harness/generators.hpp"
#include "krylov/solvers.hpp"
#include "oracles.hpp"

using namespace krylov;

namespace
{

using Vec = std::vector<double>;

DenseMatrix<double> random_hessenberg(std::size_t rows, std::size_t cols, std::uint64_t seed)
{
  auto H = oracle::random_dense(rows, cols, seed);
  for (std::size_t j = 0; j < cols; j++)
  {
    for (std::size_t i = j + 2; i < rows; i++)
    {
      H(i, j) = 0.0;
    }
  }
  return H;
}

// Direct substitution into (H + h^2 H^{-T} e_m e_m^T) y = theta y with Eigen arithmetic.
double substitution_residual(const DenseMatrix<double> &Hm, double h, Complex theta,
                             const std::vector<Complex> &y)
{
  const Eigen::MatrixXd H = oracle::to_eigen(Hm);
  const auto m = H.rows();
  Eigen::VectorXd em = Eigen::VectorXd::Zero(m);
  em(m - 1) = 1.0;
  const Eigen::VectorXd f = H.transpose().fullPivLu().solve(em);
  const Eigen::MatrixXcd K = (H + h * h * f * em.transpose()).cast<Complex>();
  Eigen::VectorXcd yv(m);
  for (Eigen::Index i = 0; i < m; i++)
  {
    yv(i) = y[i];
  }
  return (K * yv - theta * yv).norm();
}

// Harmonic values from the pencil Hbar^T Hbar y = theta H^T y, Eigen generalized solver.
std::vector<Complex> pencil_values(const DenseMatrix<double> &Hbar)
{
  const Eigen::MatrixXd Hb = oracle::to_eigen(Hbar);
  const auto m = Hb.cols();
  const Eigen::MatrixXd G = Hb.transpose() * Hb;
  const Eigen::MatrixXd B = Hb.topRows(m).transpose();
  Eigen::GeneralizedEigenSolver<Eigen::MatrixXd> ges(G, B);
  std::vector<Complex> out;
  for (Eigen::Index k = 0; k < m; k++)
  {
    out.push_back(ges.alphas()(k) / ges.betas()(k));
  }
  std::sort(out.begin(), out.end(),
            [](Complex a, Complex b) { return std::abs(a) < std::abs(b); });
  return out;
}

double greedy_score(const std::vector<Complex> &prefix, Complex z)
{
  double s = 0.0;
  for (auto p : prefix)
  {
    s += std::log(std::abs(z - p));
  }
  return s;
}

class AuditedGmresE : public GmresECycle
{
public:
  using GmresECycle::GmresECycle;
  double worst_relation = 0.0;
  std::size_t cycles = 0;

protected:
  void after_cycle(const Vector<double> &dx) override
  {
    double res = 0.0;
    for (std::size_t j = 0; j < Z_.cols(); j++)
    {
      auto az = A_(Z_.col(j));
      for (std::size_t i = 0; i < std::min(V_.cols(), H_.rows()); i++)
      {
        axpy<double>(-H_(i, j), V_.col(i), az);
      }
      res += dot<double>(az, az);
    }
    worst_relation = std::max(worst_relation, std::sqrt(res));
    cycles++;
    GmresECycle::after_cycle(dx);
  }
};

}  // namespace

TEST_CASE("harmonic Ritz: h_next = 0 gives the eigenvalues of H_m")
{
  auto Hbar = random_hessenberg(7, 6, 3);
  auto H = Hbar.block(0, 0, 6, 6);
  auto set = harmonic_ritz(H, 0.0);
  Eigen::EigenSolver<Eigen::MatrixXd> es(oracle::to_eigen(H));
  std::vector<Complex> ref(es.eigenvalues().data(), es.eigenvalues().data() + 6);
  std::sort(ref.begin(), ref.end(), [](Complex a, Complex b) { return std::abs(a) < std::abs(b); });
  REQUIRE(set.values.size() == 6);
  for (std::size_t k = 0; k < 6; k++)
  {
    double best = 1e300;
    for (auto r : ref)
    {
      best = std::min(best, std::abs(set.values[k] - r));
    }
    CHECK(best <= 1e-12 * frobenius_norm(H));
  }
  CHECK(!set.generalized);
}

TEST_CASE("harmonic Ritz: symmetric A gives real values matching the pencil oracle")
{
  std::vector<double> eigs;
  for (int k = 1; k <= 30; k++)
  {
    eigs.push_back(0.5 * k);
  }
  auto A = make_operator(gen_spectrum(eigs, 8));
  auto r0 = random_uniform_vector(30, 9);
  auto d = arnoldi<double>(A, r0, 8, OrthoScheme::MGS);
  auto set = harmonic_ritz(d.Hbar);
  auto ref = pencil_values(d.Hbar);
  REQUIRE(set.values.size() == 8);
  for (std::size_t k = 0; k < 8; k++)
  {
    CHECK(std::abs(set.values[k].imag()) <= 1e-10 * std::abs(set.values[k]));
    CHECK(std::abs(set.values[k] - ref[k]) <= 1e-8 * std::abs(ref[k]));
  }
}

TEST_CASE("harmonic Ritz pairs pass the substitution audit for m <= 12")
{
  for (std::size_t m = 1; m <= 12; m++)
  {
    auto Hbar = random_hessenberg(m + 1, m, 100 + m);
    auto set = harmonic_ritz(Hbar);
    const auto H = Hbar.block(0, 0, m, m);
    const double h = Hbar(m, m - 1);
    const double hn = frobenius_norm(H);
    auto ref = pencil_values(Hbar);
    REQUIRE(set.values.size() == m);
    for (std::size_t k = 0; k < m; k++)
    {
      CHECK(substitution_residual(H, h, set.values[k], set.vectors[k]) <= 1e-10 * hn);
      CHECK(set.residual_norms[k] <= 1e-10 * hn);
      double best = 1e300;
      for (auto r : ref)
      {
        best = std::min(best, std::abs(set.values[k] - r));
      }
      CHECK(best <= 1e-8 * std::max(1.0, std::abs(set.values[k])));
    }
    for (std::size_t k = 1; k < m; k++)
    {
      CHECK(std::abs(set.values[k - 1]) <= std::abs(set.values[k]));
    }
  }
}

TEST_CASE("harmonic Ritz falls back to the pencil when H_m is singular")
{
  auto H = DenseMatrix<double>::from_rows({{1, 2}, {0, 0}});
  auto set = harmonic_ritz(H, 1.0);
  CHECK(set.generalized);
  CHECK(!set.values.empty());
}

TEST_CASE("leja_order")
{
  SUBCASE("single point")
  {
    std::vector<Complex> p{Complex(2, 0)};
    CHECK(leja_order(std::span<const Complex>(p)) == p);
  }
  SUBCASE("{1,2,3} -> (3,1,2)")
  {
    Vec p{1, 2, 3};
    auto o = leja_order(std::span<const double>(p));
    REQUIRE(o.size() == 3);
    CHECK(o[0] == Complex(3, 0));
    CHECK(o[1] == Complex(1, 0));
    CHECK(o[2] == Complex(2, 0));
  }
  SUBCASE("conjugate pairs stay adjacent")
  {
    std::vector<Complex> p{Complex(0.5, 0), Complex(2, 1), Complex(2, -1), Complex(-1, 0)};
    auto o = leja_order(std::span<const Complex>(p));
    REQUIRE(o.size() == 4);
    for (std::size_t k = 0; k < 4; k++)
    {
      if (o[k].imag() != 0.0)
      {
        REQUIRE(k + 1 < 4);
        CHECK(o[k + 1] == std::conj(o[k]));
        break;
      }
    }
  }
  SUBCASE("greedy criterion against brute force on real sets up to 6 points")
  {
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> dist(-5.0, 5.0);
    for (int trial = 0; trial < 30; trial++)
    {
      const std::size_t n = 1 + static_cast<std::size_t>(trial % 6);
      Vec p(n);
      for (auto &x : p)
      {
        x = dist(rng);
      }
      auto o = leja_order(std::span<const double>(p));
      // permutation
      std::vector<double> a(p), b;
      for (auto z : o)
      {
        b.push_back(z.real());
      }
      std::sort(a.begin(), a.end());
      std::sort(b.begin(), b.end());
      CHECK(a == b);
      // each position attains the maximum criterion over all remaining points
      std::vector<Complex> prefix;
      std::vector<double> remaining(p);
      for (std::size_t k = 0; k < n; k++)
      {
        double best = -1e300;
        for (auto x : remaining)
        {
          best = std::max(best, k == 0 ? std::abs(x) : greedy_score(prefix, Complex(x, 0)));
        }
        const double got = k == 0 ? std::abs(o[k]) : greedy_score(prefix, o[k]);
        CHECK(got >= best - 1e-12 * std::abs(best));
        prefix.push_back(o[k]);
        remaining.erase(std::find(remaining.begin(), remaining.end(), o[k].real()));
      }
    }
  }
}

TEST_CASE("ResidualPolynomial")
{
  std::vector<Complex> roots{Complex(2, 0), Complex(1, 1), Complex(1, -1)};
  ResidualPolynomial p(roots);
  CHECK(std::abs(p(0.0) - 1.0) == 0.0);
  for (auto z : roots)
  {
    CHECK(std::abs(p(z)) <= 1e-15);
  }
  std::vector<Complex> half{Complex(1, 1)};
  CHECK_THROWS_AS(ResidualPolynomial{half}, KrylovError);
  std::vector<Complex> zero{Complex(0, 0)};
  CHECK_THROWS_AS(ResidualPolynomial{zero}, KrylovError);

  // p(A) = I - A s(A) on a dense matrix
  auto Ad = oracle::random_dense(10, 10, 5);
  auto A = make_operator(Ad);
  auto v = random_uniform_vector(10, 6);
  auto pv = p.apply(A, v);
  auto sv = p.apply_s(A, v);
  auto asv = A(sv);
  for (std::size_t i = 0; i < 10; i++)
  {
    CHECK(std::abs(pv[i] - (v[i] - asv[i])) <= 1e-12 * nrm2<double>(v) * 10);
  }
  // against the explicit product with Eigen
  const Eigen::MatrixXd E = oracle::dense_of(A);
  const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(10, 10);
  const Eigen::MatrixXd P = (I - E / 2.0) * (I - E + E * E / 2.0);
  CHECK((P * oracle::to_eigen(v) - oracle::to_eigen(pv)).norm() <= 1e-12 * P.norm());
}

TEST_CASE("polynomial preconditioner from GMRES harmonic Ritz values")
{
  SUBCASE("A = I, degree 1: root 1, solved by one application")
  {
    auto A = identity_operator<double>(4);
    Vec b{1, 2, 3, 4};
    auto pp = build_poly_preconditioner(A, b, 1);
    REQUIRE(pp.poly.degree() == 1);
    CHECK(std::abs(pp.poly.roots()[0] - 1.0) <= 1e-14);
    auto x = pp.poly.apply_s(A, b);
    for (std::size_t i = 0; i < 4; i++)
    {
      CHECK(x[i] == doctest::Approx(b[i]).epsilon(1e-14));
    }
  }
  SUBCASE("p(A) r0 reproduces the GMRES residual")
  {
    auto Acsr = gen_convdiff(10, 10, 10.0);
    auto A = make_operator(Acsr);
    auto b = random_uniform_vector(100, 13);
    for (std::size_t m : {4u, 8u, 10u})
    {
      CAPTURE(m);
      auto pp = build_poly_preconditioner(A, b, m);
      GmresOptions o;
      o.rtol = 1e-30;
      o.max_iter = m;
      auto g = gmres<double>(A, b, {}, o);
      auto ax = A(g.x);
      Vec r(100);
      for (std::size_t i = 0; i < 100; i++)
      {
        r[i] = b[i] - ax[i];
      }
      auto pr = pp.poly.apply(A, b);
      axpy<double>(-1.0, r, pr);
      CHECK(nrm2<double>(pr) <= 1e-6 * nrm2<double>(b));
    }
  }
  SUBCASE("right polynomial preconditioning reduces outer iterations on diag(1..100)")
  {
    Vec d(100);
    std::iota(d.begin(), d.end(), 1.0);
    auto A = diagonal_operator(d);
    Vec b(100, 1.0);
    auto pp = build_poly_preconditioner(A, b, 10);
    GmresOptions o;
    o.rtol = 1e-8;
    auto plain = gmres<double>(A, b, {}, o);
    o.precond_side = PrecondSide::Right;
    o.preconditioner = pp.poly.s_operator(A);
    auto pre = gmres<double>(A, b, {}, o);
    MESSAGE("plain " << plain.iterations << ", polynomial-preconditioned " << pre.iterations);
    CHECK(pre.converged());
    CHECK(pre.iterations < plain.iterations);
  }
  SUBCASE("degree cap")
  {
    Vec d(60);
    std::iota(d.begin(), d.end(), 1.0);
    auto A = diagonal_operator(d);
    Vec b(60, 1.0);
    auto pp = build_poly_preconditioner(A, b, 25);
    CHECK(pp.poly.degree() <= kMaxPolyDegree);
    CHECK(!pp.warnings.empty());
  }
}

TEST_CASE("GMRES-E")
{
  SUBCASE("m2 = 0 is GMRES(m1)")
  {
    auto A = make_operator(gen_convdiff(8, 8, 10.0));
    auto b = random_uniform_vector(64, 21);
    GmresOptions o;
    o.restart = 7;
    o.max_iter = 300;
    auto g = gmres_restarted<double>(A, b, {}, o);
    auto e = gmres_e(A, b, {}, 7, 0, o);
    REQUIRE(g.residual_history.size() == e.residual_history.size());
    for (std::size_t k = 0; k < g.residual_history.size(); k++)
    {
      CHECK(oracle::rel_diff(g.residual_history[k], e.residual_history[k]) <= 1e-12);
    }
  }
  SUBCASE("deflating the small eigenvalue beats GMRES(12) and keeps A Z = V Hbar")
  {
    Vec d(100);
    d[0] = 0.01;
    for (std::size_t i = 1; i < 100; i++)
    {
      d[i] = static_cast<double>(i);
    }
    auto A = diagonal_operator(d);
    auto b = random_uniform_vector(100, 22);
    GmresOptions o;
    o.rtol = 1e-8;
    o.max_iter = 5000;
    o.restart = 12;
    auto g = gmres_restarted<double>(A, b, {}, o);
    AuditedGmresE cycle(A, o, 10, 2);
    auto e = run_restarted<double>(A, b, {}, o, cycle, 12);
    MESSAGE("GMRES(12) matvecs " << g.matvecs << ", GMRES-E(10,2) matvecs " << e.matvecs);
    CHECK(e.converged());
    CHECK(e.matvecs <= g.matvecs);
    CHECK(cycle.cycles > 1);
    CHECK(cycle.worst_relation <= 1e-11 * 99.0);
    CHECK(!cycle.selected_values().empty());
  }
}
