// Copyright The Krylov Toolkit Authors.
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "krylov/ca/basis.hpp"
#include "krylov/ca/solvers.hpp"
#include "krylov/ca/tsqr.hpp"
#include "krylov/core/eig.hpp"
#include "krylov/core/qr.hpp"
#include "krylov/harness/generators.hpp"
#include "krylov/solvers.hpp"
#include "oracles.hpp"

using namespace krylov;

namespace
{

using Vec = std::vector<double>;

GmresOptions fixed_steps(std::size_t n)
{
  GmresOptions o;
  o.rtol = 1e-30;
  o.max_iter = n;
  return o;
}

double max_history_diff(const SolveReport &a, const SolveReport &b, std::size_t count)
{
  REQUIRE(a.residual_history.size() > count);
  REQUIRE(b.residual_history.size() > count);
  double worst = 0.0;
  for (std::size_t k = 0; k <= count; k++)
  {
    worst = std::max(worst, oracle::rel_diff(a.residual_history[k], b.residual_history[k]));
  }
  return worst;
}

double relation_residual(const LinearOperator<double> &A, const BasisResult &B)
{
  const std::size_t s = B.Bbar.cols();
  const Eigen::MatrixXd W = oracle::to_eigen(B.W);
  const Eigen::MatrixXd Ad = oracle::dense_of(A);
  const Eigen::MatrixXd lhs = Ad * W.leftCols(s);
  const Eigen::MatrixXd rhs = W * oracle::to_eigen(B.Bbar);
  return (lhs - rhs).norm();
}

double op_norm2(const LinearOperator<double> &A)
{
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(oracle::dense_of(A));
  return svd.singularValues()(0);
}

double cond2(const Eigen::MatrixXd &M)
{
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(M);
  const auto &sv = svd.singularValues();
  return sv(0) / sv(sv.size() - 1);
}

// Compares R factors up to the sign of each row.
double r_diff_up_to_signs(const DenseMatrix<double> &R1, const DenseMatrix<double> &R2)
{
  double worst = 0.0;
  for (std::size_t i = 0; i < R1.rows(); i++)
  {
    const double sgn = (R1(i, i) >= 0.0) == (R2(i, i) >= 0.0) ? 1.0 : -1.0;
    for (std::size_t j = 0; j < R1.cols(); j++)
    {
      worst = std::max(worst, std::abs(R1(i, j) - sgn * R2(i, j)));
    }
  }
  return worst;
}

}  // namespace

TEST_SUITE("basis")
{
  TEST_CASE("monomial basis on the identity")
  {
    auto A = identity_operator<double>(5);
    Vec w(5, 0.0);
    w[2] = 1.0;
    auto B = build_basis(A, w, 2, BasisSpec::monomial());
    CHECK(B.W.cols() == 3);
    for (std::size_t j = 0; j < 3; j++)
    {
      for (std::size_t i = 0; i < 5; i++)
      {
        CHECK(B.W(i, j) == w[i]);
      }
    }
    CHECK(B.Bbar(1, 0) == 1.0);
    CHECK(B.Bbar(2, 1) == 1.0);
    CHECK(B.Bbar(0, 0) == 0.0);
    CHECK(B.Bbar(1, 1) == 0.0);
    CHECK(B.Bbar(0, 1) == 0.0);
    CHECK(B.matvecs == 2);
  }

  TEST_CASE("Newton shift annihilates its eigencomponent")
  {
    auto A = diagonal_operator<double>({1.0, 2.0});
    Vec w{1.0, 1.0};
    auto spec = BasisSpec::newton({Complex(1.0), Complex(2.0)});
    auto B = build_basis(A, w, 1, spec);
    CHECK(B.W(0, 1) == 0.0);
    CHECK(B.W(1, 1) == doctest::Approx(1.0));
    CHECK(B.Bbar(0, 0) == 1.0);
    CHECK(B.Bbar(1, 0) == 1.0);
    // Both shifts together annihilate the whole vector: an exact collapse.
    CHECK_THROWS_AS(build_basis(A, w, 2, spec), BasisCollapseError);
  }

  TEST_CASE("basis relation for every spec on a random 40x40 matrix")
  {
    auto A = make_operator(oracle::random_dense(40, 40, 5));
    auto w = oracle::random_vector(40, 6);
    const double wn = nrm2<double>(w);
    for (auto &x : w)
    {
      x /= wn;
    }
    const double anorm = op_norm2(A);
    auto ritz = warmup_ritz(A, w, 6).values;
    REQUIRE(ritz.size() == 6);
    std::vector<BasisSpec> specs{BasisSpec::monomial(), newton_from_ritz(ritz),
                                 chebyshev_from_ritz(ritz)};
    BasisSpec scaled = newton_from_ritz(ritz);
    scaled.normalize = true;
    specs.push_back(scaled);
    BasisSpec cheb_scaled = chebyshev_from_ritz(ritz);
    cheb_scaled.normalize = true;
    specs.push_back(cheb_scaled);
    for (const auto &spec : specs)
    {
      CAPTURE(static_cast<int>(spec.kind));
      CAPTURE(spec.normalize);
      auto B = build_basis(A, w, 6, spec);
      const double wnorm = oracle::to_eigen(B.W).leftCols(6).norm();
      CHECK(relation_residual(A, B) <= 1e-12 * anorm * wnorm);
    }
  }

  TEST_CASE("complex Ritz shifts produce a real basis with the pair coupling in Bbar")
  {
    // Rotation block with eigenvalues 1 +- 2i and a real eigenvalue 3.
    auto A = make_operator(DenseMatrix<double>::from_rows({{1, -2, 0}, {2, 1, 0}, {0, 0, 3}}));
    Vec w{1.0, 0.5, 0.25};
    auto spec = BasisSpec::newton({Complex(1, 2), Complex(1, -2), Complex(3)});
    auto B = build_basis(A, w, 2, spec);
    CHECK(B.Bbar(0, 0) == 1.0);
    CHECK(B.Bbar(1, 1) == 1.0);
    CHECK(B.Bbar(0, 1) == doctest::Approx(-4.0));
    CHECK(relation_residual(A, B) <= 1e-13);
    // ((A - 1)^2 + 4) w leaves only the eigencomponent at 3, scaled by (3 - 1)^2 + 4.
    CHECK(std::abs(B.W(0, 2)) <= 1e-14);
    CHECK(std::abs(B.W(1, 2)) <= 1e-14);
    CHECK(B.W(2, 2) == doctest::Approx(8.0 * 0.25));
    // The full characteristic polynomial annihilates w.
    CHECK_THROWS_AS(build_basis(A, w, 3, spec), BasisCollapseError);
  }

  TEST_CASE("spec validation")
  {
    CHECK_THROWS_AS(BasisSpec::newton({Complex(1, 1), Complex(2)}).validate(), KrylovError);
    CHECK_NOTHROW(BasisSpec::newton({Complex(1, 1), Complex(1, -1)}).validate());
    CHECK_THROWS_AS(BasisSpec::newton({Complex(1)}, {-1.0}).validate(), KrylovError);
    CHECK_THROWS_AS(BasisSpec::chebyshev(0.0, -1.0, 0.0), KrylovError);
    auto c = BasisSpec::chebyshev(2.0, 3.0, 1.0);
    CHECK(c.scale == 3.0);
    CHECK(c.focal_sq == doctest::Approx(8.0));
    auto A = identity_operator<double>(3);
    Vec w{1, 0, 0};
    CHECK_THROWS_AS(build_basis(A, w, 0, BasisSpec::monomial()), KrylovError);
    CHECK_THROWS_AS(build_basis(A, w, 2, BasisSpec::newton()), KrylovError);
  }

  TEST_CASE("shift sequence splits a pair cut by the block end")
  {
    auto spec = BasisSpec::newton({Complex(2), Complex(1, 1), Complex(1, -1)});
    auto seq = spec.shift_sequence(2);
    REQUIRE(seq.size() == 2);
    CHECK(seq[0] == Complex(2));
    CHECK(seq[1] == Complex(1));
    auto seq5 = spec.shift_sequence(5);
    CHECK(seq5[3] == Complex(2));
    CHECK(seq5[4] == Complex(1));
  }

  TEST_CASE("Chebyshev Bbar band")
  {
    auto A = diagonal_operator<double>({1.0, 2.0, 3.0, 4.0});
    Vec w{0.5, 0.5, 0.5, 0.5};
    auto spec = BasisSpec::chebyshev(2.5, 1.5, 0.0);
    auto B = build_basis(A, w, 3, spec);
    CHECK(B.Bbar(0, 0) == 2.5);
    CHECK(B.Bbar(1, 0) == 3.0);  // 2 gamma
    CHECK(B.Bbar(2, 1) == 1.5);  // gamma
    CHECK(B.Bbar(0, 1) == doctest::Approx(2.25 / 6.0));  // tau^2 / (4 gamma)
    CHECK(B.Bbar(3, 0) == 0.0);
    CHECK(relation_residual(A, B) <= 1e-14);
  }

  TEST_CASE("monomial basis conditions worse than Newton with Ritz shifts")
  {
    Vec d(100);
    std::iota(d.begin(), d.end(), 1.0);
    auto A = diagonal_operator<double>(d);
    auto w = oracle::random_vector(100, 8);
    const double wn = nrm2<double>(w);
    for (auto &x : w)
    {
      x /= wn;
    }
    auto ritz = warmup_ritz(A, w, 8).values;
    auto mono = build_basis(A, w, 8, BasisSpec::monomial());
    auto newt = build_basis(A, w, 8, newton_from_ritz(ritz));
    const double km = cond2(oracle::to_eigen(mono.W).leftCols(8));
    const double kn = cond2(oracle::to_eigen(newt.W).leftCols(8));
    MESSAGE("kappa monomial = " << km << ", kappa Newton = " << kn);
    CHECK(km >= kn);
  }
}

TEST_SUITE("tsqr")
{
  TEST_CASE("orthonormal input gives R = I up to signs")
  {
    auto Q0 = random_orthogonal(12, 3).block(0, 0, 12, 4);
    auto tree = tsqr(Q0, 1);
    for (std::size_t i = 0; i < 4; i++)
    {
      for (std::size_t j = 0; j < 4; j++)
      {
        CHECK(tree.R(i, j) == doctest::Approx(i == j ? 1.0 : 0.0).epsilon(1e-13));
      }
    }
  }

  TEST_CASE("single block matches dense Householder QR")
  {
    auto W = oracle::random_dense(30, 5, 4);
    auto tree = tsqr(W, 1);
    auto qr = householder_qr(W);
    normalize_qr_signs(qr.Q, qr.R);
    CHECK(r_diff_up_to_signs(tree.R, qr.R) <= 1e-13 * oracle::to_eigen(W).norm());
    CHECK(tree.depth() == 0);
  }

  TEST_CASE("R agrees across block partitions")
  {
    auto W = oracle::random_dense(1000, 8, 11);
    const double wnorm = oracle::to_eigen(W).norm();
    auto ref = tsqr(W, 1);
    for (std::size_t nb : {2, 3, 4, 7})
    {
      CAPTURE(nb);
      auto tree = tsqr(W, nb);
      CHECK(tree.nblocks() == nb);
      for (std::size_t i = 0; i < 8; i++)
      {
        CHECK(tree.R(i, i) >= 0.0);
        for (std::size_t j = 0; j < i; j++)
        {
          CHECK(tree.R(i, j) == 0.0);
        }
      }
      CHECK(r_diff_up_to_signs(tree.R, ref.R) <= 1e-13 * wnorm);
      auto Q = tree.explicit_q();
      const Eigen::MatrixXd Qe = oracle::to_eigen(Q);
      const double orth = (Qe.transpose() * Qe - Eigen::MatrixXd::Identity(8, 8)).norm();
      CHECK(orth <= 1e-13);
      const double rec = (Qe * oracle::to_eigen(tree.R) - oracle::to_eigen(W)).norm();
      CHECK(rec <= 1e-13 * wnorm);
    }
  }

  TEST_CASE("odd block counts pass the last node through")
  {
    auto W = oracle::random_dense(70, 3, 12);
    auto tree = tsqr(W, 7);
    // 7 -> 4 -> 2 -> 1
    REQUIRE(tree.levels.size() == 4);
    CHECK(tree.levels[1].size() == 4);
    CHECK(tree.levels[1][3].empty());
    CHECK(tree.levels[2].size() == 2);
    CHECK_FALSE(tree.levels[2][1].empty());
    CHECK(tree.levels[3].size() == 1);
    auto tree3 = tsqr(W, 3);
    REQUIRE(tree3.levels.size() == 3);
    CHECK(tree3.levels[1][1].empty());
  }

  TEST_CASE("blocks shorter than the column count are rejected")
  {
    auto W = oracle::random_dense(10, 4, 1);
    CHECK_THROWS_AS(tsqr(W, 3), DimensionError);
    CHECK_NOTHROW(tsqr(W, 2));
    CHECK(tsqr_feasible_blocks(10, 4, 3) == 2);
  }
}

TEST_SUITE("bgs")
{
  TEST_CASE("empty previous basis leaves W unchanged")
  {
    auto W = oracle::random_dense(6, 2, 2);
    auto W0 = W;
    auto R = bgs_project(DenseMatrix<double>(6, 0), W);
    CHECK(R.rows() == 0);
    CHECK(oracle::to_eigen(W - W0).norm() == 0.0);
  }

  TEST_CASE("W inside range(V) is annihilated")
  {
    auto V = random_orthogonal(20, 4).block(0, 0, 20, 5);
    auto C = oracle::random_dense(5, 3, 5);
    auto W = matmul(V, C);
    const double wn = oracle::to_eigen(W).norm();
    auto R = bgs_project(V, W);
    CHECK(oracle::to_eigen(W).norm() <= 1e-12 * wn);
    CHECK((oracle::to_eigen(R) - oracle::to_eigen(C)).norm() <= 1e-12 * wn);
  }

  TEST_CASE("projected W is orthogonal to V")
  {
    auto V = random_orthogonal(50, 7).block(0, 0, 50, 10);
    auto W = oracle::random_dense(50, 4, 8);
    bgs_project(V, W);
    const Eigen::MatrixXd G = oracle::to_eigen(V).transpose() * oracle::to_eigen(W);
    CHECK(G.cwiseAbs().maxCoeff() <= 1e-10);
  }
}

TEST_SUITE("s-step")
{
  TEST_CASE("s = 1 with the monomial basis reproduces CGS-GMRES")
  {
    auto A = make_operator(gen_convdiff(10, 10, 10.0));
    auto b = random_uniform_vector(100, 13);
    SstepOptions so;
    so.s = 1;
    so.t = 20;
    auto ss = sstep_gmres(A, b, {}, so, fixed_steps(20));
    auto o = fixed_steps(20);
    o.scheme = OrthoScheme::CGS;
    auto cgs = gmres<double>(A, b, {}, o);
    CHECK(max_history_diff(ss, cgs, 20) <= 1e-12);
  }

  TEST_CASE("s = 4 Newton basis matches MGS-GMRES on conv-diff")
  {
    auto A = make_operator(gen_convdiff(10, 10, 10.0));
    auto b = random_uniform_vector(100, 13);
    SstepOptions so;
    so.s = 4;
    so.t = 5;
    so.basis = BasisSpec::newton();
    auto ss = sstep_gmres(A, b, {}, so, fixed_steps(20));
    auto mgs = gmres<double>(A, b, {}, fixed_steps(20));
    const double d = max_history_diff(ss, mgs, 20);
    MESSAGE("s-step vs MGS max relative history difference: " << d);
    CHECK(d <= 1e-6);
    // Two reductions per block of four steps.
    for (std::size_t blk = 0; blk < 5; blk++)
    {
      const auto &h = ss.reductions_history;
      CHECK(h[4 * blk + 1] - h[4 * blk] == 2);
      for (std::size_t k = 2; k <= 4; k++)
      {
        // The final entry also carries the driver's explicit residual norm.
        const std::size_t extra = (4 * blk + k == 20) ? 1 : 0;
        CHECK(h[4 * blk + k] - h[4 * blk + k - 1] == extra);
      }
    }
    CHECK(ss.diagnostics.at("mpk_messages") == 5.0);
    // MGS spends sum over the block of (j + 1).
    const auto &hm = mgs.reductions_history;
    CHECK(hm[4] - hm[0] == 2 + 3 + 4 + 5);
  }

  TEST_CASE("Chebyshev and monomial bases agree with MGS-GMRES for small s")
  {
    auto A = make_operator(gen_convdiff(10, 10, 10.0));
    auto b = random_uniform_vector(100, 14);
    auto mgs = gmres<double>(A, b, {}, fixed_steps(18));
    for (auto spec : {BasisSpec::chebyshev_auto(), BasisSpec::monomial()})
    {
      SstepOptions so;
      so.s = 3;
      so.t = 6;
      so.basis = spec;
      auto ss = sstep_gmres(A, b, {}, so, fixed_steps(18));
      CHECK(max_history_diff(ss, mgs, 18) <= 1e-6);
    }
  }

  TEST_CASE("assembled Hbar matches direct Arnoldi for s <= 6")
  {
    auto A = make_operator(gen_convdiff(8, 8, 5.0));
    auto r = random_uniform_vector(64, 15);
    for (std::size_t s = 1; s <= 6; s++)
    {
      CAPTURE(s);
      GmresOptions o = fixed_steps(2 * s);
      SstepOptions so;
      so.s = s;
      so.t = 2;
      so.basis = BasisSpec::newton();
      SstepCycle cycle(A, o, so);
      SolveReport rep;
      std::function<void(std::size_t, double)> cb;
      HistorySink<double> sink(rep, cb);
      sink.start(1.0, 0);
      cycle.run_cycle({}, r, 0.0, 2 * s, sink);
      auto dec = arnoldi<double>(A, r, 2 * s, OrthoScheme::MGS);
      const Eigen::MatrixXd Hs = oracle::to_eigen(cycle.Hbar());
      const Eigen::MatrixXd Ha = oracle::to_eigen(dec.Hbar);
      REQUIRE(Hs.rows() == Ha.rows());
      REQUIRE(Hs.cols() == Ha.cols());
      // Columns of V may differ in sign only if R had a negative diagonal; TSQR fixes signs.
      CHECK((Hs - Ha).norm() <= 1e-8 * Ha.norm());
    }
  }

  TEST_CASE("identity operator converges through an invariant block")
  {
    auto A = identity_operator<double>(10);
    auto b = random_uniform_vector(10, 2);
    SstepOptions so;
    so.s = 4;
    auto rep = sstep_gmres(A, b, {}, so, GmresOptions{});
    CHECK(rep.converged());
    CHECK(rep.iterations == 1);
    for (std::size_t i = 0; i < 10; i++)
    {
      CHECK(rep.x[i] == doctest::Approx(b[i]).epsilon(1e-12));
    }
  }

  TEST_CASE("restarted s-step GMRES converges")
  {
    auto A = make_operator(gen_convdiff(10, 10, 10.0));
    auto b = random_uniform_vector(100, 16);
    SstepOptions so;
    so.s = 5;
    so.t = 4;
    so.basis = BasisSpec::newton();
    GmresOptions o;
    o.rtol = 1e-10;
    o.max_iter = 2000;
    auto rep = sstep_gmres(A, b, {}, so, o);
    CHECK(rep.converged());
    CHECK(rep.final_true_residual() <= 1e-10 * nrm2<double>(b) * 1.0001);
    CHECK(rep.restarts > 0);
  }
}

TEST_SUITE("pipelined")
{
  TEST_CASE("identity converges in one iteration")
  {
    auto A = identity_operator<double>(6);
    auto b = random_uniform_vector(6, 1);
    PipelinedOptions po;
    po.theta = 0.0;
    auto rep = pipelined_gmres(A, b, {}, GmresOptions{}, po);
    CHECK(rep.converged());
    CHECK(rep.iterations == 1);
  }

  TEST_CASE("history matches MGS-GMRES with theta = 0 and one reduction per step")
  {
    auto A = make_operator(gen_convdiff(10, 10, 10.0));
    auto b = random_uniform_vector(100, 13);
    PipelinedOptions po;
    po.theta = 0.0;
    auto pl = pipelined_gmres(A, b, {}, fixed_steps(20), po);
    auto mgs = gmres<double>(A, b, {}, fixed_steps(20));
    const double d = max_history_diff(pl, mgs, 20);
    MESSAGE("pipelined vs MGS max relative history difference: " << d);
    CHECK(d <= 1e-6);
    for (std::size_t k = 1; k < 20; k++)
    {
      CHECK(pl.reductions_history[k] - pl.reductions_history[k - 1] == 1);
    }
    // The last entry also carries the driver's explicit residual norm.
    CHECK(pl.reductions_history[20] - pl.reductions_history[19] == 2);
  }

  TEST_CASE("Ritz-mean shift keeps w_j = (A - theta I) v_j")
  {
    auto A = make_operator(gen_convdiff(8, 8, 10.0));
    auto r = random_uniform_vector(64, 17);
    GmresOptions o = fixed_steps(12);
    PipelinedCycle cycle(A, o, PipelinedOptions{});
    SolveReport rep;
    std::function<void(std::size_t, double)> cb;
    HistorySink<double> sink(rep, cb);
    sink.start(1.0, 0);
    cycle.run_cycle({}, r, 0.0, 12, sink);
    CHECK(cycle.theta() > 0.0);
    const double res = arnoldi_relation_residual(A, cycle.V(), cycle.Hbar());
    CHECK(res <= 1e-10 * op_norm2(A));
    auto mgs = gmres<double>(A, r, {}, fixed_steps(12));
    for (std::size_t k = 1; k <= 12; k++)
    {
      CHECK(oracle::rel_diff(rep.residual_history[k], mgs.residual_history[k]) <= 1e-6);
    }
  }
}

TEST_SUITE("low-sync")
{
  TEST_CASE("identity converges in one iteration")
  {
    auto A = identity_operator<double>(6);
    auto b = random_uniform_vector(6, 1);
    auto rep = lowsync_gmres(A, b, {}, GmresOptions{});
    CHECK(rep.converged());
    CHECK(rep.iterations == 1);
  }

  TEST_CASE("history matches MGS-GMRES with one reduction per step")
  {
    auto A = make_operator(gen_convdiff(10, 10, 10.0));
    auto b = random_uniform_vector(100, 13);
    auto ls = lowsync_gmres(A, b, {}, fixed_steps(20));
    auto mgs = gmres<double>(A, b, {}, fixed_steps(20));
    CHECK(max_history_diff(ls, mgs, 20) <= 1e-6);
    for (std::size_t k = 1; k < 20; k++)
    {
      CHECK(ls.reductions_history[k] - ls.reductions_history[k - 1] == 1);
    }
    // The last entry also carries the driver's explicit residual norm.
    CHECK(ls.reductions_history[20] - ls.reductions_history[19] == 2);
  }
}
