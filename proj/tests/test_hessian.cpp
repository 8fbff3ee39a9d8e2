#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "sdpipm/barrier.hpp"
#include "sdpipm/hessian_maintenance.hpp"
#include "test_util.hpp"

using namespace sdpipm;

TEST_CASE("inverse delta factors on directed inputs") {
  SUBCASE("empty update") {
    const InverseDelta d = inverse_delta_factors(
        Eigen::MatrixXd::Identity(2, 2), Eigen::MatrixXd(2, 0),
        Eigen::VectorXd(0));
    CHECK(d.empty());
  }
  SUBCASE("rank-one growth at e1 shrinks the inverse there") {
    // (I + e1 e1^T)^{-1} = diag(1/2, 1) so the change is diag(-1/2, 0).
    Eigen::MatrixXd w(2, 1);
    w << 1.0, 0.0;
    Eigen::VectorXd d(1);
    d << 1.0;
    const InverseDelta delta =
        inverse_delta_factors(Eigen::MatrixXd::Identity(2, 2), w, d);
    CHECK(delta.V_plus.cols() == 0);
    CHECK(delta.V_minus.cols() == 1);
    CHECK(std::abs(delta.V_minus(0, 0)) == doctest::Approx(1.0 / std::sqrt(2.0)));
    CHECK(delta.V_minus(1, 0) == doctest::Approx(0.0));
  }
  SUBCASE("rank-one shrink at e2 grows the inverse there") {
    // (I - e2 e2^T / 2)^{-1} = diag(1, 2) so the change is diag(0, 1).
    Eigen::MatrixXd w(2, 1);
    w << 0.0, 1.0;
    Eigen::VectorXd d(1);
    d << -0.5;
    const InverseDelta delta =
        inverse_delta_factors(Eigen::MatrixXd::Identity(2, 2), w, d);
    CHECK(delta.V_minus.cols() == 0);
    CHECK(delta.V_plus.cols() == 1);
    CHECK(std::abs(delta.V_plus(1, 0)) == doctest::Approx(1.0));
    CHECK(delta.V_plus(0, 0) == doctest::Approx(0.0));
  }
  SUBCASE("singular inner system raises") {
    // A = I, w = e1, d = -1 makes A + w d w^T singular.
    Eigen::MatrixXd w(2, 1);
    w << 1.0, 0.0;
    Eigen::VectorXd d(1);
    d << -1.0;
    CHECK_THROWS_AS(
        inverse_delta_factors(Eigen::MatrixXd::Identity(2, 2), w, d),
        WoodburyError);
    Eigen::VectorXd zero(1);
    zero << 0.0;
    CHECK_THROWS_AS(
        inverse_delta_factors(Eigen::MatrixXd::Identity(2, 2), w, zero),
        WoodburyError);
  }
}

TEST_CASE("inverse identity residual on random low-rank updates") {
  std::mt19937_64 rng(19);
  std::normal_distribution<double> dist;
  for (int trial = 0; trial < 200; ++trial) {
    const Eigen::Index n = 2 + static_cast<Eigen::Index>(rng() % 12);
    const Eigen::Index k = 1 + static_cast<Eigen::Index>(rng() % std::min<Eigen::Index>(n, 4));
    const Eigen::MatrixXd a = testutil::random_pd(n, rng, 0.5, 2.0);
    Eigen::MatrixXd w(n, k);
    for (Eigen::Index i = 0; i < n; ++i) {
      for (Eigen::Index j = 0; j < k; ++j) {
        w(i, j) = dist(rng);
      }
    }
    Eigen::VectorXd d(k);
    for (Eigen::Index j = 0; j < k; ++j) {
      // Small enough to keep a + w d w^T positive definite.
      d(j) = 0.1 * dist(rng);
      if (d(j) == 0.0) d(j) = 0.05;
    }
    const Eigen::MatrixXd a_new = a + w * d.asDiagonal() * w.transpose();
    if (spectral_decompose(SymMatrix(a_new)).eigenvalues.minCoeff() <= 1e-6) {
      continue;
    }
    const Eigen::MatrixXd a_inv = matrix_function(SymMatrix(a), MatrixFunction::Inverse).mat();
    const InverseDelta delta = inverse_delta_factors(a_inv, w, d);
    CHECK(delta.rank() <= k);
    const Eigen::MatrixXd direct =
        matrix_function(SymMatrix(a_new), MatrixFunction::Inverse).mat();
    const double rel =
        (a_inv + delta.dense(n) - direct).norm() / direct.norm();
    CHECK(rel <= 1e-10);
  }
}

TEST_CASE("scalar Hessian update through the expansion") {
  // S_old = [2], A = [2]: H = tr[(1/2) 2 (1/2) 2] = 1. Shrinking to
  // S_new = [1] gives H_new = tr[1 * 2 * 1 * 2] = 4.
  SdpInstance inst;
  inst.n = 1;
  inst.m = 1;
  inst.A.emplace_back(Eigen::MatrixXd::Constant(1, 1, 2.0));
  inst.C = SymMatrix::zero(1);
  inst.b = Eigen::VectorXd::Ones(1);

  Eigen::MatrixXd s_old_inv = Eigen::MatrixXd::Constant(1, 1, 0.5);
  Eigen::MatrixXd h = Eigen::MatrixXd::Constant(1, 1, 1.0);
  // S_tilde changes by -1: w = [1], d = [-1].
  Eigen::MatrixXd w = Eigen::MatrixXd::Constant(1, 1, 1.0);
  Eigen::VectorXd d = Eigen::VectorXd::Constant(1, -1.0);
  const InverseDelta delta = inverse_delta_factors(s_old_inv, w, d);
  CHECK(delta.V_plus.cols() == 1);
  const Eigen::MatrixXd h_new =
      hessian_low_rank_update(h, inst, s_old_inv, delta);
  CHECK(h_new(0, 0) == doctest::Approx(4.0));
}

TEST_CASE("empty delta leaves the Hessian untouched") {
  SdpInstance inst = testutil::random_instance(3, 2, 77);
  Eigen::MatrixXd h = Eigen::MatrixXd::Identity(2, 2);
  InverseDelta delta;
  delta.V_plus.resize(3, 0);
  delta.V_minus.resize(3, 0);
  const Eigen::MatrixXd h_new =
      hessian_low_rank_update(h, inst, Eigen::MatrixXd::Identity(3, 3), delta);
  CHECK((h_new - h).norm() == 0.0);
}

TEST_CASE("low-rank update equals full recomputation") {
  std::mt19937_64 rng(29);
  for (int trial = 0; trial < 30; ++trial) {
    const Eigen::Index n = 3 + static_cast<Eigen::Index>(rng() % 6);
    const Eigen::Index m = 1 + static_cast<Eigen::Index>(rng() % 5);
    SdpInstance inst = testutil::random_instance(n, m, 3000 + trial);

    const SymMatrix s_old(testutil::random_pd(n, rng, 0.5, 2.0));
    const Eigen::Index k = 1 + static_cast<Eigen::Index>(rng() % 3);
    std::normal_distribution<double> dist;
    Eigen::MatrixXd w(n, k);
    for (Eigen::Index i = 0; i < n; ++i) {
      for (Eigen::Index j = 0; j < k; ++j) {
        w(i, j) = 0.2 * dist(rng);
      }
    }
    Eigen::VectorXd d(k);
    for (Eigen::Index j = 0; j < k; ++j) {
      d(j) = dist(rng) >= 0 ? 0.3 : -0.3;
    }
    const SymMatrix s_new(s_old.mat() + w * d.asDiagonal() * w.transpose());
    if (spectral_decompose(s_new).eigenvalues.minCoeff() <= 0.05) {
      continue;
    }

    const SpectralDecomp old_decomp = spectral_decompose(s_old);
    const Eigen::MatrixXd s_old_inv =
        matrix_function(old_decomp, MatrixFunction::Inverse, n);
    const Eigen::MatrixXd h_old = hessian_full(
        inst, matrix_function(old_decomp, MatrixFunction::InvSqrt, n));

    const InverseDelta delta = inverse_delta_factors(s_old_inv, w, d);
    const Eigen::MatrixXd h_updated =
        hessian_low_rank_update(h_old, inst, s_old_inv, delta);

    const Eigen::MatrixXd h_ref = hessian_full(
        inst, matrix_function(spectral_decompose(s_new), MatrixFunction::InvSqrt, n));
    CHECK((h_updated - h_ref).norm() / h_ref.norm() <= 1e-8);
    CHECK((h_updated - h_updated.transpose()).norm() == 0.0);
  }
}

TEST_CASE("spectral sandwich transfers from slack to Hessian") {
  std::mt19937_64 rng(37);
  for (int trial = 0; trial < 25; ++trial) {
    const Eigen::Index n = 3 + static_cast<Eigen::Index>(rng() % 6);
    const Eigen::Index m = 1 + static_cast<Eigen::Index>(rng() % 5);
    SdpInstance inst = testutil::random_instance(n, m, 4000 + trial);

    const double eps_s = 0.01;
    const SymMatrix s(testutil::random_pd(n, rng, 0.5, 2.0));
    // S_tilde within the eps_s band of S.
    std::uniform_real_distribution<double> band(-eps_s, eps_s);
    Eigen::VectorXd z(n);
    for (Eigen::Index i = 0; i < n; ++i) z(i) = band(rng);
    const Eigen::MatrixXd q = testutil::random_orthogonal(n, rng);
    const Eigen::MatrixXd sqrt = matrix_function(s, MatrixFunction::Sqrt).mat();
    const SymMatrix s_tilde(
        sqrt *
        (Eigen::MatrixXd::Identity(n, n) + q * z.asDiagonal() * q.transpose()) *
        sqrt);

    const Eigen::MatrixXd h = hessian_full(
        inst, matrix_function(s, MatrixFunction::InvSqrt).mat());
    const Eigen::MatrixXd h_tilde = hessian_full(
        inst, matrix_function(s_tilde, MatrixFunction::InvSqrt).mat());

    Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> gen(h_tilde, h);
    REQUIRE(gen.info() == Eigen::Success);
    const double alpha_s = 1.0 / (1.0 - eps_s);
    CHECK(gen.eigenvalues().minCoeff() >= 1.0 / (alpha_s * alpha_s) - 1e-9);
    CHECK(gen.eigenvalues().maxCoeff() <= alpha_s * alpha_s + 1e-9);
    // The coarser 1.03 band used by the step analysis.
    CHECK(gen.eigenvalues().minCoeff() >= 1.0 / 1.03);
    CHECK(gen.eigenvalues().maxCoeff() <= 1.03);
  }
}

TEST_CASE("state refresh interval bounds drift") {
  SdpInstance inst = testutil::random_instance(4, 3, 555);
  std::mt19937_64 rng(55);
  SymMatrix s(testutil::random_pd(4, rng, 0.8, 1.2));
  HessianState state(inst, s, 5);
  SymMatrix s_tilde = s;
  int refreshes_seen = 0;
  for (int i = 0; i < 12; ++i) {
    // Small definite-preserving perturbations keyed through the slack update.
    const SymMatrix target(s_tilde.mat() +
                           0.02 * testutil::random_pd(4, rng, 0.5, 1.0));
    const SlackUpdateResult update = approx_slack_update(target, s_tilde, 0.01);
    if (!update.changed) {
      continue;
    }
    const Eigen::Index used = state.apply_update(update);
    if (used == 0) {
      ++refreshes_seen;  // scheduled refresh path
    }
    s_tilde = update.S_tilde_new;
    const Eigen::MatrixXd ref = hessian_full(
        inst, matrix_function(s_tilde, MatrixFunction::InvSqrt).mat());
    CHECK((state.hessian() - ref).norm() / ref.norm() <= 1e-8);
  }
  CHECK(refreshes_seen >= 1);
}
