#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "sdpipm/solver.hpp"
#include "test_util.hpp"

using namespace sdpipm;

namespace {

SolveConfig quick_config(double delta = 0.01) {
  SolveConfig cfg;
  cfg.delta = delta;
  return cfg;
}

}  // namespace

TEST_CASE("embedding feasibility identities") {
  std::mt19937_64 rng(61);
  for (int trial = 0; trial < 20; ++trial) {
    const Eigen::Index n = 2 + static_cast<Eigen::Index>(rng() % 6);
    const Eigen::Index m = 1 + static_cast<Eigen::Index>(rng() % 4);
    SdpInstance inst = testutil::random_instance(n, m, 7000 + trial);
    auto [mod, state] = build_modified(inst, 0.01);

    CHECK(mod.inst.n == n + 2);
    CHECK(mod.inst.m == m + 1);

    // <A_bar_i, I_{n+2}> = b_bar_i for every i.
    const SymMatrix eye = SymMatrix::identity(n + 2);
    for (Eigen::Index i = 0; i < mod.inst.m; ++i) {
      CHECK(std::abs(trace_product(mod.inst.A[i], eye) - mod.inst.b(i)) <=
            1e-12 * std::max(1.0, std::abs(mod.inst.b(i))));
    }

    // sum_i y_i A_bar_i - S_bar = C_bar, and S_bar is positive definite.
    Eigen::MatrixXd combo = -state.S.mat();
    for (Eigen::Index i = 0; i < mod.inst.m; ++i) {
      combo += state.y(i) * mod.inst.A[i].mat();
    }
    CHECK((combo - mod.inst.C.mat()).cwiseAbs().maxCoeff() <= 1e-12);
    CHECK(spectral_decompose(state.S).eigenvalues.minCoeff() > 0.0);

    // The explicit block form of the initial slack.
    Eigen::MatrixXd expected = Eigen::MatrixXd::Identity(n + 2, n + 2);
    expected.topLeftCorner(n, n) -= inst.C.mat() * (0.01 / inst.L);
    CHECK((state.S.mat() - expected).cwiseAbs().maxCoeff() <= 1e-14);

    CHECK(state.eta == doctest::Approx(1.0 / double(n + 2)));
    CHECK((state.S_tilde.mat() - state.S.mat()).norm() == 0.0);
  }
}

TEST_CASE("embedding rejects bad bounds") {
  SdpInstance inst = testutil::random_instance(3, 2, 99);
  inst.R = 0.0;
  CHECK_THROWS_AS(build_modified(inst, 0.01), ValidationError);
  inst.R = 1.0;
  inst.L = 1e-6;  // below ||C||_op
  CHECK_THROWS_AS(build_modified(inst, 0.01), ValidationError);
  inst.L = 1.0;
  CHECK_THROWS_AS(build_modified(inst, 0.0), ValidationError);
  CHECK_THROWS_AS(build_modified(inst, 1.5), ValidationError);
}

TEST_CASE("eta grows by the exact factor each step") {
  SdpInstance inst = testutil::random_instance(3, 2, 123);
  Solver solver(inst, quick_config());
  const double nbar = double(inst.n + 2);
  const double factor = 1.0 + 0.1 / (20.0 * std::sqrt(nbar));
  double eta = solver.state().eta;
  for (int i = 0; i < 25; ++i) {
    solver.step();
    eta *= factor;
    CHECK(solver.state().eta == doctest::Approx(eta).epsilon(1e-14));
  }
}

TEST_CASE("slack stays positive definite and matches its assembly") {
  SdpInstance inst = testutil::random_instance(4, 3, 321);
  SolveConfig cfg = quick_config();
  cfg.debug_checks = true;
  Solver solver(inst, cfg);
  for (int i = 0; i < 40; ++i) {
    const IterationRecord rec = solver.step();
    const DualState& st = solver.state();
    CHECK(spectral_decompose(st.S).eigenvalues.minCoeff() > 0.0);
    const Eigen::MatrixXd reassembled = slack_dense(solver.modified().inst, st.y);
    CHECK((st.S.mat() - reassembled).cwiseAbs().maxCoeff() == 0.0);
    CHECK(rec.newton_decrement_exact <= 0.1 * 0.1 + 1e-12);
    CHECK(rec.frob_proximity <= 1.03 * 0.1 + 1e-12);
    CHECK(rec.opnorm_z <= 0.01 + 1e-12);
  }
}

TEST_CASE("maxeig instance reaches the known optimum") {
  // max <C, X> with tr X = 1 equals the largest eigenvalue of C.
  Eigen::MatrixXd c(2, 2);
  c << 1.0, 0.0, 0.0, 0.0;
  SdpInstance inst = testutil::maxeig_instance(c);
  const SolveResult result = solve(inst, quick_config(0.01));
  CHECK(result.report.converged);
  CHECK(result.report.certified);
  CHECK(result.report.objective >= 1.0 - 0.01 * 1.0 * 1.0);
  CHECK(result.report.objective <= 1.0 + 1e-9);
  // Feasibility residual within 4 n delta (R sum ||A_i||_1 + ||b||_1) = 0.24.
  CHECK(result.report.feasibility_bound == doctest::Approx(0.24));
  CHECK(result.report.feasibility_residual <= 0.24);
  // X_hat is PSD.
  CHECK(spectral_decompose(result.X_hat).eigenvalues.minCoeff() >= -1e-12);
}

TEST_CASE("off-diagonal objective reaches lambda_max") {
  Eigen::MatrixXd c(2, 2);
  c << 0.0, 1.0, 1.0, 0.0;
  SdpInstance inst = testutil::maxeig_instance(c);
  const SolveResult result = solve(inst, quick_config(0.01));
  CHECK(result.report.certified);
  CHECK(result.report.objective >= 1.0 - 0.01);
  CHECK(result.report.objective <= 1.0 + 1e-9);
}

TEST_CASE("duality gap bound holds against the known dual optimum") {
  // Dual of the embedded maxeig problem has value delta * lambda_max(C) / L;
  // with L = lambda_max this is delta. At termination b^T y must be within
  // (n_bar / eta)(1 + 2 eps_n) of it.
  Eigen::MatrixXd c(3, 3);
  c << 1.0, 0.2, 0.0, 0.2, 0.5, 0.1, 0.0, 0.1, -0.3;
  SdpInstance inst = testutil::maxeig_instance(c);
  const SolveResult result = solve(inst, quick_config(0.01));
  REQUIRE(result.report.converged);
  const double dual_opt = 0.01;  // delta * OPT / (L R) with OPT = L, R = 1
  CHECK(result.report.dual_objective <=
        dual_opt + result.report.duality_gap_bound + 1e-9);
  CHECK(result.report.dual_objective >= dual_opt - 1e-9);
}

TEST_CASE("lowrank and baseline agree") {
  for (int trial = 0; trial < 3; ++trial) {
    SdpInstance inst = testutil::random_instance(4, 3, 8800 + trial);
    SolveConfig lowrank = quick_config();
    SolveConfig baseline = quick_config();
    baseline.mode = SolveMode::Baseline;
    const SolveResult a = solve(inst, lowrank);
    const SolveResult b = solve(inst, baseline);
    REQUIRE(a.report.converged);
    REQUIRE(b.report.converged);
    CHECK(a.report.objective ==
          doctest::Approx(b.report.objective).epsilon(1e-6));
  }
}

TEST_CASE("startup reports the schedule's Newton-radius miss") {
  SdpInstance inst = testutil::random_instance(3, 2, 42);
  Solver solver(inst, quick_config());
  const SolveReport& rep = solver.report();
  // The literal schedule start eta = 1/(n+2) sits far from the measured path
  // point; the solver records the violation and the adjusted eta.
  CHECK(rep.eta_init_schedule == doctest::Approx(1.0 / 5.0));
  CHECK(rep.initial_decrement_violation);
  CHECK(rep.eta_init_used > rep.eta_init_schedule);
  CHECK(rep.initial_decrement_used <= 0.1 * 0.1);
}

TEST_CASE("iteration budget cap flags the report") {
  SdpInstance inst = testutil::random_instance(3, 2, 77);
  SolveConfig cfg = quick_config();
  cfg.max_iters = 10;
  const SolveResult result = solve(inst, cfg);
  CHECK_FALSE(result.report.converged);
  CHECK_FALSE(result.report.certified);
  CHECK(result.report.iterations == 10);
}

TEST_CASE("records are kept when requested") {
  SdpInstance inst = testutil::random_instance(3, 2, 78);
  SolveConfig cfg = quick_config();
  cfg.max_iters = 5;
  cfg.keep_records = true;
  const SolveResult result = solve(inst, cfg);
  CHECK(result.records.size() == 5);
  CHECK(result.records.front().iter == 1);
  CHECK(result.records.back().iter == 5);
}
