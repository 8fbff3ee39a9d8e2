#include "sdpipm/solver.hpp"

#include <cmath>
#include <sstream>

namespace sdpipm {

std::pair<ModifiedInstance, DualState> build_modified(const SdpInstance& inst,
                                                      double delta) {
  if (!(delta > 0.0 && delta <= 1.0)) {
    throw ValidationError("build_modified: delta must lie in (0, 1]");
  }
  if (!(inst.R > 0.0)) {
    throw ValidationError(
        "diameter bound R must be provided (any feasible X has ||X||_op <= R)");
  }
  if (!(inst.L > 0.0)) {
    throw ValidationError("Lipschitz bound L must be positive");
  }
  const double c_opnorm = norms(inst.C).operator_norm;
  if (inst.L < c_opnorm * (1.0 - 1e-12)) {
    throw ValidationError("Lipschitz bound L must satisfy L >= ||C||_op");
  }

  const Eigen::Index n = inst.n;
  const Eigen::Index m = inst.m;
  const Eigen::Index nb = n + 2;

  ModifiedInstance mod;
  mod.original_n = n;
  mod.original_m = m;
  mod.R = inst.R;
  mod.L = inst.L;
  mod.delta = delta;
  mod.inst.n = nb;
  mod.inst.m = m + 1;
  mod.inst.R = inst.R;
  mod.inst.L = inst.L;

  mod.inst.A.reserve(static_cast<std::size_t>(m) + 1);
  for (Eigen::Index i = 0; i < m; ++i) {
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(nb, nb);
    a.topLeftCorner(n, n) = inst.A[static_cast<std::size_t>(i)].mat();
    a(nb - 1, nb - 1) =
        inst.b(i) / inst.R - inst.A[static_cast<std::size_t>(i)].mat().trace();
    mod.inst.A.emplace_back(std::move(a));
  }
  {
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(nb, nb);
    a.topLeftCorner(n, n).setIdentity();
    a(n, n) = 1.0;
    mod.inst.A.emplace_back(std::move(a));
  }

  mod.inst.b.resize(m + 1);
  mod.inst.b.head(m) = inst.b / inst.R;
  mod.inst.b(m) = static_cast<double>(n) + 1.0;

  Eigen::MatrixXd cbar = Eigen::MatrixXd::Zero(nb, nb);
  cbar.topLeftCorner(n, n) = inst.C.mat() * (delta / inst.L);
  cbar(nb - 1, nb - 1) = -1.0;
  mod.inst.C = SymMatrix(std::move(cbar));

  DualState state;
  state.y = Eigen::VectorXd::Zero(m + 1);
  state.y(m) = 1.0;
  state.S = slack(mod.inst, state.y);
  state.S_tilde = state.S;
  state.eta = 1.0 / static_cast<double>(nb);
  state.iter = 0;

  const double min_eig = spectral_decompose(state.S).eigenvalues.minCoeff();
  if (min_eig <= 0.0) {
    throw NotPositiveDefiniteError(
        "initial slack not positive definite; check L >= ||C||_op and delta <= 1");
  }
  return {std::move(mod), std::move(state)};
}

struct Solver::Impl {
  SdpInstance original;
  SpectralDecomp s_decomp;                 // decomposition of state.S
  std::unique_ptr<HessianState> hess;
  std::unique_ptr<TelemetrySink> sink;
  std::vector<IterationRecord> records;
  std::vector<Eigen::Index> ranks;
  double nbar = 0.0;
  double eta_target = 0.0;
  long iteration_budget = 0;
};

Solver::~Solver() = default;

Solver::Solver(const SdpInstance& inst, SolveConfig cfg)
    : impl_(new Impl), cfg_(std::move(cfg)) {
  cfg_.finalize_and_validate();
  impl_->original = inst;
  auto [mod, state] = build_modified(inst, cfg_.delta);
  modified_ = std::move(mod);
  state_ = std::move(state);

  const double nbar = static_cast<double>(modified_.inst.n);
  impl_->nbar = nbar;
  impl_->eta_target = 2.0 * nbar / (cfg_.delta * cfg_.delta);
  const long schedule = static_cast<long>(std::ceil(
      40.0 / cfg_.eps_n * std::sqrt(nbar) * std::log(nbar / cfg_.delta)));
  impl_->iteration_budget = cfg_.max_iters > 0
                                ? std::min<long>(schedule, cfg_.max_iters)
                                : schedule;

  impl_->s_decomp = spectral_decompose(state_.S);
  impl_->hess = std::make_unique<HessianState>(modified_.inst, state_.S_tilde,
                                               cfg_.hessian_refresh_interval);
  if (cfg_.telemetry_path) {
    impl_->sink = std::make_unique<TelemetrySink>(*cfg_.telemetry_path);
  }

  report_.eta_init_schedule = state_.eta;
  report_.iteration_budget = impl_->iteration_budget;
  report_.eta_target = impl_->eta_target;

  // The schedule's starting eta asserts proximity to the central path. It is
  // measured rather than trusted; if the Newton decrement there exceeds
  // eps_n^2, eta advances once to the decrement-minimizing value along the
  // (eta -> g_eta) line, and the run records the violation.
  const Eigen::MatrixXd s_inv = matrix_function(
      impl_->s_decomp, MatrixFunction::Inverse, modified_.inst.n);
  const Eigen::VectorXd traces = -gradient(modified_.inst, s_inv, 0.0);
  auto decrement_at = [&](double eta) {
    const Eigen::VectorXd g = eta * modified_.inst.b - traces;
    return -g.dot(newton_direction(impl_->hess->hessian(), g));
  };
  report_.initial_decrement = decrement_at(state_.eta);
  report_.initial_decrement_used = report_.initial_decrement;
  report_.eta_init_used = state_.eta;
  const double eps_n2 = cfg_.eps_n * cfg_.eps_n;
  if (report_.initial_decrement > eps_n2) {
    report_.initial_decrement_violation = true;
    const Eigen::VectorXd hb =
        newton_direction(impl_->hess->hessian(), -modified_.inst.b);
    const double denom = modified_.inst.b.dot(hb);
    if (!(denom > 0.0)) {
      throw NumericalAbortError("Hessian lost definiteness at startup");
    }
    const double eta_star = traces.dot(hb) / denom;
    state_.eta = std::max(state_.eta, eta_star);
    report_.eta_init_used = state_.eta;
    report_.initial_decrement_used = decrement_at(state_.eta);
    if (report_.initial_decrement_used > eps_n2) {
      std::ostringstream msg;
      msg << "initial point outside the Newton radius: decrement "
          << report_.initial_decrement_used << " > eps_n^2 = " << eps_n2
          << " even at the adjusted eta " << state_.eta;
      throw NumericalAbortError(msg.str());
    }
  }
}

const Eigen::MatrixXd& Solver::approx_hessian() const {
  return impl_->hess->hessian();
}

IterationRecord Solver::step() {
  const SdpInstance& inst = modified_.inst;
  const Eigen::Index nb = inst.n;
  const Eigen::Index mb = inst.m;
  IterationRecord rec;
  rec.eps_n = cfg_.eps_n;
  rec.eps_s = cfg_.eps_s;
  rec.alpha_h = cfg_.alpha_h;

  const double eta_new =
      state_.eta * (1.0 + cfg_.eps_n / (20.0 * std::sqrt(impl_->nbar)));

  const Eigen::MatrixXd s_inv =
      matrix_function(impl_->s_decomp, MatrixFunction::Inverse, nb);
  const Eigen::VectorXd g = gradient(inst, s_inv, eta_new);
  rec.flop_counters.input_read_mn2 += static_cast<long>(mb) * nb * nb;

  const Eigen::VectorXd delta_y = newton_direction(impl_->hess->hessian(), g);
  rec.flop_counters.mm_solves += 1;
  rec.newton_decrement = -g.dot(delta_y);

  if (cfg_.debug_checks) {
    const Eigen::MatrixXd s_inv_sqrt =
        matrix_function(impl_->s_decomp, MatrixFunction::InvSqrt, nb);
    const Eigen::MatrixXd h_exact = hessian_full(inst, s_inv_sqrt);
    rec.newton_decrement_exact = -g.dot(newton_direction(h_exact, g));
    Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> gen(
        impl_->hess->hessian(), h_exact);
    if (gen.info() == Eigen::Success) {
      const double lo = gen.eigenvalues().minCoeff();
      const double hi = gen.eigenvalues().maxCoeff();
      if (std::isnan(report_.hessian_sandwich_min) ||
          lo < report_.hessian_sandwich_min) {
        report_.hessian_sandwich_min = lo;
      }
      if (std::isnan(report_.hessian_sandwich_max) ||
          hi > report_.hessian_sandwich_max) {
        report_.hessian_sandwich_max = hi;
      }
      const double slack_eps = 64.0 * std::numeric_limits<double>::epsilon();
      if (lo < 1.0 / cfg_.alpha_h - slack_eps || hi > cfg_.alpha_h + slack_eps) {
        ++report_.sandwich_violations;
      }
    }
    if (rec.newton_decrement_exact > cfg_.eps_n * cfg_.eps_n +
                                         64.0 * std::numeric_limits<double>::epsilon()) {
      ++report_.decrement_violations;
    }
  }

  const Eigen::VectorXd y_new = state_.y + delta_y;
  Eigen::MatrixXd s_new_dense = slack_dense(inst, y_new);
  rec.flop_counters.input_read_mn2 += static_cast<long>(mb) * nb * nb;
  SymMatrix s_new(std::move(s_new_dense));
  SpectralDecomp s_new_decomp = spectral_decompose(s_new);
  if (s_new_decomp.eigenvalues.minCoeff() <=
      eigenvalue_floor(s_new_decomp.eigenvalues)) {
    std::ostringstream msg;
    msg << "dual iterate left the cone at iteration " << (state_.iter + 1)
        << ": min slack eigenvalue " << s_new_decomp.eigenvalues.minCoeff()
        << ", eta " << eta_new << ", Newton decrement " << rec.newton_decrement;
    throw NumericalAbortError(msg.str());
  }

  {
    const Eigen::MatrixXd old_inv_sqrt =
        matrix_function(impl_->s_decomp, MatrixFunction::InvSqrt, nb);
    Eigen::MatrixXd prox = old_inv_sqrt * s_new.mat() * old_inv_sqrt;
    prox.diagonal().array() -= 1.0;
    rec.frob_proximity = prox.norm();
    rec.flop_counters.nn_mults += 2;
    if (rec.frob_proximity >
        cfg_.alpha_h * cfg_.eps_n + 64.0 * std::numeric_limits<double>::epsilon()) {
      ++report_.proximity_violations;
    }
  }

  if (cfg_.mode == SolveMode::LowRank) {
    const SlackUpdateResult update =
        approx_slack_update(s_new, s_new_decomp, state_.S_tilde, cfg_.eps_s);
    rec.rank_update = update.rank_update;
    rec.flop_counters.nn_mults += 4;
    rec.potential_zmid = potential(update.Z_mid_abs_eigs);
    rec.zmid_abs_eigs.assign(
        update.Z_mid_abs_eigs.data(),
        update.Z_mid_abs_eigs.data() + update.Z_mid_abs_eigs.size());
    const Eigen::Index woodbury_rank = impl_->hess->apply_update(update);
    if (woodbury_rank > 0) {
      rec.flop_counters.tmat_n_mr_n +=
          static_cast<long>(nb) * nb * mb * woodbury_rank;
      rec.flop_counters.tmat_m_nr_m +=
          static_cast<long>(mb) * mb * nb * woodbury_rank;
    } else if (update.changed) {
      // Scheduled refresh: full stacked recomputation.
      rec.flop_counters.tmat_n_mr_n += static_cast<long>(nb) * nb * mb * nb;
      rec.flop_counters.tmat_m_nr_m += static_cast<long>(mb) * mb * nb * nb;
    }
    state_.S_tilde = update.S_tilde_new;
    rec.opnorm_z =
        update.Z_new_abs_eigs.size() > 0 ? update.Z_new_abs_eigs(0) : 0.0;
    rec.potential_z = potential(update.Z_new_abs_eigs);
    rec.z_abs_eigs.assign(
        update.Z_new_abs_eigs.data(),
        update.Z_new_abs_eigs.data() + update.Z_new_abs_eigs.size());
  } else {
    // Baseline: track the slack exactly and rebuild the Hessian from scratch.
    const Eigen::MatrixXd s_new_inv_sqrt =
        matrix_function(s_new_decomp, MatrixFunction::InvSqrt, nb);
    Eigen::MatrixXd z_mid = s_new_inv_sqrt * state_.S_tilde.mat() * s_new_inv_sqrt;
    z_mid.diagonal().array() -= 1.0;
    Eigen::VectorXd zmid_eigs =
        spectral_decompose(SymMatrix(std::move(z_mid))).eigenvalues.cwiseAbs();
    std::sort(zmid_eigs.data(), zmid_eigs.data() + zmid_eigs.size(),
              std::greater<double>());
    rec.potential_zmid = potential(zmid_eigs);
    rec.zmid_abs_eigs.assign(zmid_eigs.data(), zmid_eigs.data() + zmid_eigs.size());
    rec.rank_update = nb;
    state_.S_tilde = s_new;
    impl_->hess->refresh(state_.S_tilde);
    rec.flop_counters.tmat_n_mr_n += static_cast<long>(nb) * nb * mb * nb;
    rec.flop_counters.tmat_m_nr_m += static_cast<long>(mb) * mb * nb * nb;
    rec.opnorm_z = 0.0;
    rec.potential_z = 0.0;
    rec.z_abs_eigs.assign(static_cast<std::size_t>(nb), 0.0);
  }

  if (cfg_.debug_checks) {
    // Measure the maintained error matrix and the Hessian against fresh
    // recomputation instead of trusting the analytic eigenvalue bookkeeping.
    const Eigen::MatrixXd s_new_inv_sqrt =
        matrix_function(s_new_decomp, MatrixFunction::InvSqrt, nb);
    Eigen::MatrixXd z_new =
        s_new_inv_sqrt * state_.S_tilde.mat() * s_new_inv_sqrt;
    z_new.diagonal().array() -= 1.0;
    Eigen::VectorXd z_eigs =
        spectral_decompose(SymMatrix(std::move(z_new))).eigenvalues.cwiseAbs();
    std::sort(z_eigs.data(), z_eigs.data() + z_eigs.size(),
              std::greater<double>());
    rec.opnorm_z = z_eigs.size() > 0 ? z_eigs(0) : 0.0;
    rec.potential_z = potential(z_eigs);
    rec.z_abs_eigs.assign(z_eigs.data(), z_eigs.data() + z_eigs.size());

    const SpectralDecomp st_decomp = spectral_decompose(state_.S_tilde);
    const Eigen::MatrixXd h_ref =
        hessian_full(inst, matrix_function(st_decomp, MatrixFunction::InvSqrt, nb));
    const double res =
        (impl_->hess->hessian() - h_ref).norm() / std::max(h_ref.norm(), 1e-300);
    rec.hessian_residual = res;
    if (std::isnan(report_.hessian_oracle_max_residual) ||
        res > report_.hessian_oracle_max_residual) {
      report_.hessian_oracle_max_residual = res;
    }
  }
  if (rec.opnorm_z >
      cfg_.eps_s + 64.0 * std::numeric_limits<double>::epsilon()) {
    ++report_.slack_opnorm_violations;
  }

  state_.y = y_new;
  state_.S = std::move(s_new);
  impl_->s_decomp = std::move(s_new_decomp);
  state_.eta = eta_new;
  ++state_.iter;
  rec.iter = state_.iter;
  rec.eta = eta_new;

  impl_->ranks.push_back(rec.rank_update);
  if (impl_->sink) {
    impl_->sink->write(rec);
  }
  if (cfg_.keep_records) {
    impl_->records.push_back(rec);
  }
  return rec;
}

SolveResult Solver::run() {
  while (state_.iter < impl_->iteration_budget &&
         state_.eta < impl_->eta_target) {
    step();
  }

  report_.iterations = state_.iter;
  report_.eta_final = state_.eta;
  report_.converged = state_.eta >= impl_->eta_target;
  report_.termination_reason =
      report_.converged ? "eta target reached" : "iteration budget exhausted";

  const Eigen::Index n = modified_.original_n;
  const Eigen::Index nb = modified_.inst.n;

  // Central-path primal candidate X = S^{-1} / eta, restricted to its block
  // structure (the embedding keeps every constraint block-diagonal, so the
  // couplings are zeroed rather than trusted to fp noise).
  Eigen::MatrixXd x_bar =
      matrix_function(impl_->s_decomp, MatrixFunction::Inverse, nb) / state_.eta;
  Eigen::MatrixXd x_clean = Eigen::MatrixXd::Zero(nb, nb);
  x_clean.topLeftCorner(n, n) = x_bar.topLeftCorner(n, n);
  x_clean(n, n) = x_bar(n, n);
  x_clean(n + 1, n + 1) = x_bar(n + 1, n + 1);

  SolveResult result;
  result.X_hat = SymMatrix(modified_.R * x_clean.topLeftCorner(n, n));
  result.y = state_.y;

  const SdpInstance& original = impl_->original;

  report_.objective = trace_product(original.C, result.X_hat);
  double residual = 0.0;
  double schatten_sum = 0.0;
  for (Eigen::Index i = 0; i < original.m; ++i) {
    residual += std::abs(
        trace_product(original.A[static_cast<std::size_t>(i)], result.X_hat) -
        original.b(i));
    schatten_sum += spectral_decompose(original.A[static_cast<std::size_t>(i)])
                        .eigenvalues.cwiseAbs()
                        .sum();
  }
  report_.feasibility_residual = residual;
  report_.feasibility_bound =
      4.0 * static_cast<double>(n) * modified_.delta *
      (modified_.R * schatten_sum + original.b.cwiseAbs().sum());
  report_.objective_gap_bound =
      modified_.delta * norms(original.C).operator_norm * modified_.R;
  report_.dual_objective = modified_.inst.b.dot(state_.y);
  report_.duality_gap_bound =
      impl_->nbar / state_.eta * (1.0 + 2.0 * cfg_.eps_n);

  const bool invariants_clean = report_.proximity_violations == 0 &&
                                report_.slack_opnorm_violations == 0 &&
                                report_.decrement_violations == 0 &&
                                report_.sandwich_violations == 0;
  report_.certified = report_.converged && invariants_clean &&
                      report_.feasibility_residual <= report_.feasibility_bound;

  if (impl_->sink) {
    impl_->sink->close();
  }
  result.report = report_;
  result.records = std::move(impl_->records);
  return result;
}

SolveResult solve(const SdpInstance& inst, const SolveConfig& cfg) {
  Solver solver(inst, cfg);
  return solver.run();
}

}  // namespace sdpipm
