#pragma once

#include <memory>
#include <string>
#include <vector>

#include "sdpipm/barrier.hpp"
#include "sdpipm/diagnostics.hpp"
#include "sdpipm/hessian_maintenance.hpp"
#include "sdpipm/model.hpp"
#include "sdpipm/slack_update.hpp"

namespace sdpipm {

/// Thrown when the solve cannot continue (iterate left the cone, Newton
/// system unusable, or the initial point is outside the Newton radius).
class NumericalAbortError : public std::runtime_error {
 public:
  explicit NumericalAbortError(const std::string& what)
      : std::runtime_error(what) {}
};

/// The embedded problem: dimension n+2, m+1 constraints, with an explicit
/// strictly feasible primal/dual pair.
struct ModifiedInstance {
  SdpInstance inst;          // the embedded problem the solver runs on
  Eigen::Index original_n = 0;
  Eigen::Index original_m = 0;
  double R = 0.0;
  double L = 0.0;
  double delta = 0.0;
};

struct DualState {
  Eigen::VectorXd y;
  SymMatrix S{Eigen::MatrixXd::Zero(1, 1)};
  SymMatrix S_tilde{Eigen::MatrixXd::Zero(1, 1)};
  double eta = 0.0;
  long iter = 0;
};

/// Builds the embedding and its initial dual point: y = (0_m, 1),
/// S = diag(I_n - C delta/L, 1, 1), eta = 1/(n+2), S_tilde = S.
std::pair<ModifiedInstance, DualState> build_modified(const SdpInstance& inst,
                                                      double delta);

struct SolveReport {
  bool converged = false;
  bool certified = false;
  std::string termination_reason;
  long iterations = 0;
  long iteration_budget = 0;

  double objective = 0.0;              // <C, X_hat> for the original problem
  double feasibility_residual = 0.0;   // sum_i |<A_i, X_hat> - b_i|
  double feasibility_bound = 0.0;      // 4 n delta (R sum ||A_i||_1 + ||b||_1)
  double objective_gap_bound = 0.0;    // delta ||C||_op R
  double dual_objective = 0.0;         // b^T y on the embedded problem
  double duality_gap_bound = 0.0;      // (n_bar / eta) (1 + 2 eps_n)
  double eta_final = 0.0;
  double eta_target = 0.0;

  // Startup measurements. The literal schedule starts at eta = 1/(n+2); when
  // the Newton decrement there exceeds eps_n^2 the solver reports it and
  // advances eta once to the decrement-minimizing value before iterating.
  double eta_init_schedule = 0.0;
  double eta_init_used = 0.0;
  double initial_decrement = 0.0;
  double initial_decrement_used = 0.0;
  bool initial_decrement_violation = false;

  long proximity_violations = 0;
  long slack_opnorm_violations = 0;
  long decrement_violations = 0;       // debug runs only
  long sandwich_violations = 0;        // debug runs only
  double hessian_sandwich_min = std::numeric_limits<double>::quiet_NaN();
  double hessian_sandwich_max = std::numeric_limits<double>::quiet_NaN();
  double hessian_oracle_max_residual = std::numeric_limits<double>::quiet_NaN();
};

struct SolveResult {
  SymMatrix X_hat{Eigen::MatrixXd::Zero(1, 1)};
  Eigen::VectorXd y;  // dual vector of the embedded problem
  SolveReport report;
  std::vector<IterationRecord> records;  // kept when cfg asks for them
};

/// One solve owns one state machine; instances are shared read-only.
class Solver {
 public:
  Solver(const SdpInstance& inst, SolveConfig cfg);
  ~Solver();
  Solver(const Solver&) = delete;
  Solver& operator=(const Solver&) = delete;

  /// One loop body: raise eta, Newton step from the maintained Hessian,
  /// reassemble the slack, update the approximation.
  IterationRecord step();

  /// Full schedule plus primal extraction and certificates.
  SolveResult run();

  const DualState& state() const { return state_; }
  const ModifiedInstance& modified() const { return modified_; }
  const SolveReport& report() const { return report_; }
  const Eigen::MatrixXd& approx_hessian() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
  ModifiedInstance modified_;
  DualState state_;
  SolveConfig cfg_;
  SolveReport report_;
};

/// Convenience wrapper: build, run, extract.
SolveResult solve(const SdpInstance& inst, const SolveConfig& cfg);

}  // namespace sdpipm
