#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "sdpipm/linalg.hpp"

namespace sdpipm {

struct FlopCounters {
  long nn_mults = 0;        // n x n matrix products this iteration
  long mm_solves = 0;       // m x m SPD solves
  long tmat_n_mr_n = 0;     // flops charged to the n x (m r) x n products
  long tmat_m_nr_m = 0;     // flops charged to the m x (n r) x m Gram step
  long input_read_mn2 = 0;  // flops charged to slack/gradient passes over A
};

/// One telemetry line per iteration. Debug-only fields are NaN/absent when
/// the solve ran without per-iteration exact-Hessian checks.
struct IterationRecord {
  long iter = 0;
  double eta = 0.0;
  double newton_decrement = 0.0;        // g^T H_tilde^{-1} g as computed
  double newton_decrement_exact = std::numeric_limits<double>::quiet_NaN();
  Eigen::Index rank_update = 0;         // r_t, zeroed eigenvalue count
  double potential_z = 0.0;             // Phi(Z) after the slack update
  double potential_zmid = 0.0;          // Phi(Z_mid) before the slack update
  double frob_proximity = 0.0;          // ||S^{-1/2} S_new S^{-1/2} - I||_F
  double opnorm_z = 0.0;                // ||Z_new||_op
  double hessian_residual = std::numeric_limits<double>::quiet_NaN();
  double eps_n = 0.0;
  double eps_s = 0.0;
  double alpha_h = 0.0;
  FlopCounters flop_counters;
  std::vector<double> zmid_abs_eigs;    // |lambda(Z_mid)| descending
  std::vector<double> z_abs_eigs;       // |lambda(Z_new)| descending
};

/// Phi(Z) = sum_i |lambda(Z)|_[i] / sqrt(i) with magnitudes sorted descending.
double potential(const SymMatrix& z);
double potential(const Eigen::VectorXd& abs_eigs_any_order);

/// Serializes one record as a single JSON object (17 significant digits, so a
/// reparse reproduces every float exactly).
void emit(const IterationRecord& record, std::ostream& sink);

std::vector<IterationRecord> parse_telemetry(std::istream& in);
std::vector<IterationRecord> parse_telemetry_file(const std::string& path);

struct LemmaCheckCounts {
  long pass = 0;
  long fail = 0;
  long skipped = 0;
};

struct LemmaReport {
  // Hard invariants.
  LemmaCheckCounts step_proximity;      // frob_proximity <= alpha_h * eps_n
  LemmaCheckCounts newton_decrement;    // exact decrement <= eps_n^2
  LemmaCheckCounts slack_opnorm;        // opnorm_z <= eps_s
  // Potential diagnostics, gated on their preconditions.
  LemmaCheckCounts potential_increase;  // Phi(Zmid) - Phi(Z_prev) <= sqrt(log n)
  LemmaCheckCounts potential_decrease;        // >= 1e-4 / log n * sqrt(r)
  LemmaCheckCounts potential_decrease_algo;   // >= 1e-3 / log n * sqrt(r)
  LemmaCheckCounts eig_displacement;    // sum (|l(Z)|-|l(Zmid)|)^2 <= 1e-3
  long precondition_violations = 0;

  double rank_sum_lhs = 0.0;    // sum_i sqrt(r_i), r_0 = n
  double rank_sum_bound = 0.0;  // C_rank * T * (log n)^1.5
  double rank_ratio = 0.0;
  bool rank_pass = false;

  bool hard_invariants_ok() const {
    return step_proximity.fail == 0 && newton_decrement.fail == 0 &&
           slack_opnorm.fail == 0;
  }
};

/// Reporting constant for the rank inequality, from summing the potential
/// drop bound over a solve.
inline constexpr double kRankConstant = 1.4142135623730951e4;  // 1e4 * sqrt(2)

struct RankCheck {
  double lhs = 0.0;
  double bound = 0.0;
  double ratio = 0.0;
  bool pass = false;
};

/// lhs = sum sqrt(r_i) over r_0 = n, r_1..r_T; bound = kRankConstant * T *
/// (log n)^1.5. Reported as a ratio; pass when lhs <= bound.
RankCheck check_rank_inequality(const std::vector<Eigen::Index>& ranks,
                                Eigen::Index n);

/// Evaluates every per-iteration check over a record stream. `n` is the
/// dimension the solve ran at (the embedded dimension for end-to-end runs).
LemmaReport check_potential_lemmas(const std::vector<IterationRecord>& records,
                                   Eigen::Index n);

/// Streams JSON-lines telemetry; single writer per solve.
class TelemetrySink {
 public:
  explicit TelemetrySink(const std::string& path);
  ~TelemetrySink();
  TelemetrySink(const TelemetrySink&) = delete;
  TelemetrySink& operator=(const TelemetrySink&) = delete;

  void write(const IterationRecord& record);
  void close();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace sdpipm
