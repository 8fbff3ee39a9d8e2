#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "sdpipm/linalg.hpp"

namespace sdpipm {

/// Problem data for max <C,X> s.t. <A_i,X> = b_i, X PSD, together with the
/// diameter bound R (operator norm of any feasible X) and the Lipschitz
/// bound L >= ||C||_op.
struct SdpInstance {
  Eigen::Index n = 0;
  Eigen::Index m = 0;
  SymMatrix C{Eigen::MatrixXd::Zero(1, 1)};
  std::vector<SymMatrix> A;
  Eigen::VectorXd b;
  double R = 0.0;
  double L = 0.0;
};

struct ValidationReport {
  Eigen::Index constraint_rank = 0;
  double smallest_singular_value = 0.0;
  double largest_singular_value = 0.0;
  double max_symmetry_residual = 0.0;
  bool lipschitz_ok = false;
  double c_opnorm = 0.0;
};

enum class SolveMode { LowRank, Baseline };

struct SolveConfig {
  double delta = 0.001;
  double eps_n = 0.1;
  double eps_s = 0.01;
  double alpha_h = 1.03;
  SolveMode mode = SolveMode::LowRank;
  bool strict_constants = false;
  // Per-iteration exact-Hessian checks; O(n^3 + m^3) extra work per step.
  bool debug_checks = false;
  // Retain every IterationRecord in the SolveResult (tests and sweeps).
  bool keep_records = false;
  std::uint64_t seed = 0;
  std::optional<std::string> telemetry_path;
  // 0 means run the full schedule; a positive value caps the iteration count
  // (diagnostic sweeps only).
  long max_iters = 0;
  int hessian_refresh_interval = 50;

  /// Applies the strict-constants override and checks the parameter ranges.
  void finalize_and_validate();
};

/// Parses the single-block sparse instance format. Optional header comments
/// "#R <real>" and "#L <real>" set the bounds; L falls back to ||C||_op.
/// R must be present (header or caller) before solving.
SdpInstance parse_instance(std::istream& in);
SdpInstance parse_instance_text(const std::string& text);

/// Checks constraint-matrix independence (rank of the m x n^2 flattening at
/// relative tolerance 1e-8) and the bound L >= ||C||_op. Throws
/// ValidationError on redundant constraints.
ValidationReport validate(const SdpInstance& inst);

/// Writes an instance in the same format parse_instance reads. Values are
/// printed with 17 significant digits so a parse round-trips bit-exactly.
void write_instance(const SdpInstance& inst, std::ostream& out);

struct SolutionReport {
  double objective = 0.0;
  double eta = 0.0;
};

void write_solution(const SymMatrix& x_hat, const Eigen::VectorXd& y,
                    const SolutionReport& report, std::ostream& out);
void write_solution_file(const SymMatrix& x_hat, const Eigen::VectorXd& y,
                         const SolutionReport& report, const std::string& path);

struct ParsedSolution {
  double objective = 0.0;
  double eta = 0.0;
  Eigen::VectorXd y;
  SymMatrix x_hat{Eigen::MatrixXd::Zero(1, 1)};
};

ParsedSolution parse_solution(std::istream& in);

/// 17-significant-digit scientific form; reparses to the identical double.
std::string format_double(double v);

}  // namespace sdpipm
