#include <cstdlib>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "sdpipm/cost_model.hpp"
#include "sdpipm/diagnostics.hpp"
#include "sdpipm/model.hpp"
#include "sdpipm/solver.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitCertificate = 2;
constexpr int kExitAbort = 3;

int run_solve(const std::string& instance_path, sdpipm::SolveConfig cfg,
              double r_flag, double l_flag, const std::string& out_path) {
  sdpipm::SdpInstance inst;
  try {
    std::ifstream in(instance_path);
    if (!in) {
      std::cerr << "error: cannot open instance file: " << instance_path << "\n";
      return kExitUsage;
    }
    inst = sdpipm::parse_instance(in);
    if (r_flag > 0.0) inst.R = r_flag;
    if (l_flag > 0.0) inst.L = l_flag;
    if (!(inst.R > 0.0)) {
      std::cerr << "error: no diameter bound given; the solution-quality "
                   "guarantee assumes every feasible X satisfies ||X||_op <= R. "
                   "Pass --r or add a '#R <value>' header.\n";
      return kExitUsage;
    }
    sdpipm::validate(inst);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }

  try {
    const sdpipm::SolveResult result = sdpipm::solve(inst, cfg);
    const sdpipm::SolveReport& rep = result.report;
    if (!out_path.empty()) {
      sdpipm::write_solution_file(
          result.X_hat, result.y,
          sdpipm::SolutionReport{rep.objective, rep.eta_final}, out_path);
    } else {
      sdpipm::write_solution(
          result.X_hat, result.y,
          sdpipm::SolutionReport{rep.objective, rep.eta_final}, std::cout);
    }
    std::cerr << "objective " << sdpipm::format_double(rep.objective)
              << "\nfeasibility_residual "
              << sdpipm::format_double(rep.feasibility_residual)
              << " (bound " << sdpipm::format_double(rep.feasibility_bound)
              << ")\niterations " << rep.iterations << " eta_final "
              << sdpipm::format_double(rep.eta_final) << "\n";
    if (rep.initial_decrement_violation) {
      std::cerr << "note: schedule starting point missed the Newton radius "
                   "(decrement "
                << rep.initial_decrement << "); eta advanced to "
                << rep.eta_init_used << "\n";
    }
    if (!rep.certified) {
      std::cerr << "certificate check FAILED: " << rep.termination_reason
                << ", residual within bound: "
                << (rep.feasibility_residual <= rep.feasibility_bound ? "yes"
                                                                      : "no")
                << "\n";
      return kExitCertificate;
    }
    return kExitOk;
  } catch (const std::exception& e) {
    std::cerr << "solver abort: " << e.what() << "\n";
    return kExitAbort;
  }
}

int run_check(const std::string& telemetry_path, long n) {
  std::vector<sdpipm::IterationRecord> records;
  try {
    records = sdpipm::parse_telemetry_file(telemetry_path);
    if (records.empty()) {
      std::cerr << "error: telemetry file has no records\n";
      return kExitUsage;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }

  const sdpipm::LemmaReport rep = sdpipm::check_potential_lemmas(records, n);
  auto line = [](const char* name, const sdpipm::LemmaCheckCounts& c) {
    std::cout << name << " pass " << c.pass << " fail " << c.fail << " skip "
              << c.skipped << "\n";
  };
  line("step_proximity        ", rep.step_proximity);
  line("newton_decrement      ", rep.newton_decrement);
  line("slack_opnorm          ", rep.slack_opnorm);
  line("potential_increase    ", rep.potential_increase);
  line("potential_decrease    ", rep.potential_decrease);
  line("potential_decrease_1e3", rep.potential_decrease_algo);
  line("eig_displacement      ", rep.eig_displacement);
  std::cout << "precondition_violations " << rep.precondition_violations << "\n";
  std::cout << "rank_sum " << rep.rank_sum_lhs << " bound " << rep.rank_sum_bound
            << " ratio " << rep.rank_ratio << " "
            << (rep.rank_pass ? "pass" : "fail") << "\n";

  if (!rep.hard_invariants_ok()) {
    std::cerr << "hard invariant violation:";
    if (rep.step_proximity.fail > 0) {
      std::cerr << " step_proximity (frob_proximity > alpha_h * eps_n)";
    }
    if (rep.newton_decrement.fail > 0) {
      std::cerr << " newton_decrement (exact decrement > eps_n^2)";
    }
    if (rep.slack_opnorm.fail > 0) {
      std::cerr << " slack_opnorm (||Z||_op > eps_s)";
    }
    std::cerr << "\n";
    return kExitCertificate;
  }
  return kExitOk;
}

int run_costmodel(double a, bool print_table, const std::string& anchor_path) {
  try {
    sdpipm::OmegaTable table;
    if (!anchor_path.empty()) {
      std::ifstream in(anchor_path);
      if (!in) {
        std::cerr << "error: cannot open anchor file: " << anchor_path << "\n";
        return kExitUsage;
      }
      table = sdpipm::OmegaTable::from_stream(in);
    }
    if (print_table) {
      std::cout << sdpipm::exponent_table(table);
      return kExitOk;
    }
    const sdpipm::SolverExponents e = sdpipm::solver_exponent(table, a);
    std::cout.setf(std::ios::fixed);
    std::cout.precision(3);
    std::cout << "m = n^" << a << "\n";
    std::cout << "  input term      <= " << e.input_term << "\n";
    std::cout << "  hessian inverse <= " << e.hessian_inverse_term << "\n";
    std::cout << "  slack inverse   <= " << e.slack_inverse_term << "\n";
    std::cout << "  total           <= " << e.total << "\n";
    std::cout << "  cutting plane   <= " << e.cutting_plane << "\n";
    return kExitOk;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"dual log-barrier interior-point SDP solver with low-rank "
               "slack maintenance"};
  app.require_subcommand(1);

  // solve
  auto* solve_cmd = app.add_subcommand("solve", "solve an instance file");
  std::string instance_path;
  std::string mode = "lowrank";
  std::string telemetry;
  std::string out_path;
  double delta = 0.001;
  double eps_n = 0.1;
  double r_flag = 0.0;
  double l_flag = 0.0;
  std::uint64_t seed = 0;
  bool strict = false;
  bool debug = false;
  solve_cmd->add_option("instance", instance_path, "instance file")->required();
  solve_cmd->add_option("--delta", delta, "accuracy parameter in (0, 0.01]")
      ->required();
  solve_cmd->add_option("--eps-n", eps_n, "Newton step size bound");
  solve_cmd->add_option("--mode", mode, "lowrank|baseline")
      ->check(CLI::IsMember({"lowrank", "baseline"}));
  solve_cmd->add_flag("--strict-constants", strict,
                      "run with eps_n = 0.019 for potential diagnostics");
  solve_cmd->add_flag("--debug-checks", debug,
                      "per-iteration exact-Hessian invariant checks");
  solve_cmd->add_option("--telemetry", telemetry, "JSON-lines telemetry path");
  solve_cmd->add_option("--out", out_path, "solution file path");
  solve_cmd->add_option("--r", r_flag, "diameter bound R");
  solve_cmd->add_option("--l", l_flag, "Lipschitz bound L (default ||C||_op)");
  solve_cmd->add_option("--seed", seed, "seed for auxiliary generators");

  // check
  auto* check_cmd = app.add_subcommand("check", "evaluate telemetry invariants");
  std::string check_path;
  long check_n = 0;
  check_cmd->add_option("telemetry", check_path, "telemetry JSON-lines file")
      ->required();
  check_cmd->add_option("--n", check_n, "dimension the solve ran at")
      ->required();

  // costmodel
  auto* cost_cmd = app.add_subcommand("costmodel", "runtime exponent model");
  double a_exp = 1.0;
  bool print_table = false;
  std::string anchor_path;
  auto* a_opt = cost_cmd->add_option("--a", a_exp, "constraint exponent, m = n^a");
  cost_cmd->add_flag("--table", print_table, "print the comparison table");
  cost_cmd->add_option("--anchors", anchor_path, "anchor file of 'k omega' pairs");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kExitOk : kExitUsage;
  }

  if (solve_cmd->parsed()) {
    sdpipm::SolveConfig cfg;
    cfg.delta = delta;
    cfg.eps_n = eps_n;
    cfg.mode = mode == "baseline" ? sdpipm::SolveMode::Baseline
                                  : sdpipm::SolveMode::LowRank;
    cfg.strict_constants = strict;
    cfg.debug_checks = debug;
    cfg.seed = seed;
    if (const char* env = std::getenv("SDP_TELEMETRY"); env != nullptr && *env) {
      telemetry = env;
    }
    if (!telemetry.empty()) {
      cfg.telemetry_path = telemetry;
    }
    try {
      cfg.finalize_and_validate();
    } catch (const std::exception& e) {
      std::cerr << "error: " << e.what() << "\n";
      return kExitUsage;
    }
    return run_solve(instance_path, cfg, r_flag, l_flag, out_path);
  }
  if (check_cmd->parsed()) {
    if (check_n < 1) {
      std::cerr << "error: --n must be >= 1\n";
      return kExitUsage;
    }
    return run_check(check_path, check_n);
  }
  if (cost_cmd->parsed()) {
    if (!print_table && a_opt->count() == 0) {
      std::cerr << "error: costmodel needs --a or --table\n";
      return kExitUsage;
    }
    return run_costmodel(a_exp, print_table, anchor_path);
  }
  return kExitUsage;
}
