#include "sdpipm/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "sdpipm/model.hpp"

namespace sdpipm {

double potential(const Eigen::VectorXd& abs_eigs_any_order) {
  std::vector<double> mags(abs_eigs_any_order.data(),
                           abs_eigs_any_order.data() + abs_eigs_any_order.size());
  for (double& v : mags) {
    v = std::abs(v);
  }
  std::sort(mags.begin(), mags.end(), std::greater<double>());
  double phi = 0.0;
  for (std::size_t i = 0; i < mags.size(); ++i) {
    phi += mags[i] / std::sqrt(static_cast<double>(i + 1));
  }
  return phi;
}

double potential(const SymMatrix& z) {
  return potential(spectral_decompose(z).eigenvalues);
}

namespace {

using nlohmann::json;

json counters_to_json(const FlopCounters& c) {
  return json{{"nn_mults", c.nn_mults},
              {"mm_solves", c.mm_solves},
              {"tmat_n_mr_n", c.tmat_n_mr_n},
              {"tmat_m_nr_m", c.tmat_m_nr_m},
              {"input_read_mn2", c.input_read_mn2}};
}

// nlohmann prints doubles at max precision already, but route all floats
// through the shared 17-significant-digit formatter so telemetry and solution
// files agree bit-for-bit on the same value.
json num(double v) {
  if (std::isnan(v)) {
    return nullptr;
  }
  return json::parse(format_double(v));
}

double num_back(const json& j, double fallback) {
  if (j.is_null()) {
    return fallback;
  }
  return j.get<double>();
}

}  // namespace

void emit(const IterationRecord& r, std::ostream& sink) {
  json line{{"iter", r.iter},
            {"eta", num(r.eta)},
            {"newton_decrement", num(r.newton_decrement)},
            {"newton_decrement_exact", num(r.newton_decrement_exact)},
            {"rank_update", r.rank_update},
            {"potential_z", num(r.potential_z)},
            {"potential_zmid", num(r.potential_zmid)},
            {"frob_proximity", num(r.frob_proximity)},
            {"opnorm_z", num(r.opnorm_z)},
            {"hessian_residual", num(r.hessian_residual)},
            {"eps_n", num(r.eps_n)},
            {"eps_s", num(r.eps_s)},
            {"alpha_h", num(r.alpha_h)},
            {"flop_counters", counters_to_json(r.flop_counters)}};
  json zmid = json::array();
  for (double v : r.zmid_abs_eigs) zmid.push_back(num(v));
  json znew = json::array();
  for (double v : r.z_abs_eigs) znew.push_back(num(v));
  line["zmid_abs_eigs"] = std::move(zmid);
  line["z_abs_eigs"] = std::move(znew);
  sink << line.dump() << "\n";
  if (!sink) {
    throw std::runtime_error("telemetry sink write failed");
  }
}

std::vector<IterationRecord> parse_telemetry(std::istream& in) {
  std::vector<IterationRecord> records;
  std::string raw;
  long lineno = 0;
  constexpr double nan = std::numeric_limits<double>::quiet_NaN();
  while (std::getline(in, raw)) {
    ++lineno;
    if (raw.find_first_not_of(" \t\r") == std::string::npos) {
      continue;
    }
    json line;
    try {
      line = json::parse(raw);
    } catch (const json::parse_error& e) {
      throw ParseError(std::string("telemetry JSON parse error: ") + e.what(),
                       lineno);
    }
    try {
      IterationRecord r;
      r.iter = line.at("iter").get<long>();
      r.eta = num_back(line.at("eta"), nan);
      r.newton_decrement = num_back(line.at("newton_decrement"), nan);
      r.newton_decrement_exact = num_back(line.at("newton_decrement_exact"), nan);
      r.rank_update = line.at("rank_update").get<Eigen::Index>();
      r.potential_z = num_back(line.at("potential_z"), nan);
      r.potential_zmid = num_back(line.at("potential_zmid"), nan);
      r.frob_proximity = num_back(line.at("frob_proximity"), nan);
      r.opnorm_z = num_back(line.at("opnorm_z"), nan);
      r.hessian_residual = num_back(line.at("hessian_residual"), nan);
      r.eps_n = num_back(line.at("eps_n"), nan);
      r.eps_s = num_back(line.at("eps_s"), nan);
      r.alpha_h = num_back(line.at("alpha_h"), nan);
      const json& fc = line.at("flop_counters");
      r.flop_counters.nn_mults = fc.at("nn_mults").get<long>();
      r.flop_counters.mm_solves = fc.at("mm_solves").get<long>();
      r.flop_counters.tmat_n_mr_n = fc.at("tmat_n_mr_n").get<long>();
      r.flop_counters.tmat_m_nr_m = fc.at("tmat_m_nr_m").get<long>();
      r.flop_counters.input_read_mn2 = fc.at("input_read_mn2").get<long>();
      for (const json& v : line.at("zmid_abs_eigs")) {
        r.zmid_abs_eigs.push_back(v.get<double>());
      }
      for (const json& v : line.at("z_abs_eigs")) {
        r.z_abs_eigs.push_back(v.get<double>());
      }
      records.push_back(std::move(r));
    } catch (const json::exception& e) {
      throw ParseError(std::string("telemetry record missing field: ") + e.what(),
                       lineno);
    }
  }
  return records;
}

std::vector<IterationRecord> parse_telemetry_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("cannot open telemetry file: " + path);
  }
  return parse_telemetry(in);
}

RankCheck check_rank_inequality(const std::vector<Eigen::Index>& ranks,
                                Eigen::Index n) {
  RankCheck check;
  check.lhs = std::sqrt(static_cast<double>(n));  // r_0 = n
  for (Eigen::Index r : ranks) {
    check.lhs += std::sqrt(static_cast<double>(r));
  }
  const double t = static_cast<double>(ranks.size());
  const double log_n = std::log(std::max<double>(2.0, static_cast<double>(n)));
  check.bound = kRankConstant * std::max(t, 1.0) * std::pow(log_n, 1.5);
  check.ratio = check.lhs / (std::max(t, 1.0) * std::pow(log_n, 1.5));
  check.pass = check.lhs <= check.bound;
  return check;
}

namespace {

void tally(LemmaCheckCounts& counts, bool ok) {
  if (ok) {
    ++counts.pass;
  } else {
    ++counts.fail;
  }
}

// Measurement slack for comparisons of spectral quantities in doubles.
double fp_slack(double scale) {
  return 64.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, scale);
}

}  // namespace

LemmaReport check_potential_lemmas(const std::vector<IterationRecord>& records,
                                   Eigen::Index n) {
  LemmaReport report;
  const double log_n = std::log(static_cast<double>(n));
  const double sqrt_log_n = std::sqrt(log_n);

  double prev_potential_z = 0.0;  // S_tilde starts equal to S, so Phi(Z_0) = 0
  std::vector<double> prev_z_abs;
  std::vector<Eigen::Index> ranks;
  ranks.reserve(records.size());

  for (const IterationRecord& r : records) {
    ranks.push_back(r.rank_update);

    tally(report.step_proximity,
          r.frob_proximity <= r.alpha_h * r.eps_n + fp_slack(1.0));
    if (std::isnan(r.newton_decrement_exact)) {
      ++report.newton_decrement.skipped;
    } else {
      tally(report.newton_decrement,
            r.newton_decrement_exact <= r.eps_n * r.eps_n + fp_slack(1.0));
    }
    tally(report.slack_opnorm, r.opnorm_z <= r.eps_s + fp_slack(1.0));

    // Potential lemmas hold under the proximity preconditions: the step
    // proximity within 0.02 and the previous error matrix within 0.01.
    const double prev_opnorm = prev_z_abs.empty() ? 0.0 : prev_z_abs.front();
    const bool preconditions_ok =
        r.frob_proximity <= 0.02 + fp_slack(1.0) &&
        prev_opnorm <= 0.01 + fp_slack(1.0);
    if (!preconditions_ok) {
      ++report.precondition_violations;
      ++report.potential_increase.skipped;
      ++report.potential_decrease.skipped;
      ++report.potential_decrease_algo.skipped;
      ++report.eig_displacement.skipped;
    } else {
      tally(report.potential_increase,
            r.potential_zmid - prev_potential_z <= sqrt_log_n + fp_slack(1.0));
      if (r.rank_update == 0) {
        ++report.potential_decrease.skipped;
        ++report.potential_decrease_algo.skipped;
      } else {
        const double drop = r.potential_zmid - r.potential_z;
        const double sqrt_r = std::sqrt(static_cast<double>(r.rank_update));
        tally(report.potential_decrease,
              drop >= 1e-4 / log_n * sqrt_r - fp_slack(1.0));
        tally(report.potential_decrease_algo,
              drop >= 1e-3 / log_n * sqrt_r - fp_slack(1.0));
      }
      if (prev_z_abs.empty() || prev_z_abs.size() == r.zmid_abs_eigs.size()) {
        // An absent previous list means Z_0 = 0 (the solve starts with
        // S_tilde = S), so its magnitudes are all zero.
        double disp = 0.0;
        for (std::size_t i = 0; i < r.zmid_abs_eigs.size(); ++i) {
          const double prev = i < prev_z_abs.size() ? prev_z_abs[i] : 0.0;
          const double d = prev - r.zmid_abs_eigs[i];
          disp += d * d;
        }
        tally(report.eig_displacement, disp <= 1e-3 + fp_slack(1.0));
      } else {
        ++report.eig_displacement.skipped;
      }
    }

    prev_potential_z = r.potential_z;
    prev_z_abs = r.z_abs_eigs;
  }

  const RankCheck rank = check_rank_inequality(ranks, n);
  report.rank_sum_lhs = rank.lhs;
  report.rank_sum_bound = rank.bound;
  report.rank_ratio = rank.ratio;
  report.rank_pass = rank.pass;
  return report;
}

struct TelemetrySink::Impl {
  std::ofstream out;
};

TelemetrySink::TelemetrySink(const std::string& path) : impl_(new Impl) {
  impl_->out.open(path, std::ios::trunc);
  if (!impl_->out) {
    throw std::runtime_error("cannot open telemetry file for writing: " + path);
  }
}

TelemetrySink::~TelemetrySink() = default;

void TelemetrySink::write(const IterationRecord& record) {
  emit(record, impl_->out);
}

void TelemetrySink::close() {
  impl_->out.flush();
  if (!impl_->out) {
    throw std::runtime_error("telemetry flush failed");
  }
  impl_->out.close();
}

}  // namespace sdpipm
