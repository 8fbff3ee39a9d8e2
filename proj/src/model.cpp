#include "sdpipm/model.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>

namespace sdpipm {

void SolveConfig::finalize_and_validate() {
  if (strict_constants) {
    // Lowers the step size so the frobenius proximity alpha_h * eps_n stays
    // within the 0.02 band the potential diagnostics assume.
    eps_n = 0.019;
  }
  if (!(delta > 0.0 && delta <= 0.01)) {
    throw ValidationError("delta must lie in (0, 0.01], got " +
                          std::to_string(delta));
  }
  // Non-strict at the boundary: sqrt(0.01) == 0.1 in doubles, and the default
  // configuration (delta = 0.01, eps_n = 0.1) sits exactly there.
  if (!(std::sqrt(delta) <= eps_n && eps_n <= 0.1)) {
    throw ValidationError("eps_n must satisfy sqrt(delta) <= eps_n <= 0.1");
  }
  if (!(eps_s > 0.0 && eps_s <= 0.01)) {
    throw ValidationError("eps_s must lie in (0, 0.01]");
  }
  if (!(alpha_h >= 1.0)) {
    throw ValidationError("alpha_h must be >= 1");
  }
  if (hessian_refresh_interval < 1) {
    throw ValidationError("hessian refresh interval must be >= 1");
  }
}

namespace {

struct Token {
  std::string text;
  long line;
};

struct TokenStream {
  std::vector<Token> tokens;
  std::size_t pos = 0;
  long last_line = 0;

  bool done() const { return pos >= tokens.size(); }

  const Token& next(const char* what) {
    if (done()) {
      throw ParseError(std::string("unexpected end of input, expected ") + what,
                       last_line);
    }
    last_line = tokens[pos].line;
    return tokens[pos++];
  }

  long expect_integer(const char* what) {
    const Token& tok = next(what);
    std::size_t used = 0;
    long value = 0;
    try {
      value = std::stol(tok.text, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != tok.text.size()) {
      throw ParseError("expected integer for " + std::string(what) + ", got '" +
                           tok.text + "'",
                       tok.line);
    }
    return value;
  }

  double expect_real(const char* what) {
    const Token& tok = next(what);
    std::size_t used = 0;
    double value = 0;
    try {
      value = std::stod(tok.text, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != tok.text.size()) {
      throw ParseError("expected real for " + std::string(what) + ", got '" +
                           tok.text + "'",
                       tok.line);
    }
    if (!std::isfinite(value)) {
      throw ParseError("non-finite value for " + std::string(what), tok.line);
    }
    return value;
  }
};

double parse_header_bound(const std::string& rest, long line, char which) {
  std::istringstream ss(rest);
  double value;
  if (!(ss >> value) || !std::isfinite(value) || value <= 0.0) {
    throw ParseError(std::string("invalid #") + which + " header value", line);
  }
  return value;
}

}  // namespace

SdpInstance parse_instance(std::istream& in) {
  TokenStream stream;
  std::optional<double> header_r;
  std::optional<double> header_l;

  std::string raw;
  long lineno = 0;
  while (std::getline(in, raw)) {
    ++lineno;
    std::string line = raw;
    const std::size_t hash = line.find('#');
    if (hash != std::string::npos) {
      std::string comment = line.substr(hash + 1);
      if (!comment.empty() && (comment[0] == 'R' || comment[0] == 'L') &&
          (comment.size() == 1 || std::isspace(static_cast<unsigned char>(comment[1])))) {
        const double v = parse_header_bound(comment.substr(1), lineno, comment[0]);
        if (comment[0] == 'R') {
          header_r = v;
        } else {
          header_l = v;
        }
      }
      line.erase(hash);
    }
    std::istringstream ss(line);
    std::string tok;
    while (ss >> tok) {
      stream.tokens.push_back(Token{tok, lineno});
    }
  }

  if (stream.tokens.empty()) {
    throw ParseError("empty instance stream");
  }

  const long m = stream.expect_integer("constraint count m");
  if (m < 1) {
    throw ParseError("constraint count m must be >= 1", stream.last_line);
  }
  const long blocks = stream.expect_integer("block count");
  if (blocks != 1) {
    throw ParseError("block count must be 1, got " + std::to_string(blocks),
                     stream.last_line);
  }
  const long n = stream.expect_integer("block size n");
  if (n < 1) {
    throw ParseError("block size n must be >= 1", stream.last_line);
  }

  Eigen::VectorXd b(m);
  for (long i = 0; i < m; ++i) {
    b(i) = stream.expect_real("b entry");
  }

  std::vector<Eigen::MatrixXd> mats(static_cast<std::size_t>(m) + 1,
                                    Eigen::MatrixXd::Zero(n, n));
  std::map<std::tuple<long, long, long>, long> seen;
  while (!stream.done()) {
    const long matno = stream.expect_integer("matrix number");
    const long entry_line = stream.last_line;
    const long i = stream.expect_integer("row index");
    const long j = stream.expect_integer("column index");
    const double value = stream.expect_real("entry value");
    if (matno < 0 || matno > m) {
      throw ParseError("matrix number " + std::to_string(matno) +
                           " out of range [0, " + std::to_string(m) + "]",
                       entry_line);
    }
    if (i < 1 || j < 1 || i > n || j > n) {
      throw ParseError("index (" + std::to_string(i) + ", " + std::to_string(j) +
                           ") out of range for n = " + std::to_string(n),
                       entry_line);
    }
    if (i > j) {
      throw ParseError("entries must satisfy i <= j", entry_line);
    }
    const auto key = std::make_tuple(matno, i, j);
    if (auto it = seen.find(key); it != seen.end()) {
      throw ParseError("duplicate entry for matrix " + std::to_string(matno) +
                           " position (" + std::to_string(i) + ", " +
                           std::to_string(j) + "), first seen on line " +
                           std::to_string(it->second),
                       entry_line);
    }
    seen.emplace(key, entry_line);
    mats[static_cast<std::size_t>(matno)](i - 1, j - 1) = value;
    mats[static_cast<std::size_t>(matno)](j - 1, i - 1) = value;
  }

  SdpInstance inst;
  inst.n = n;
  inst.m = m;
  inst.C = SymMatrix(mats[0]);
  inst.A.reserve(static_cast<std::size_t>(m));
  for (long k = 1; k <= m; ++k) {
    inst.A.emplace_back(mats[static_cast<std::size_t>(k)]);
  }
  inst.b = b;
  inst.R = header_r.value_or(0.0);
  inst.L = header_l.value_or(norms(inst.C).operator_norm);
  return inst;
}

SdpInstance parse_instance_text(const std::string& text) {
  std::istringstream in(text);
  return parse_instance(in);
}

ValidationReport validate(const SdpInstance& inst) {
  ValidationReport report;
  const Eigen::Index n2 = inst.n * inst.n;
  Eigen::MatrixXd flat(inst.m, n2);
  for (Eigen::Index k = 0; k < inst.m; ++k) {
    flat.row(k) =
        Eigen::Map<const Eigen::VectorXd>(inst.A[static_cast<std::size_t>(k)].mat().data(), n2);
    const Eigen::MatrixXd& a = inst.A[static_cast<std::size_t>(k)].mat();
    report.max_symmetry_residual = std::max(
        report.max_symmetry_residual, (a - a.transpose()).cwiseAbs().maxCoeff());
  }

  Eigen::JacobiSVD<Eigen::MatrixXd> svd(flat);
  const Eigen::VectorXd& sv = svd.singularValues();
  report.largest_singular_value = sv.size() > 0 ? sv(0) : 0.0;
  report.smallest_singular_value = sv.size() > 0 ? sv(sv.size() - 1) : 0.0;
  const double tol = 1e-8 * report.largest_singular_value;
  report.constraint_rank = (sv.array() > tol).count();

  report.c_opnorm = norms(inst.C).operator_norm;
  report.lipschitz_ok = inst.L >= report.c_opnorm * (1.0 - 1e-12);

  if (report.constraint_rank < inst.m) {
    std::ostringstream msg;
    msg << "redundant constraints: flattened constraint matrix has rank "
        << report.constraint_rank << " < m = " << inst.m
        << " (smallest singular value " << report.smallest_singular_value
        << ")";
    throw ValidationError(msg.str());
  }
  return report;
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.16e", v);
  return buf;
}

void write_instance(const SdpInstance& inst, std::ostream& out) {
  if (inst.R > 0.0) {
    out << "#R " << format_double(inst.R) << "\n";
  }
  out << "#L " << format_double(inst.L) << "\n";
  out << inst.m << "\n1\n" << inst.n << "\n";
  for (Eigen::Index i = 0; i < inst.m; ++i) {
    out << (i ? " " : "") << format_double(inst.b(i));
  }
  out << "\n";
  auto emit = [&](long matno, const Eigen::MatrixXd& mat) {
    for (Eigen::Index i = 0; i < mat.rows(); ++i) {
      for (Eigen::Index j = i; j < mat.cols(); ++j) {
        if (mat(i, j) != 0.0) {
          out << matno << " " << (i + 1) << " " << (j + 1) << " "
              << format_double(mat(i, j)) << "\n";
        }
      }
    }
  };
  emit(0, inst.C.mat());
  for (Eigen::Index k = 0; k < inst.m; ++k) {
    emit(k + 1, inst.A[static_cast<std::size_t>(k)].mat());
  }
}

void write_solution(const SymMatrix& x_hat, const Eigen::VectorXd& y,
                    const SolutionReport& report, std::ostream& out) {
  out << "obj " << format_double(report.objective) << "\n";
  out << "eta " << format_double(report.eta) << "\n";
  for (Eigen::Index i = 0; i < y.size(); ++i) {
    out << "y " << (i + 1) << " " << format_double(y(i)) << "\n";
  }
  for (Eigen::Index i = 0; i < x_hat.dim(); ++i) {
    for (Eigen::Index j = i; j < x_hat.dim(); ++j) {
      out << "X " << (i + 1) << " " << (j + 1) << " "
          << format_double(x_hat(i, j)) << "\n";
    }
  }
}

void write_solution_file(const SymMatrix& x_hat, const Eigen::VectorXd& y,
                         const SolutionReport& report, const std::string& path) {
  std::ofstream out(path);
  if (!out) {
    throw std::runtime_error("cannot open solution file for writing: " + path);
  }
  write_solution(x_hat, y, report, out);
  if (!out.flush()) {
    throw std::runtime_error("failed writing solution file: " + path);
  }
}

ParsedSolution parse_solution(std::istream& in) {
  ParsedSolution sol;
  std::vector<std::tuple<long, long, double>> x_entries;
  std::vector<std::pair<long, double>> y_entries;
  long max_dim = 0;
  std::string tag;
  long lineno = 0;
  std::string raw;
  while (std::getline(in, raw)) {
    ++lineno;
    std::istringstream ss(raw);
    if (!(ss >> tag)) {
      continue;
    }
    if (tag == "obj") {
      if (!(ss >> sol.objective)) throw ParseError("bad obj line", lineno);
    } else if (tag == "eta") {
      if (!(ss >> sol.eta)) throw ParseError("bad eta line", lineno);
    } else if (tag == "y") {
      long i;
      double v;
      if (!(ss >> i >> v)) throw ParseError("bad y line", lineno);
      y_entries.emplace_back(i, v);
    } else if (tag == "X") {
      long i, j;
      double v;
      if (!(ss >> i >> j >> v)) throw ParseError("bad X line", lineno);
      x_entries.emplace_back(i, j, v);
      max_dim = std::max({max_dim, i, j});
    } else {
      throw ParseError("unknown solution tag '" + tag + "'", lineno);
    }
  }
  sol.y.resize(static_cast<Eigen::Index>(y_entries.size()));
  for (const auto& [i, v] : y_entries) {
    if (i < 1 || i > sol.y.size()) throw ParseError("y index out of range");
    sol.y(i - 1) = v;
  }
  if (max_dim < 1) throw ParseError("solution has no X entries");
  Eigen::MatrixXd x = Eigen::MatrixXd::Zero(max_dim, max_dim);
  for (const auto& [i, j, v] : x_entries) {
    x(i - 1, j - 1) = v;
    x(j - 1, i - 1) = v;
  }
  sol.x_hat = SymMatrix(x);
  return sol;
}

}  // namespace sdpipm
