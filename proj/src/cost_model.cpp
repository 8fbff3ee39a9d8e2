#include "sdpipm/cost_model.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <sstream>

namespace sdpipm {

namespace {

constexpr double kDefaultAnchors[][2] = {
    {1.0, 2.372927}, {1.5, 2.79654}, {1.75, 3.02159}, {2.0, 3.251640}};

}  // namespace

OmegaTable::OmegaTable() {
  for (const auto& a : kDefaultAnchors) {
    anchors_.emplace_back(a[0], a[1]);
  }
  validate();
}

OmegaTable::OmegaTable(std::vector<std::pair<double, double>> anchors)
    : anchors_(std::move(anchors)) {
  std::sort(anchors_.begin(), anchors_.end());
  validate();
}

OmegaTable OmegaTable::from_stream(std::istream& in) {
  std::vector<std::pair<double, double>> anchors;
  double k, w;
  while (in >> k >> w) {
    anchors.emplace_back(k, w);
  }
  if (!in.eof()) {
    throw ParseError("anchor file must contain whitespace-separated k/omega pairs");
  }
  if (anchors.empty()) {
    throw ParseError("anchor file is empty");
  }
  return OmegaTable(std::move(anchors));
}

void OmegaTable::validate() const {
  if (anchors_.empty()) {
    throw ValidationError("omega table needs at least one anchor");
  }
  double prev_k = 0.0;
  double prev_slope = 0.0;
  bool have_prev = false;
  for (std::size_t i = 0; i < anchors_.size(); ++i) {
    const auto& [k, w] = anchors_[i];
    if (!(k > 0.0)) {
      throw ValidationError("omega anchors need k > 0");
    }
    // Trivial floor: the product reads n^{1+k} entries and writes n^2.
    if (w < std::max(2.0, k + 1.0) - 1e-12) {
      std::ostringstream msg;
      msg << "anchor omega(" << k << ") = " << w
          << " is below the trivial lower bound " << std::max(2.0, k + 1.0);
      throw ValidationError(msg.str());
    }
    if (i > 0) {
      if (k <= prev_k) {
        throw ValidationError("omega anchors must have distinct ascending k");
      }
      const double slope = (w - anchors_[i - 1].second) / (k - prev_k);
      if (slope > 1.0 + 1e-12) {
        throw ValidationError("anchor set violates sublinearity (slope > 1)");
      }
      if (have_prev && slope < prev_slope - 1e-12) {
        throw ValidationError("anchor set is not convex");
      }
      prev_slope = slope;
      have_prev = true;
    }
    prev_k = k;
  }
}

double OmegaTable::omega_of(double k) const {
  if (!(k > 0.0)) {
    throw ValidationError("omega_of requires k > 0");
  }
  const double k_min = anchors_.front().first;
  const double k_max = anchors_.back().first;
  double best;
  if (k <= k_min) {
    // Small-k regime: a wider middle dimension can only cost more, so the
    // first anchor's value is a valid upper bound below it.
    best = anchors_.front().second;
  } else if (k >= k_max) {
    // Sublinearity from the last anchor.
    best = anchors_.back().second + (k - k_max);
  } else {
    // Convex interpolation between the bracketing anchors.
    std::size_t hi = 1;
    while (anchors_[hi].first < k) {
      ++hi;
    }
    const auto& [k0, w0] = anchors_[hi - 1];
    const auto& [k1, w1] = anchors_[hi];
    const double t = (k - k0) / (k1 - k0);
    best = (1.0 - t) * w0 + t * w1;
    // Sublinearity from any earlier anchor can only help when the
    // interpolation slope exceeds 1; take the minimum anyway.
    for (std::size_t i = 0; i < hi; ++i) {
      best = std::min(best, anchors_[i].second + (k - anchors_[i].first));
    }
  }
  return best;
}

double tmat_exponent(const OmegaTable& table, double p, double q, double r) {
  if (!(p > 0.0 && q > 0.0 && r > 0.0)) {
    throw UnsupportedShapeError("tmat_exponent requires positive exponents");
  }
  // Cost is permutation invariant; normalize so the repeated exponent is the
  // outer pair.
  double a, c;
  const double eps = 1e-12;
  if (std::abs(p - r) < eps) {
    a = p;
    c = q;
  } else if (std::abs(p - q) < eps) {
    a = p;
    c = r;
  } else if (std::abs(q - r) < eps) {
    a = q;
    c = p;
  } else {
    throw UnsupportedShapeError(
        "tmat_exponent supports shapes with two matching exponents");
  }

  double best = a * table.omega_of(c / a);
  // Rebalancing rewrite: T_mat(n^a, n^c, n^a) <= T_mat(n^{a+x}, n^{c-x},
  // n^{a+x}); scan the split grid and keep the cheapest bound.
  const int grid = 256;
  for (int i = 1; i <= grid; ++i) {
    const double x = (c - 1e-9) * static_cast<double>(i) / grid;
    if (x <= 0.0 || c - x <= 0.0) {
      continue;
    }
    best = std::min(best, (a + x) * table.omega_of((c - x) / (a + x)));
  }
  return best;
}

SolverExponents solver_exponent(const OmegaTable& table, double a) {
  if (!(a > 0.0 && a <= 2.0)) {
    throw ValidationError(
        "solver_exponent requires m = n^a with a in (0, 2] (redundant "
        "constraints are removed beyond m = n^2)");
  }
  SolverExponents e;
  e.input_term = 0.5 + a + 2.0;
  e.hessian_inverse_term = 0.5 + a * table.omega();
  e.slack_inverse_term = 0.5 + table.omega();
  e.total = std::max({e.input_term, e.hessian_inverse_term, e.slack_inverse_term});
  e.cutting_plane = std::max(a + (a + 2.0), 3.0 * a);
  return e;
}

std::string exponent_table(const OmegaTable& table) {
  std::ostringstream out;
  out.setf(std::ios::fixed);
  out.precision(3);
  out << "regime   method       exponent of n (upper bound)\n";
  for (double a : {1.0, 2.0}) {
    const SolverExponents e = solver_exponent(table, a);
    const char* regime = a == 1.0 ? "m = n  " : "m = n^2";
    out << regime << "  this solver  <= " << e.total << "\n";
    out << regime << "  cutting plane<= " << e.cutting_plane << "\n";
  }
  return out.str();
}

}  // namespace sdpipm
