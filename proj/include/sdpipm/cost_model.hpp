#pragma once

#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "sdpipm/errors.hpp"

namespace sdpipm {

class UnsupportedShapeError : public std::invalid_argument {
 public:
  explicit UnsupportedShapeError(const std::string& what)
      : std::invalid_argument(what) {}
};

/// Piecewise-convex upper-bound model for the rectangular matrix
/// multiplication exponent omega(k): multiplying n x n^k by n^k x n costs
/// n^{omega(k)+o(1)}. Seeded from published anchor values and closed under
/// convex interpolation, the sublinearity rule omega(p) <= p - q + omega(q),
/// and the constant extension omega(k) <= omega(1) for k <= 1. All outputs
/// are upper bounds.
class OmegaTable {
 public:
  /// The default anchor set.
  OmegaTable();
  explicit OmegaTable(std::vector<std::pair<double, double>> anchors);

  /// Parses whitespace-separated "k omega" pairs.
  static OmegaTable from_stream(std::istream& in);

  double omega_of(double k) const;
  double omega() const { return omega_of(1.0); }
  const std::vector<std::pair<double, double>>& anchors() const {
    return anchors_;
  }

 private:
  void validate() const;
  std::vector<std::pair<double, double>> anchors_;  // ascending in k
};

/// Modeled exponent of n for a T_mat(n^p, n^q, n^r) product. Requires two of
/// the three exponents to match after permutation (the square-times-
/// rectangular shapes the analysis uses); tries the block-rebalancing rewrite
/// T_mat(h, lk, h) -> T_mat(hk, l, hk) and keeps the cheaper bound.
double tmat_exponent(const OmegaTable& table, double p, double q, double r);

struct SolverExponents {
  double input_term = 0.0;        // sqrt(n) * m n^2
  double hessian_inverse_term = 0.0;  // sqrt(n) * m^omega
  double slack_inverse_term = 0.0;    // sqrt(n) * n^omega
  double total = 0.0;
  double cutting_plane = 0.0;     // m * (m n^2) + m^3 comparison row
};

/// Per-term exponents of n for the solver runtime at m = n^a, a in (0, 2].
SolverExponents solver_exponent(const OmegaTable& table, double a);

/// The headline comparison rows at m = n and m = n^2.
std::string exponent_table(const OmegaTable& table);

}  // namespace sdpipm
