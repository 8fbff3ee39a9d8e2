#include "sdpipm/slack_update.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

namespace sdpipm {

SymMatrix compute_Z(const SymMatrix& s_ref, const SymMatrix& s_tilde) {
  if (s_ref.dim() != s_tilde.dim()) {
    throw DimensionError("compute_Z: dimension mismatch");
  }
  const Eigen::MatrixXd inv_sqrt =
      matrix_function(spectral_decompose(s_ref), MatrixFunction::InvSqrt,
                      s_ref.dim());
  Eigen::MatrixXd z = inv_sqrt * s_tilde.mat() * inv_sqrt;
  z.diagonal().array() -= 1.0;
  return SymMatrix(std::move(z));
}

SlackUpdateResult approx_slack_update(const SymMatrix& s_new,
                                      const SymMatrix& s_tilde, double eps_s) {
  return approx_slack_update(s_new, spectral_decompose(s_new), s_tilde, eps_s);
}

SlackUpdateResult approx_slack_update(const SymMatrix& s_new,
                                      const SpectralDecomp& s_new_decomp,
                                      const SymMatrix& s_tilde, double eps_s) {
  if (!(eps_s > 0.0 && eps_s <= 0.01)) {
    throw ValidationError("approx_slack_update: eps_s must lie in (0, 0.01]");
  }
  const Eigen::Index n = s_new.dim();
  const Eigen::MatrixXd s_new_inv_sqrt =
      matrix_function(s_new_decomp, MatrixFunction::InvSqrt, n);

  Eigen::MatrixXd z_mid = s_new_inv_sqrt * s_tilde.mat() * s_new_inv_sqrt;
  z_mid.diagonal().array() -= 1.0;
  const SpectralDecomp z_decomp = spectral_decompose(SymMatrix(std::move(z_mid)));
  const Eigen::VectorXd& lambda = z_decomp.eigenvalues;

  // pi: indices sorted by |lambda| descending, ties by ascending index.
  std::vector<Eigen::Index> pi(static_cast<std::size_t>(n));
  std::iota(pi.begin(), pi.end(), Eigen::Index{0});
  std::stable_sort(pi.begin(), pi.end(), [&](Eigen::Index a, Eigen::Index b) {
    return std::abs(lambda(a)) > std::abs(lambda(b));
  });

  SlackUpdateResult result;
  result.Z_mid_abs_eigs.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    result.Z_mid_abs_eigs(i) = std::abs(lambda(pi[static_cast<std::size_t>(i)]));
  }

  if (result.Z_mid_abs_eigs(0) <= eps_s) {
    result.S_tilde_new = s_tilde;
    result.rank_update = 0;
    result.changed = false;
    result.Z_new_abs_eigs = result.Z_mid_abs_eigs;
    return result;
  }

  // Out-of-range |lambda_{pi(i)}| reads as 0, which falsifies both loop
  // conditions; for n = 1 the (1 - 1/log n) factor never gets evaluated.
  const double log_n = std::log(static_cast<double>(n));
  auto abs_at = [&](Eigen::Index i) {  // 1-based rank in the sorted order
    return i <= n ? result.Z_mid_abs_eigs(i - 1) : 0.0;
  };
  Eigen::Index r = 1;
  while (2 * r <= n && (abs_at(2 * r) > eps_s ||
                        abs_at(2 * r) > (1.0 - 1.0 / log_n) * abs_at(r))) {
    ++r;
  }

  const Eigen::Index zeroed = std::min<Eigen::Index>(2 * r, n);
  result.rank_update = zeroed;
  result.changed = true;

  // S_tilde_new = S_tilde + S_new^{1/2} U diag(lambda_new - lambda) U^T S_new^{1/2};
  // only the zeroed coordinates contribute, with lambda_new = 0 there.
  // Coordinates whose eigenvalue is already zero change nothing and would
  // make the inverse-update diagonal singular, so they are dropped from the
  // factors (the reported rank stays the literal zeroed count).
  const Eigen::MatrixXd s_new_sqrt =
      matrix_function(s_new_decomp, MatrixFunction::Sqrt, n);
  Eigen::MatrixXd basis(n, zeroed);
  Eigen::VectorXd scale(zeroed);
  Eigen::Index used = 0;
  for (Eigen::Index t = 0; t < zeroed; ++t) {
    const Eigen::Index idx = pi[static_cast<std::size_t>(t)];
    if (lambda(idx) == 0.0) {
      continue;
    }
    basis.col(used).noalias() = s_new_sqrt * z_decomp.vectors.col(idx);
    scale(used) = -lambda(idx);
    ++used;
  }
  basis.conservativeResize(n, used);
  scale.conservativeResize(used);
  Eigen::MatrixXd s_tilde_new =
      s_tilde.mat() + basis * scale.asDiagonal() * basis.transpose();
  result.S_tilde_new = SymMatrix(std::move(s_tilde_new));
  result.update_basis = std::move(basis);
  result.update_scale = std::move(scale);

  result.Z_new_abs_eigs = Eigen::VectorXd::Zero(n);
  for (Eigen::Index i = zeroed; i < n; ++i) {
    result.Z_new_abs_eigs(i - zeroed) = result.Z_mid_abs_eigs(i);
  }
  std::sort(result.Z_new_abs_eigs.data(),
            result.Z_new_abs_eigs.data() + result.Z_new_abs_eigs.size(),
            std::greater<double>());
  return result;
}

}  // namespace sdpipm
