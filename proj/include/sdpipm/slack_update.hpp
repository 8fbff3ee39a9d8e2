#pragma once

#include "sdpipm/linalg.hpp"

namespace sdpipm {

/// Result of one approximate-slack update. `rank_update` is the literal count
/// of zeroed eigenvalues of Z_mid (2r in the selection loop's notation, capped
/// at n). When `changed`, the update is S_tilde_new - S_tilde_old =
/// update_basis * update_scale * update_basis^T, a symmetric rank-
/// `update_basis.cols()` correction feeding the inverse maintenance.
struct SlackUpdateResult {
  SymMatrix S_tilde_new{Eigen::MatrixXd::Zero(1, 1)};
  Eigen::Index rank_update = 0;
  Eigen::VectorXd Z_mid_abs_eigs;  // |eigenvalues| of Z_mid, descending
  bool changed = false;

  Eigen::MatrixXd update_basis;    // n x k
  Eigen::VectorXd update_scale;    // k diagonal entries
  Eigen::VectorXd Z_new_abs_eigs;  // |eigenvalues| of Z_new, descending
};

/// Z = S_ref^{-1/2} * S_tilde * S_ref^{-1/2} - I.
SymMatrix compute_Z(const SymMatrix& s_ref, const SymMatrix& s_tilde);

/// Zeroes the dominant eigenvalues of Z_mid so that
/// ||S_new^{-1/2} S_tilde_new S_new^{-1/2} - I||_op <= eps_s while keeping the
/// change to S_tilde low-rank. The selection loop grows r while
/// |lambda_{pi(2r)}| > eps_s or |lambda_{pi(2r)}| > (1 - 1/log n)|lambda_{pi(r)}|,
/// with out-of-range indices treated as zero (so 2r > n stops the loop and
/// zeroes everything). Natural logarithm throughout.
SlackUpdateResult approx_slack_update(const SymMatrix& s_new,
                                      const SymMatrix& s_tilde, double eps_s);

/// Overload reusing an existing spectral decomposition of s_new.
SlackUpdateResult approx_slack_update(const SymMatrix& s_new,
                                      const SpectralDecomp& s_new_decomp,
                                      const SymMatrix& s_tilde, double eps_s);

}  // namespace sdpipm
