#pragma once

#include "sdpipm/model.hpp"

namespace sdpipm {

/// Slack, gradient, and Hessian of f_eta(y) = eta * b^T y - log det S(y).

/// S(y) = sum_i y_i A_i - C.
SymMatrix slack(const SdpInstance& inst, const Eigen::VectorXd& y);
Eigen::MatrixXd slack_dense(const SdpInstance& inst, const Eigen::VectorXd& y);

/// eta * b^T y - log det S(y); throws NotPositiveDefiniteError outside the cone.
double barrier_value(const SdpInstance& inst, const Eigen::VectorXd& y,
                     double eta);

/// Coordinate j is eta * b_j - tr[S^{-1} A_j]. `s_inv` must be the inverse of
/// the current slack.
Eigen::VectorXd gradient(const SdpInstance& inst, const Eigen::MatrixXd& s_inv,
                         double eta);

/// H = B B^T where row j of B is vec(S^{-1/2} A_j S^{-1/2}); equals the
/// entrywise trace form tr[S^{-1} A_j S^{-1} A_k]. Takes S^{-1/2} (of either
/// the true or the approximate slack).
Eigen::MatrixXd hessian_full(const SdpInstance& inst,
                             const Eigen::MatrixXd& s_inv_sqrt);

/// Entrywise trace formula, the independent route for cross-checking the
/// stacked form.
Eigen::MatrixXd hessian_entrywise(const SdpInstance& inst,
                                  const Eigen::MatrixXd& s_inv);

/// Solves H delta = -g by SPD factorization with iterative refinement.
/// Residual gate: ||H delta + g|| <= 1e-10 ||g|| plus the double-precision
/// evaluation floor of the residual itself. Throws SingularHessianError.
Eigen::VectorXd newton_direction(const Eigen::MatrixXd& hessian,
                                 const Eigen::VectorXd& g);

struct BarrierEval {
  SymMatrix S{Eigen::MatrixXd::Zero(1, 1)};
  SymMatrix S_inv{Eigen::MatrixXd::Zero(1, 1)};
  Eigen::VectorXd gradient;
  Eigen::MatrixXd hessian;
};

/// Evaluates slack, inverse, gradient, and exact Hessian from one spectral
/// decomposition of S(y).
BarrierEval evaluate_barrier(const SdpInstance& inst, const Eigen::VectorXd& y,
                             double eta);

}  // namespace sdpipm
