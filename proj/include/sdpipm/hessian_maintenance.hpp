#pragma once

#include "sdpipm/model.hpp"
#include "sdpipm/slack_update.hpp"

namespace sdpipm {

/// Sign-split factors of the inverse change:
/// S_tilde_new^{-1} - S_tilde_old^{-1} = V_plus V_plus^T - V_minus V_minus^T.
struct InverseDelta {
  Eigen::MatrixXd V_plus;   // n x r_plus
  Eigen::MatrixXd V_minus;  // n x r_minus

  Eigen::Index rank() const { return V_plus.cols() + V_minus.cols(); }
  bool empty() const { return rank() == 0; }
  Eigen::MatrixXd dense(Eigen::Index n) const;
};

/// Applies the rank-k inverse identity to S_tilde_old + W D W^T and splits the
/// resulting symmetric correction by eigenvalue sign. The correction is run
/// through one k-dimensional eigendecomposition first, so r_plus + r_minus is
/// the numerical rank of the change. Throws WoodburyError when the inner
/// k x k system is singular (S_tilde_new not positive definite).
InverseDelta inverse_delta_factors(const Eigen::MatrixXd& s_tilde_old_inv,
                                   const Eigen::MatrixXd& w,
                                   const Eigen::VectorXd& d);

struct HessianUpdateCounters {
  long stacked_av_cols = 0;   // total columns of the A_j V products
  long nn_mults = 0;          // n x n matrix multiplies
  long gram_rows = 0;         // rows entering the m x m Gram products
};

/// H_new[j,k] = tr[S_new^{-1} A_j S_new^{-1} A_k] via the expansion
/// (P + D) A_j (P + D) with P = S_tilde_old^{-1} and D the sign-split
/// correction: H_new = H + G + G^T + K, G[j,k] = tr[P A_j D A_k],
/// K[j,k] = tr[D A_j D A_k], assembled from the stacked A_j V products.
Eigen::MatrixXd hessian_low_rank_update(const Eigen::MatrixXd& h_tilde,
                                        const SdpInstance& inst,
                                        const Eigen::MatrixXd& s_tilde_old_inv,
                                        const InverseDelta& delta,
                                        HessianUpdateCounters* counters = nullptr);

/// Owns the maintained pair (S_tilde^{-1}, H_tilde) across a solve. Applies
/// low-rank updates and recomputes from scratch every `refresh_interval`
/// updates to bound drift.
class HessianState {
 public:
  HessianState(const SdpInstance& inst, const SymMatrix& s_tilde,
               int refresh_interval);

  /// Applies one slack update; returns the rank r_plus + r_minus actually
  /// used (0 when the update was a refresh or a no-op).
  Eigen::Index apply_update(const SlackUpdateResult& update);

  void refresh(const SymMatrix& s_tilde);

  const Eigen::MatrixXd& hessian() const { return h_tilde_; }
  const Eigen::MatrixXd& s_tilde_inv() const { return s_tilde_inv_; }
  const HessianUpdateCounters& counters() const { return counters_; }
  int updates_since_refresh() const { return updates_since_refresh_; }

 private:
  const SdpInstance& inst_;
  Eigen::MatrixXd s_tilde_inv_;
  Eigen::MatrixXd h_tilde_;
  int refresh_interval_;
  int updates_since_refresh_ = 0;
  HessianUpdateCounters counters_;
};

}  // namespace sdpipm
