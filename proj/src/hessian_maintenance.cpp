#include "sdpipm/hessian_maintenance.hpp"

#include <cmath>

#include "sdpipm/barrier.hpp"

namespace sdpipm {

Eigen::MatrixXd InverseDelta::dense(Eigen::Index n) const {
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(n, n);
  if (V_plus.cols() > 0) {
    d.noalias() += V_plus * V_plus.transpose();
  }
  if (V_minus.cols() > 0) {
    d.noalias() -= V_minus * V_minus.transpose();
  }
  return d;
}

InverseDelta inverse_delta_factors(const Eigen::MatrixXd& s_tilde_old_inv,
                                   const Eigen::MatrixXd& w,
                                   const Eigen::VectorXd& d) {
  const Eigen::Index n = s_tilde_old_inv.rows();
  const Eigen::Index k = w.cols();
  InverseDelta delta;
  delta.V_plus.resize(n, 0);
  delta.V_minus.resize(n, 0);
  if (k == 0) {
    return delta;
  }
  if (w.rows() != n || d.size() != k) {
    throw DimensionError("inverse_delta_factors: factor shapes inconsistent");
  }
  if ((d.array() == 0.0).any()) {
    throw WoodburyError("diagonal factor must be invertible");
  }

  // (A + W D W^T)^{-1} = A^{-1} - M (D^{-1} + W^T M)^{-1} M^T, M = A^{-1} W.
  const Eigen::MatrixXd m_mat = s_tilde_old_inv * w;
  Eigen::MatrixXd inner = w.transpose() * m_mat;
  inner.diagonal() += d.cwiseInverse();
  inner = 0.5 * (inner + inner.transpose()).eval();

  Eigen::FullPivLU<Eigen::MatrixXd> lu(inner);
  if (!lu.isInvertible()) {
    throw WoodburyError(
        "inner system singular; updated matrix not positive definite");
  }
  const Eigen::MatrixXd core = -lu.inverse();  // delta = M core M^T

  // Re-orthogonalize through the k-dimensional core so the sign split has
  // minimal rank: M = Q R gives delta = Q (R core R^T) Q^T.
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(m_mat);
  const Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(n, k);
  const Eigen::MatrixXd r =
      qr.matrixQR().topRows(k).triangularView<Eigen::Upper>();
  const SpectralDecomp small =
      spectral_decompose(SymMatrix(r * core * r.transpose()));

  const double tol =
      1e-14 * std::max(1.0, small.eigenvalues.cwiseAbs().maxCoeff());
  Eigen::Index n_plus = 0;
  Eigen::Index n_minus = 0;
  for (Eigen::Index i = 0; i < k; ++i) {
    if (small.eigenvalues(i) > tol) ++n_plus;
    if (small.eigenvalues(i) < -tol) ++n_minus;
  }
  delta.V_plus.resize(n, n_plus);
  delta.V_minus.resize(n, n_minus);
  Eigen::Index ip = 0;
  Eigen::Index im = 0;
  for (Eigen::Index i = 0; i < k; ++i) {
    const double lam = small.eigenvalues(i);
    if (lam > tol) {
      delta.V_plus.col(ip++) = std::sqrt(lam) * (q * small.vectors.col(i));
    } else if (lam < -tol) {
      delta.V_minus.col(im++) = std::sqrt(-lam) * (q * small.vectors.col(i));
    }
  }
  return delta;
}

namespace {

// Frobenius inner products of the per-constraint blocks of two stacked
// (m*n) x r matrices, as an m x m matrix.
Eigen::MatrixXd block_gram(const Eigen::MatrixXd& left,
                           const Eigen::MatrixXd& right, Eigen::Index m,
                           Eigen::Index rows_per_block) {
  Eigen::MatrixXd g(m, m);
  for (Eigen::Index j = 0; j < m; ++j) {
    for (Eigen::Index k = 0; k < m; ++k) {
      g(j, k) = left.middleRows(j * rows_per_block, rows_per_block)
                    .cwiseProduct(
                        right.middleRows(k * rows_per_block, rows_per_block))
                    .sum();
    }
  }
  return g;
}

}  // namespace

Eigen::MatrixXd hessian_low_rank_update(const Eigen::MatrixXd& h_tilde,
                                        const SdpInstance& inst,
                                        const Eigen::MatrixXd& s_tilde_old_inv,
                                        const InverseDelta& delta,
                                        HessianUpdateCounters* counters) {
  if (delta.empty()) {
    return h_tilde;
  }
  const Eigen::Index n = inst.n;
  const Eigen::Index m = inst.m;

  Eigen::MatrixXd correction = Eigen::MatrixXd::Zero(m, m);
  std::vector<Eigen::MatrixXd> av(2);      // stacked A_j V_s, (m n) x r_s
  std::vector<Eigen::MatrixXd> pav(2);     // stacked P A_j V_s
  const Eigen::MatrixXd* v_parts[2] = {&delta.V_plus, &delta.V_minus};
  const double signs[2] = {1.0, -1.0};

  for (int s = 0; s < 2; ++s) {
    const Eigen::MatrixXd& v = *v_parts[s];
    const Eigen::Index r = v.cols();
    av[s].resize(m * n, r);
    pav[s].resize(m * n, r);
    for (Eigen::Index j = 0; j < m; ++j) {
      av[s].middleRows(j * n, n).noalias() =
          inst.A[static_cast<std::size_t>(j)].mat() * v;
      pav[s].middleRows(j * n, n).noalias() =
          s_tilde_old_inv * av[s].middleRows(j * n, n);
    }
    if (counters != nullptr) {
      counters->stacked_av_cols += static_cast<long>(m) * r;
      counters->nn_mults += 2 * m * (r > 0 ? 1 : 0);
    }
  }

  // G[j,k] = tr[P A_j D A_k] = sum_s s <A_k V_s, P A_j V_s>.
  for (int s = 0; s < 2; ++s) {
    if (v_parts[s]->cols() == 0) continue;
    const Eigen::MatrixXd g = block_gram(pav[s], av[s], m, n);
    correction += signs[s] * (g + g.transpose());
    if (counters != nullptr) {
      counters->gram_rows += m;
    }
  }

  // K[j,k] = tr[D A_j D A_k] = sum_{a,b} s_a s_b <V_a^T A_j V_b, V_a^T A_k V_b>.
  for (int a = 0; a < 2; ++a) {
    const Eigen::Index ra = v_parts[a]->cols();
    if (ra == 0) continue;
    for (int b = 0; b < 2; ++b) {
      const Eigen::Index rb = v_parts[b]->cols();
      if (rb == 0) continue;
      Eigen::MatrixXd small(m * ra, rb);
      for (Eigen::Index j = 0; j < m; ++j) {
        small.middleRows(j * ra, ra).noalias() =
            v_parts[a]->transpose() * av[b].middleRows(j * n, n);
      }
      correction += signs[a] * signs[b] * block_gram(small, small, m, ra);
      if (counters != nullptr) {
        counters->gram_rows += m;
      }
    }
  }

  Eigen::MatrixXd h_new = h_tilde + correction;
  return 0.5 * (h_new + h_new.transpose());
}

HessianState::HessianState(const SdpInstance& inst, const SymMatrix& s_tilde,
                           int refresh_interval)
    : inst_(inst), refresh_interval_(refresh_interval) {
  refresh(s_tilde);
}

void HessianState::refresh(const SymMatrix& s_tilde) {
  const SpectralDecomp decomp = spectral_decompose(s_tilde);
  s_tilde_inv_ = matrix_function(decomp, MatrixFunction::Inverse, s_tilde.dim());
  h_tilde_ = hessian_full(
      inst_, matrix_function(decomp, MatrixFunction::InvSqrt, s_tilde.dim()));
  updates_since_refresh_ = 0;
}

Eigen::Index HessianState::apply_update(const SlackUpdateResult& update) {
  if (!update.changed) {
    return 0;
  }
  if (updates_since_refresh_ + 1 >= refresh_interval_) {
    refresh(update.S_tilde_new);
    return 0;
  }
  const InverseDelta delta = inverse_delta_factors(
      s_tilde_inv_, update.update_basis, update.update_scale);
  h_tilde_ =
      hessian_low_rank_update(h_tilde_, inst_, s_tilde_inv_, delta, &counters_);
  s_tilde_inv_ += delta.dense(inst_.n);
  s_tilde_inv_ = 0.5 * (s_tilde_inv_ + s_tilde_inv_.transpose()).eval();
  ++updates_since_refresh_;
  return delta.rank();
}

}  // namespace sdpipm
