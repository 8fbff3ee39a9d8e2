#include "sdpipm/barrier.hpp"

#include <cmath>
#include <sstream>

namespace sdpipm {

Eigen::MatrixXd slack_dense(const SdpInstance& inst, const Eigen::VectorXd& y) {
  if (y.size() != inst.m) {
    throw DimensionError("slack: y has wrong length");
  }
  Eigen::MatrixXd s = -inst.C.mat();
  for (Eigen::Index i = 0; i < inst.m; ++i) {
    s.noalias() += y(i) * inst.A[static_cast<std::size_t>(i)].mat();
  }
  return s;
}

SymMatrix slack(const SdpInstance& inst, const Eigen::VectorXd& y) {
  return SymMatrix(slack_dense(inst, y));
}

double barrier_value(const SdpInstance& inst, const Eigen::VectorXd& y,
                     double eta) {
  const SpectralDecomp decomp = spectral_decompose(slack_dense(inst, y));
  const double floor = eigenvalue_floor(decomp.eigenvalues);
  if (decomp.eigenvalues.minCoeff() <= floor) {
    throw NotPositiveDefiniteError("barrier evaluated outside the cone");
  }
  double logdet = 0.0;
  for (Eigen::Index i = 0; i < decomp.eigenvalues.size(); ++i) {
    logdet += std::log(decomp.eigenvalues(i));
  }
  return eta * inst.b.dot(y) - logdet;
}

Eigen::VectorXd gradient(const SdpInstance& inst, const Eigen::MatrixXd& s_inv,
                         double eta) {
  Eigen::VectorXd g(inst.m);
  for (Eigen::Index j = 0; j < inst.m; ++j) {
    g(j) = eta * inst.b(j) -
           trace_product(s_inv, inst.A[static_cast<std::size_t>(j)].mat());
  }
  return g;
}

Eigen::MatrixXd hessian_full(const SdpInstance& inst,
                             const Eigen::MatrixXd& s_inv_sqrt) {
  const Eigen::Index n = s_inv_sqrt.rows();
  Eigen::MatrixXd stacked(n * inst.m, n);
  for (Eigen::Index j = 0; j < inst.m; ++j) {
    stacked.middleRows(j * n, n).noalias() =
        inst.A[static_cast<std::size_t>(j)].mat() * s_inv_sqrt;
  }
  Eigen::MatrixXd b_rows(inst.m, n * n);
  for (Eigen::Index j = 0; j < inst.m; ++j) {
    Eigen::MatrixXd conjugated = s_inv_sqrt * stacked.middleRows(j * n, n);
    b_rows.row(j) = Eigen::Map<const Eigen::VectorXd>(conjugated.data(), n * n);
  }
  Eigen::MatrixXd h = b_rows * b_rows.transpose();
  return 0.5 * (h + h.transpose());
}

Eigen::MatrixXd hessian_entrywise(const SdpInstance& inst,
                                  const Eigen::MatrixXd& s_inv) {
  Eigen::MatrixXd h(inst.m, inst.m);
  std::vector<Eigen::MatrixXd> conj(static_cast<std::size_t>(inst.m));
  for (Eigen::Index j = 0; j < inst.m; ++j) {
    conj[static_cast<std::size_t>(j)] =
        s_inv * inst.A[static_cast<std::size_t>(j)].mat() * s_inv;
  }
  for (Eigen::Index j = 0; j < inst.m; ++j) {
    for (Eigen::Index k = j; k < inst.m; ++k) {
      h(j, k) = trace_product(conj[static_cast<std::size_t>(j)],
                              inst.A[static_cast<std::size_t>(k)].mat());
      h(k, j) = h(j, k);
    }
  }
  return h;
}

Eigen::VectorXd newton_direction(const Eigen::MatrixXd& hessian,
                                 const Eigen::VectorXd& g) {
  if (hessian.rows() != hessian.cols() || hessian.rows() != g.size()) {
    throw DimensionError("newton_direction: dimension mismatch");
  }
  const double g_norm = g.norm();
  if (g_norm == 0.0) {
    return Eigen::VectorXd::Zero(g.size());
  }
  Eigen::LLT<Eigen::MatrixXd> llt(hessian);
  if (llt.info() != Eigen::Success) {
    throw SingularHessianError(
        "Newton system factorization failed: Hessian not numerically positive "
        "definite");
  }
  Eigen::VectorXd delta = llt.solve(-g);
  Eigen::VectorXd residual = hessian * delta + g;
  for (int pass = 0; pass < 4 && residual.norm() > 1e-10 * g_norm; ++pass) {
    delta -= llt.solve(residual);
    residual = hessian * delta + g;
  }
  // Evaluation floor of the residual in doubles; beyond it the gate cannot
  // distinguish a good solve from rounding.
  const double eps = std::numeric_limits<double>::epsilon();
  const double floor =
      4.0 * eps * static_cast<double>(g.size()) * hessian.norm() * delta.norm();
  if (residual.norm() > 1e-10 * g_norm + floor) {
    std::ostringstream msg;
    msg << "Newton system solve residual " << residual.norm() / g_norm
        << " (relative) exceeds gate; Hessian numerically singular";
    throw SingularHessianError(msg.str());
  }
  return delta;
}

BarrierEval evaluate_barrier(const SdpInstance& inst, const Eigen::VectorXd& y,
                             double eta) {
  BarrierEval eval;
  eval.S = slack(inst, y);
  const SpectralDecomp decomp = spectral_decompose(eval.S);
  eval.S_inv =
      SymMatrix(matrix_function(decomp, MatrixFunction::Inverse, eval.S.dim()));
  const Eigen::MatrixXd s_inv_sqrt =
      matrix_function(decomp, MatrixFunction::InvSqrt, eval.S.dim());
  eval.gradient = gradient(inst, eval.S_inv.mat(), eta);
  eval.hessian = hessian_full(inst, s_inv_sqrt);
  return eval;
}

}  // namespace sdpipm
