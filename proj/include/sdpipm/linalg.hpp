#pragma once

#include <Eigen/Dense>

#include "sdpipm/errors.hpp"

namespace sdpipm {

/// Dense symmetric matrix. Construction symmetrizes as (M + M^T)/2, so the
/// stored entries satisfy entries(i,j) == entries(j,i) exactly.
class SymMatrix {
 public:
  explicit SymMatrix(Eigen::MatrixXd m);

  static SymMatrix identity(Eigen::Index dim);
  static SymMatrix zero(Eigen::Index dim);

  Eigen::Index dim() const { return mat_.rows(); }
  const Eigen::MatrixXd& mat() const { return mat_; }
  double operator()(Eigen::Index i, Eigen::Index j) const { return mat_(i, j); }

 private:
  Eigen::MatrixXd mat_;
};

/// Eigenvalues in ascending order; columns of `vectors` are the matching
/// orthonormal eigenvectors.
struct SpectralDecomp {
  Eigen::VectorXd eigenvalues;
  Eigen::MatrixXd vectors;

  Eigen::MatrixXd reconstruct() const {
    return vectors * eigenvalues.asDiagonal() * vectors.transpose();
  }
  /// U * f(lambda) * U^T for an entrywise function of the spectrum.
  template <typename F>
  Eigen::MatrixXd apply(F&& f) const {
    Eigen::VectorXd mapped = eigenvalues.unaryExpr(std::forward<F>(f));
    return vectors * mapped.asDiagonal() * vectors.transpose();
  }
};

SpectralDecomp spectral_decompose(const SymMatrix& m);
SpectralDecomp spectral_decompose(const Eigen::MatrixXd& m);

enum class MatrixFunction { Identity, Inverse, Sqrt, InvSqrt };

/// Spectral matrix function U f(Lambda) U^T. Inverse-type functions require
/// the spectrum to clear a relative floor of 1e-12; below it the matrix is
/// treated as numerically outside the cone and NotPositiveDefiniteError is
/// thrown. Sqrt clamps eigenvalues in [-floor, 0] to zero.
SymMatrix matrix_function(const SymMatrix& m, MatrixFunction f);
Eigen::MatrixXd matrix_function(const SpectralDecomp& decomp, MatrixFunction f,
                                Eigen::Index dim);

double trace_product(const SymMatrix& a, const SymMatrix& b);
double trace_product(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b);

struct Norms {
  double frobenius;
  double operator_norm;
};

Norms norms(const SymMatrix& m);

/// Relative eigenvalue floor used by inverse-type matrix functions.
double eigenvalue_floor(const Eigen::VectorXd& eigenvalues);

}  // namespace sdpipm
