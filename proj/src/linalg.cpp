#include "sdpipm/linalg.hpp"

#include <cmath>
#include <sstream>

namespace sdpipm {

SymMatrix::SymMatrix(Eigen::MatrixXd m) {
  if (m.rows() != m.cols() || m.rows() < 1) {
    std::ostringstream msg;
    msg << "SymMatrix requires a square matrix with dim >= 1, got " << m.rows()
        << "x" << m.cols();
    throw DimensionError(msg.str());
  }
  mat_ = 0.5 * (m + m.transpose()).eval();
}

SymMatrix SymMatrix::identity(Eigen::Index dim) {
  return SymMatrix(Eigen::MatrixXd::Identity(dim, dim));
}

SymMatrix SymMatrix::zero(Eigen::Index dim) {
  return SymMatrix(Eigen::MatrixXd::Zero(dim, dim));
}

SpectralDecomp spectral_decompose(const Eigen::MatrixXd& m) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(m);
  if (solver.info() != Eigen::Success) {
    std::ostringstream msg;
    msg << "symmetric eigensolver failed to converge (dim " << m.rows()
        << ", max |entry| " << m.cwiseAbs().maxCoeff() << ", frobenius "
        << m.norm() << ")";
    throw std::runtime_error(msg.str());
  }
  return SpectralDecomp{solver.eigenvalues(), solver.eigenvectors()};
}

SpectralDecomp spectral_decompose(const SymMatrix& m) {
  return spectral_decompose(m.mat());
}

double eigenvalue_floor(const Eigen::VectorXd& eigenvalues) {
  return 1e-12 * std::max(1.0, eigenvalues.cwiseAbs().maxCoeff());
}

Eigen::MatrixXd matrix_function(const SpectralDecomp& decomp, MatrixFunction f,
                                Eigen::Index dim) {
  const double floor = eigenvalue_floor(decomp.eigenvalues);
  const double min_eig = decomp.eigenvalues.minCoeff();
  switch (f) {
    case MatrixFunction::Identity:
      return decomp.reconstruct();
    case MatrixFunction::Inverse:
    case MatrixFunction::InvSqrt:
      if (min_eig <= floor) {
        std::ostringstream msg;
        msg << "matrix not positive definite: min eigenvalue " << min_eig
            << " below floor " << floor << " (dim " << dim << ")";
        throw NotPositiveDefiniteError(msg.str());
      }
      if (f == MatrixFunction::Inverse) {
        return decomp.apply([](double x) { return 1.0 / x; });
      }
      return decomp.apply([](double x) { return 1.0 / std::sqrt(x); });
    case MatrixFunction::Sqrt:
      if (min_eig < -floor) {
        std::ostringstream msg;
        msg << "matrix square root of indefinite matrix: min eigenvalue "
            << min_eig << " below -" << floor;
        throw NotPositiveDefiniteError(msg.str());
      }
      return decomp.apply([](double x) { return std::sqrt(std::max(x, 0.0)); });
  }
  throw std::logic_error("unreachable matrix function");
}

SymMatrix matrix_function(const SymMatrix& m, MatrixFunction f) {
  const SpectralDecomp decomp = spectral_decompose(m);
  return SymMatrix(matrix_function(decomp, f, m.dim()));
}

double trace_product(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    std::ostringstream msg;
    msg << "trace product dimension mismatch: " << a.rows() << "x" << a.cols()
        << " vs " << b.rows() << "x" << b.cols();
    throw DimensionError(msg.str());
  }
  return a.cwiseProduct(b).sum();
}

double trace_product(const SymMatrix& a, const SymMatrix& b) {
  return trace_product(a.mat(), b.mat());
}

Norms norms(const SymMatrix& m) {
  const SpectralDecomp decomp = spectral_decompose(m);
  return Norms{m.mat().norm(), decomp.eigenvalues.cwiseAbs().maxCoeff()};
}

}  // namespace sdpipm
