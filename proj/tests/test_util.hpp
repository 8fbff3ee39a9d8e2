#pragma once

#include <random>

#include "sdpipm/model.hpp"

namespace testutil {

inline Eigen::MatrixXd random_symmetric(Eigen::Index n, std::mt19937_64& rng,
                                        double scale = 1.0) {
  std::normal_distribution<double> dist(0.0, scale);
  Eigen::MatrixXd m(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i; j < n; ++j) {
      m(i, j) = dist(rng);
      m(j, i) = m(i, j);
    }
  }
  return m;
}

inline Eigen::MatrixXd random_orthogonal(Eigen::Index n, std::mt19937_64& rng) {
  std::normal_distribution<double> dist(0.0, 1.0);
  Eigen::MatrixXd g(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      g(i, j) = dist(rng);
    }
  }
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
  return qr.householderQ();
}

/// Well-conditioned positive definite matrix with spectrum in [lo, hi].
inline Eigen::MatrixXd random_pd(Eigen::Index n, std::mt19937_64& rng,
                                 double lo = 0.5, double hi = 1.5) {
  std::uniform_real_distribution<double> dist(lo, hi);
  Eigen::VectorXd eigs(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    eigs(i) = dist(rng);
  }
  const Eigen::MatrixXd q = random_orthogonal(n, rng);
  return q * eigs.asDiagonal() * q.transpose();
}

/// Solvable instance with a strictly interior primal point and a valid
/// diameter bound: the first constraint fixes the trace, so R = tr(X0).
inline sdpipm::SdpInstance random_instance(Eigen::Index n, Eigen::Index m,
                                           std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  sdpipm::SdpInstance inst;
  inst.n = n;
  inst.m = m;
  const Eigen::MatrixXd x0 = random_pd(n, rng);
  inst.A.emplace_back(Eigen::MatrixXd::Identity(n, n));
  inst.b.resize(m);
  inst.b(0) = x0.trace();
  for (Eigen::Index i = 1; i < m; ++i) {
    Eigen::MatrixXd a = testutil::random_symmetric(n, rng);
    a /= std::max(1.0, a.norm());
    inst.A.emplace_back(a);
    inst.b(i) = a.cwiseProduct(x0).sum();
  }
  Eigen::MatrixXd c = random_symmetric(n, rng);
  c /= std::max(1.0, c.norm());
  inst.C = sdpipm::SymMatrix(c);
  inst.R = x0.trace();
  inst.L = sdpipm::norms(inst.C).operator_norm;
  if (inst.L <= 0.0) {
    inst.L = 1.0;
  }
  return inst;
}

/// max <C, X> s.t. tr X = 1, X PSD; optimum is the largest eigenvalue of C.
inline sdpipm::SdpInstance maxeig_instance(const Eigen::MatrixXd& c) {
  sdpipm::SdpInstance inst;
  inst.n = c.rows();
  inst.m = 1;
  inst.A.emplace_back(Eigen::MatrixXd::Identity(c.rows(), c.rows()));
  inst.b = Eigen::VectorXd::Ones(1);
  inst.C = sdpipm::SymMatrix(c);
  inst.R = 1.0;
  inst.L = sdpipm::norms(inst.C).operator_norm;
  return inst;
}

}  // namespace testutil
