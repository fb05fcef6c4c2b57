#pragma once

#include <complex>

#include <Eigen/Dense>

namespace mpkit {

using Index = Eigen::Index;
using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using RealVector = Eigen::VectorXd;

inline ComplexMatrix identity(Index n) { return ComplexMatrix::Identity(n, n); }

// Frobenius norm; zero for empty matrices.
inline double fro_norm(const ComplexMatrix& m) { return m.size() == 0 ? 0.0 : m.norm(); }

// ||T - T*||_F
double asymmetry(const ComplexMatrix& t);

inline ComplexMatrix hermitian_part(const ComplexMatrix& t) {
  return (t + t.adjoint()) / 2.0;
}

bool all_finite(const ComplexMatrix& m);

// ||m^2 - m||_F + ||m - m*||_F
double projection_residual(const ComplexMatrix& m);

// Block-diagonal embedding X -> diag(X, X), a unital *-morphism M_n -> M_2n.
ComplexMatrix block_diag_twice(const ComplexMatrix& x);

}  // namespace mpkit
