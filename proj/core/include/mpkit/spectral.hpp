#pragma once

#include <concepts>
#include <utility>

#include "mpkit/matrix.hpp"
#include "mpkit/tolerances.hpp"

namespace mpkit {

// Eigen-decomposition T = V diag(values) V* of a Hermitian matrix.
// values are ascending; columns of vectors are orthonormal eigenvectors.
struct HermitianEigen {
  RealVector values;
  ComplexMatrix vectors;

  // V diag(mapped) V*, returned exactly Hermitian.
  ComplexMatrix compose(const RealVector& mapped) const;
  ComplexMatrix reconstruct() const { return compose(values); }
};

// Throws NotHermitian when ||T - T*||_F > tol.id * ||T||_F, NoConvergence when
// the solver fails. Input is symmetrized to (T + T*)/2 before solving.
HermitianEigen hermitian_eigen(const ComplexMatrix& t, const Tolerances& tol = {});

// V f(Lambda) V* for Hermitian T and a real scalar function f.
template <std::invocable<double> F>
ComplexMatrix spectral_apply(const ComplexMatrix& t, F&& f, const Tolerances& tol = {}) {
  const HermitianEigen eig = hermitian_eigen(t, tol);
  RealVector mapped = eig.values.unaryExpr([&](double x) { return static_cast<double>(f(x)); });
  return eig.compose(mapped);
}

// |T| = (T*T)^{1/2}, cols x cols. Singular values below tol.clip * sigma_max
// are clipped to zero. Computed from the Hermitian dilation [[0, T], [T*, 0]],
// whose eigenvalues are +-sigma_i to absolute accuracy eps * sigma_max; the
// Gram matrix T*T only resolves sigma_i down to about sqrt(eps) * sigma_max.
ComplexMatrix abs_op(const ComplexMatrix& t, const Tolerances& tol = {});

// Principal PSD square root. Throws NotPsd if an eigenvalue falls below
// -tol.clip * ||T||; smaller negative eigenvalues are treated as zero.
ComplexMatrix sqrt_psd(const ComplexMatrix& t, const Tolerances& tol = {});

// T_+ = spectral_apply(T, t -> max(t, 0)).
ComplexMatrix positive_part(const ComplexMatrix& t, const Tolerances& tol = {});

// Moore-Penrose inverse via SVD; singular values at or below
// tol.pinv_cutoff(rows, cols) * sigma_max are discarded.
ComplexMatrix pinv(const ComplexMatrix& t, const Tolerances& tol = {});

// Largest singular value.
double op_norm(const ComplexMatrix& t);

// Count of singular values above tol.pinv_cutoff(rows, cols) * sigma_max.
Index numerical_rank(const ComplexMatrix& t, const Tolerances& tol = {});

// Orthogonal projection onto the column space of T.
ComplexMatrix range_projection(const ComplexMatrix& t, const Tolerances& tol = {});

// Smallest eigenvalue of a Hermitian matrix (+inf for empty input).
double min_eigenvalue(const ComplexMatrix& t, const Tolerances& tol = {});

}  // namespace mpkit
