#include "mpkit/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include "mpkit/errors.hpp"

namespace mpkit {

namespace {

// BDCSVD in Eigen 3.4.0 returns wrong singular values for some complex inputs.
using Svd = Eigen::JacobiSVD<ComplexMatrix>;

void require_square(const ComplexMatrix& t, const char* who) {
  if (t.rows() != t.cols())
    throw std::invalid_argument(std::string(who) + ": matrix is not square");
}

double max_abs(const RealVector& v) { return v.size() == 0 ? 0.0 : v.cwiseAbs().maxCoeff(); }

// For an exactly Hermitian matrix the singular values are |eigenvalues|, so
// the rank-revealing kernels can use the much cheaper Hermitian eigensolver.
bool exactly_hermitian(const ComplexMatrix& t) {
  return t.rows() == t.cols() && t == t.adjoint();
}

// Indices of eigenvalues with |lambda| above the relative pinv cutoff.
std::vector<Index> significant(const RealVector& values, const Tolerances& tol, Index n) {
  std::vector<Index> keep;
  const double top = max_abs(values);
  if (top == 0.0) return keep;
  const double cutoff = tol.pinv_cutoff(n, n) * top;
  for (Index i = 0; i < values.size(); ++i)
    if (std::abs(values(i)) > cutoff) keep.push_back(i);
  return keep;
}

ComplexMatrix select_columns(const ComplexMatrix& m, const std::vector<Index>& cols) {
  ComplexMatrix out(m.rows(), static_cast<Index>(cols.size()));
  for (std::size_t k = 0; k < cols.size(); ++k) out.col(static_cast<Index>(k)) = m.col(cols[k]);
  return out;
}

}  // namespace

ComplexMatrix HermitianEigen::compose(const RealVector& mapped) const {
  ComplexMatrix out = vectors * mapped.cast<Complex>().asDiagonal() * vectors.adjoint();
  return hermitian_part(out);
}

HermitianEigen hermitian_eigen(const ComplexMatrix& t, const Tolerances& tol) {
  require_square(t, "hermitian_eigen");
  if (!all_finite(t)) throw std::invalid_argument("hermitian_eigen: non-finite entries");
  if (t.size() == 0) return {RealVector(0), ComplexMatrix(0, 0)};

  const double asym = asymmetry(t);
  if (asym > tol.id * fro_norm(t)) throw NotHermitian(asym);

  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(hermitian_part(t));
  if (solver.info() != Eigen::Success)
    throw NoConvergence("hermitian_eigen: eigensolver did not converge");
  return {solver.eigenvalues(), solver.eigenvectors()};
}

ComplexMatrix abs_op(const ComplexMatrix& t, const Tolerances& tol) {
  const Index rows = t.rows();
  const Index cols = t.cols();
  if (cols == 0) return ComplexMatrix(0, 0);
  if (!all_finite(t)) throw std::invalid_argument("abs_op: matrix has non-finite entries");
  if (exactly_hermitian(t)) {
    const HermitianEigen eig = hermitian_eigen(t, tol);
    const double cutoff = tol.clip * max_abs(eig.values);
    RealVector mags = eig.values.unaryExpr(
        [cutoff](double x) { return std::abs(x) <= cutoff ? 0.0 : std::abs(x); });
    return eig.compose(mags);
  }

  // Eigenpairs of the dilation with lambda = sigma > 0 are [u; v] / sqrt2, so
  // |T| = sum 2 sigma y y* over the bottom halves y.
  ComplexMatrix h = ComplexMatrix::Zero(rows + cols, rows + cols);
  h.topRightCorner(rows, cols) = t;
  h.bottomLeftCorner(cols, rows) = t.adjoint();
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(h);
  if (solver.info() != Eigen::Success) throw NoConvergence("abs_op: eigensolver did not converge");
  const RealVector& values = solver.eigenvalues();
  const double cutoff = tol.clip * max_abs(values);
  Index first = 0;
  while (first < values.size() && values(first) <= cutoff) ++first;
  const Index kept = values.size() - first;
  const ComplexMatrix y = solver.eigenvectors().bottomRightCorner(cols, kept);
  const RealVector weights = 2.0 * values.tail(kept);
  return hermitian_part(y * weights.cast<Complex>().asDiagonal() * y.adjoint());
}

ComplexMatrix sqrt_psd(const ComplexMatrix& t, const Tolerances& tol) {
  const HermitianEigen eig = hermitian_eigen(t, tol);
  if (eig.values.size() == 0) return ComplexMatrix(0, 0);
  const double bound = tol.clip * max_abs(eig.values);
  const double lowest = eig.values(0);
  if (lowest < -bound) throw NotPsd(lowest, bound);
  RealVector roots = eig.values.unaryExpr([](double x) { return std::sqrt(std::max(x, 0.0)); });
  return eig.compose(roots);
}

ComplexMatrix positive_part(const ComplexMatrix& t, const Tolerances& tol) {
  return spectral_apply(t, [](double x) { return std::max(x, 0.0); }, tol);
}

ComplexMatrix pinv(const ComplexMatrix& t, const Tolerances& tol) {
  ComplexMatrix out = ComplexMatrix::Zero(t.cols(), t.rows());
  if (t.size() == 0) return out;
  if (exactly_hermitian(t)) {
    const HermitianEigen eig = hermitian_eigen(t, tol);
    const auto keep = significant(eig.values, tol, t.rows());
    if (keep.empty()) return out;
    RealVector inv(static_cast<Index>(keep.size()));
    for (std::size_t k = 0; k < keep.size(); ++k) inv(static_cast<Index>(k)) = 1.0 / eig.values(keep[k]);
    const ComplexMatrix v = select_columns(eig.vectors, keep);
    return hermitian_part(v * inv.cast<Complex>().asDiagonal() * v.adjoint());
  }
  Svd svd(t, Eigen::ComputeThinU | Eigen::ComputeThinV);
  if (svd.info() != Eigen::Success) throw NoConvergence("pinv: SVD did not converge");
  const RealVector& sigma = svd.singularValues();
  if (sigma.size() == 0 || sigma(0) == 0.0) return out;
  const double cutoff = tol.pinv_cutoff(t.rows(), t.cols()) * sigma(0);
  Index kept = 0;
  while (kept < sigma.size() && sigma(kept) > cutoff) ++kept;
  const RealVector inv = sigma.head(kept).cwiseInverse();
  out = svd.matrixV().leftCols(kept) * inv.cast<Complex>().asDiagonal() *
        svd.matrixU().leftCols(kept).adjoint();
  return out;
}

double op_norm(const ComplexMatrix& t) {
  if (t.size() == 0) return 0.0;
  if (exactly_hermitian(t)) {
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(t, Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success) throw NoConvergence("op_norm: eigensolver did not converge");
    return max_abs(solver.eigenvalues());
  }
  // The top eigenvalue of the Gram matrix carries full relative accuracy.
  const ComplexMatrix gram = t.cols() <= t.rows() ? ComplexMatrix(t.adjoint() * t)
                                                   : ComplexMatrix(t * t.adjoint());
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(gram, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) throw NoConvergence("op_norm: eigensolver did not converge");
  return std::sqrt(std::max(0.0, solver.eigenvalues().maxCoeff()));
}

Index numerical_rank(const ComplexMatrix& t, const Tolerances& tol) {
  if (t.size() == 0) return 0;
  if (exactly_hermitian(t)) {
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(t, Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success)
      throw NoConvergence("numerical_rank: eigensolver did not converge");
    return static_cast<Index>(significant(solver.eigenvalues(), tol, t.rows()).size());
  }
  Svd svd(t);
  if (svd.info() != Eigen::Success) throw NoConvergence("numerical_rank: SVD did not converge");
  const RealVector& sigma = svd.singularValues();
  if (sigma.size() == 0 || sigma(0) == 0.0) return 0;
  const double cutoff = tol.pinv_cutoff(t.rows(), t.cols()) * sigma(0);
  return (sigma.array() > cutoff).count();
}

ComplexMatrix range_projection(const ComplexMatrix& t, const Tolerances& tol) {
  ComplexMatrix out = ComplexMatrix::Zero(t.rows(), t.rows());
  if (t.size() == 0) return out;
  if (exactly_hermitian(t)) {
    const HermitianEigen eig = hermitian_eigen(t, tol);
    const ComplexMatrix basis = select_columns(eig.vectors, significant(eig.values, tol, t.rows()));
    return hermitian_part(basis * basis.adjoint());
  }
  Svd svd(t, Eigen::ComputeThinU);
  if (svd.info() != Eigen::Success)
    throw NoConvergence("range_projection: SVD did not converge");
  const RealVector& sigma = svd.singularValues();
  if (sigma.size() == 0 || sigma(0) == 0.0) return out;
  const double cutoff = tol.pinv_cutoff(t.rows(), t.cols()) * sigma(0);
  const Index r = (sigma.array() > cutoff).count();
  const auto basis = svd.matrixU().leftCols(r);
  out = basis * basis.adjoint();
  return hermitian_part(out);
}

double min_eigenvalue(const ComplexMatrix& t, const Tolerances& tol) {
  const HermitianEigen eig = hermitian_eigen(t, tol);
  return eig.values.size() == 0 ? std::numeric_limits<double>::infinity() : eig.values(0);
}

}  // namespace mpkit
