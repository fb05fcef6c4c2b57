#include "mpkit/idempotent.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <Eigen/QR>

#include "mpkit/errors.hpp"
#include "mpkit/random.hpp"
#include "mpkit/spectral.hpp"

namespace mpkit {

bool Idempotent::is_projection(const Tolerances& tol) const {
  return asymmetry(q_) <= tol.identity_threshold(q_.squaredNorm());
}

ComplexMatrix BlockForm::reconstruct() const {
  const Index r = rank();
  const Index n = size();
  ComplexMatrix inner = ComplexMatrix::Zero(n, n);
  inner.topLeftCorner(r, r).setIdentity();
  inner.topRightCorner(r, n - r) = corner;
  return basis * inner * basis.adjoint();
}

Idempotent validate_idempotent(ComplexMatrix q, const Tolerances& tol) {
  if (q.rows() != q.cols()) throw std::invalid_argument("validate_idempotent: matrix is not square");
  if (q.rows() == 0) throw std::invalid_argument("validate_idempotent: empty matrix");
  if (!all_finite(q)) throw std::invalid_argument("validate_idempotent: non-finite entries");

  const double residual = fro_norm(q * q - q);
  const double threshold = tol.identity_threshold(q.squaredNorm());
  if (!(residual <= threshold)) throw NotIdempotent(residual, threshold);

  // rank(Q) = tr(Q) for an idempotent; the trace is exact up to rounding
  // and avoids an SVD per validation.
  const double trace = q.trace().real();
  const Index rank = std::clamp<Index>(static_cast<Index>(std::llround(trace)), 0, q.rows());
  return Idempotent(std::move(q), rank, residual);
}

BlockIdempotent make_idempotent_block(const ComplexMatrix& corner,
                                      const std::optional<ComplexMatrix>& basis,
                                      const Tolerances& tol) {
  const Index n = corner.rows() + corner.cols();
  if (n == 0) throw std::invalid_argument("make_idempotent_block: corner gives a 0x0 idempotent");
  if (!all_finite(corner)) throw std::invalid_argument("make_idempotent_block: non-finite corner");

  BlockForm bf{corner, identity(n)};
  if (basis) {
    if (basis->rows() != n || basis->cols() != n)
      throw std::invalid_argument("make_idempotent_block: basis size does not match corner");
    const double unitary_residual = fro_norm(basis->adjoint() * *basis - identity(n));
    if (!(unitary_residual <= tol.id)) throw BasisNotUnitary(unitary_residual);
    bf.basis = *basis;
  }
  Idempotent q = validate_idempotent(bf.reconstruct(), tol);
  return {std::move(q), std::move(bf)};
}

namespace {

// Unitary whose first r columns span R(Q) and the rest N(Q*).
ComplexMatrix range_basis(const Idempotent& q) {
  const Eigen::ColPivHouseholderQR<ComplexMatrix> qr(q.matrix());
  return qr.householderQ();
}

}  // namespace

ComplexMatrix range_projection(const Idempotent& q) {
  const ComplexMatrix range = range_basis(q).leftCols(q.rank());
  return hermitian_part(range * range.adjoint());
}

BlockForm extract_block_form(const Idempotent& q, const Tolerances& tol) {
  const ComplexMatrix& mat = q.matrix();
  const Index n = q.size();
  const Index r = q.rank();
  ComplexMatrix basis = range_basis(q);

  BlockForm bf{basis.leftCols(r).adjoint() * mat * basis.rightCols(n - r), std::move(basis)};
  const double residual = fro_norm(bf.reconstruct() - mat);
  const double threshold = tol.identity_threshold(mat.squaredNorm());
  if (!(residual <= threshold)) throw DecompositionFailed(residual, threshold);
  return bf;
}

BlockIdempotent random_idempotent(Index n, Index rank, double skew, std::uint64_t seed,
                                  const Tolerances& tol) {
  if (n < 1) throw std::invalid_argument("random_idempotent: n must be at least 1");
  if (rank < 0 || rank > n) throw std::invalid_argument("random_idempotent: rank outside [0, n]");
  if (!(skew >= 0.0) || !std::isfinite(skew))
    throw std::invalid_argument("random_idempotent: skew must be finite and non-negative");

  Rng rng(seed);
  ComplexMatrix corner = gaussian_matrix(rank, n - rank, rng);
  if (corner.size() > 0 && skew > 0.0) {
    corner *= skew / op_norm(corner);
  } else {
    corner.setZero();
  }
  const ComplexMatrix basis = random_unitary(n, rng);
  return make_idempotent_block(corner, basis, tol);
}

Idempotent homotopy_point(const Idempotent& q, double t, const Tolerances& tol) {
  if (!(t >= 0.0 && t <= 1.0)) throw std::invalid_argument("homotopy_point: t outside [0, 1]");
  const ComplexMatrix p = range_projection(q);
  return validate_idempotent((1.0 - t) * p + t * q.matrix(), tol);
}

}  // namespace mpkit
