#pragma once

#include <cstdint>
#include <optional>

#include "mpkit/matrix.hpp"
#include "mpkit/tolerances.hpp"

namespace mpkit {

// A square matrix Q with Q^2 = Q, checked at construction.
class Idempotent {
 public:
  const ComplexMatrix& matrix() const noexcept { return q_; }
  Index size() const noexcept { return q_.rows(); }
  Index rank() const noexcept { return rank_; }
  // ||Q^2 - Q||_F
  double residual() const noexcept { return residual_; }
  // 1 + ||Q||_F^2, the scale applied to identity-check thresholds.
  double scale() const noexcept { return 1.0 + q_.squaredNorm(); }

  // Q is Hermitian as well as idempotent.
  bool is_projection(const Tolerances& tol = {}) const;

 private:
  friend Idempotent validate_idempotent(ComplexMatrix q, const Tolerances& tol);
  Idempotent(ComplexMatrix q, Index rank, double residual)
      : q_(std::move(q)), rank_(rank), residual_(residual) {}

  ComplexMatrix q_;
  Index rank_;
  double residual_;
};

// Q = basis * [[I_r, A], [0, 0]] * basis*. The first r basis columns span
// R(Q), the remaining n - r span N(Q*).
struct BlockForm {
  ComplexMatrix corner;  // A, r x (n - r); either dimension may be zero
  ComplexMatrix basis;   // unitary, n x n

  Index rank() const noexcept { return corner.rows(); }
  Index size() const noexcept { return corner.rows() + corner.cols(); }
  ComplexMatrix reconstruct() const;
};

struct BlockIdempotent {
  Idempotent idempotent;
  BlockForm block;
};

// Throws std::invalid_argument for non-square or non-finite input and
// NotIdempotent when ||Q^2 - Q||_F > tol.id * (1 + ||Q||_F^2).
Idempotent validate_idempotent(ComplexMatrix q, const Tolerances& tol = {});

// Builds basis * [[I, A], [0, 0]] * basis*; basis defaults to the identity.
// Throws BasisNotUnitary.
BlockIdempotent make_idempotent_block(const ComplexMatrix& corner,
                                      const std::optional<ComplexMatrix>& basis = std::nullopt,
                                      const Tolerances& tol = {});

// Orthogonal projection onto R(Q). The nonzero singular values of an
// idempotent are >= 1, so a pivoted QR with the trace rank separates the
// range cleanly.
ComplexMatrix range_projection(const Idempotent& q);

// Recovers the block form with H1 = R(Q), H2 = N(Q*). The corner is unique
// up to unitaries acting on H1 and H2. Throws DecompositionFailed.
BlockForm extract_block_form(const Idempotent& q, const Tolerances& tol = {});

// Corner block is complex Gaussian rescaled to operator norm `skew`, basis
// is Haar-random. Deterministic per seed.
BlockIdempotent random_idempotent(Index n, Index rank, double skew, std::uint64_t seed,
                                  const Tolerances& tol = {});

// Q_t = (1 - t) P_R(Q) + t Q, an idempotent for every t in [0, 1].
Idempotent homotopy_point(const Idempotent& q, double t, const Tolerances& tol = {});

}  // namespace mpkit
