#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "mpkit/idempotent.hpp"
#include "mpkit/matrix.hpp"
#include "mpkit/tolerances.hpp"

namespace mpkit {

struct CheckResult {
  std::string id;
  double residual = 0.0;
  double threshold = 0.0;
  bool passed = false;
  std::string notes;
};

// Where a verified idempotent came from.
struct InputDescriptor {
  std::string source;  // file path or "generated"
  Index n = 0;
  Index rank = 0;
  std::optional<double> skew;
  std::optional<std::uint64_t> seed;
};

struct VerificationReport {
  InputDescriptor input;
  Tolerances tolerance;
  std::vector<CheckResult> checks;
  bool overall = false;
};

struct CheckInfo {
  std::string_view id;
  std::string_view summary;
};

// Every identity verify_all runs, in report order.
std::span<const CheckInfo> check_registry();

// Eigenvalues of Q + Q* avoid (gap, 2 - gap), gap = tol.id * (1 + ||Q||^2).
CheckResult check_spectral_gap(const Idempotent& q, const Tolerances& tol = {});

// mQm is Hermitian and mQm - m is PSD.
CheckResult check_order_relation(const Idempotent& q, const ComplexMatrix& m,
                                 const Tolerances& tol = {});

// With T = Q + Q*: T_+ >= 2m, m = T_+ T_+^+ = T T_+^+, mT = Tm = T_+.
CheckResult check_tplus_identities(const Idempotent& q, const ComplexMatrix& m,
                                   const Tolerances& tol = {});

// m = 1/2 (Q + Q*) (mQm)^+
CheckResult check_pinv_formula(const Idempotent& q, const ComplexMatrix& m,
                               const Tolerances& tol = {});

// R(m) is inside R(Q + Q*) = R(|Q| + |Q*|), with equality iff Q is a projection.
CheckResult check_range_relations(const Idempotent& q, const ComplexMatrix& m,
                                  const Tolerances& tol = {});

// Samples t -> m(Q_t) on a uniform grid of `steps` + 1 points.
struct HomotopySweep {
  double max_idempotent_residual = 0.0;  // max over t of ||Q_t^2 - Q_t||_F
  double max_projection_residual = 0.0;  // max over t of projection_residual(m(Q_t))
  double start_deviation = 0.0;          // ||m(Q_0) - P_R(Q)||_F
  double end_deviation = 0.0;            // ||m(Q_1) - m(Q)||_F
  double max_step = 0.0;                 // max_i ||m(Q_{t_i+1}) - m(Q_{t_i})||_F
};

// Throws NotIdempotent if some Q_t fails validation.
HomotopySweep homotopy_sweep(const Idempotent& q, int steps, const Tolerances& tol = {});

// Runs every registered check. Never throws for failed identities; those
// are recorded in the report.
VerificationReport verify_all(const Idempotent& q, const Tolerances& tol = {},
                              InputDescriptor input = {},
                              const std::optional<BlockForm>& bf = std::nullopt);

}  // namespace mpkit
