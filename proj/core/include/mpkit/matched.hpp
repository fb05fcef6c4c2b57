#pragma once

#include <array>
#include <map>
#include <optional>
#include <string_view>

#include "mpkit/idempotent.hpp"
#include "mpkit/matrix.hpp"
#include "mpkit/tolerances.hpp"

namespace mpkit {

enum class Formula {
  original,         // 1/2 (|Q*| + Q*) |Q*|^+ (|Q*| + I)^-1 (|Q*| + Q)
  simplified_qstar, // (I + |Q*| - |I - Q*|) / 2
  simplified_q,     // (I + |Q| - |I - Q|) / 2
  symmetric,        // (2 + |Q + Q*| - |2 - (Q + Q*)|) / 4
  block,            // closed form in the R(Q) + N(Q*) block basis
};

inline constexpr std::array<Formula, 5> kAllFormulas = {
    Formula::original, Formula::simplified_qstar, Formula::simplified_q, Formula::symmetric,
    Formula::block};

// The formula whose output is reported as m(Q).
inline constexpr Formula kReferenceFormula = Formula::symmetric;

// "original", "qstar", "q", "symmetric", "block".
std::string_view formula_name(Formula f);
std::optional<Formula> parse_formula(std::string_view name);

ComplexMatrix matched_original(const Idempotent& q, const Tolerances& tol = {});
ComplexMatrix matched_simplified_qstar(const Idempotent& q, const Tolerances& tol = {});
ComplexMatrix matched_simplified_q(const Idempotent& q, const Tolerances& tol = {});
ComplexMatrix matched_symmetric(const Idempotent& q, const Tolerances& tol = {});
ComplexMatrix matched_block(const BlockForm& bf, const Tolerances& tol = {});

// Dispatches on f. The block formula uses `bf` when given and otherwise
// extracts the block form from q.
ComplexMatrix matched_by(Formula f, const Idempotent& q, const Tolerances& tol = {},
                         const BlockForm* bf = nullptr);

// |(I - Q)*| assembled from the block form as [X; Y][X; Y]* with
// X = A (I + A*A)^{-1/4}, Y = -(I + A*A)^{-1/4}.
ComplexMatrix abs_conjugate_complement(const BlockForm& bf, const Tolerances& tol = {});

struct MatchedResult {
  ComplexMatrix m;                              // reference formula output
  std::map<Formula, ComplexMatrix> per_formula; // all five
  double max_pairwise_dev = 0.0;                // max Frobenius distance over pairs
  double proj_residual = 0.0;                   // projection_residual(m)
};

// Runs all five formulas. Throws FormulaDisagreement when max_pairwise_dev
// exceeds tol.id * (1 + ||Q||_F^2).
MatchedResult matched(const Idempotent& q, const Tolerances& tol = {},
                      const std::optional<BlockForm>& bf = std::nullopt);

// 2m - I. Throws NotProjection unless m is a projection within
// tol.id * (1 + ||m||_F^2).
ComplexMatrix symmetry_operator(const ComplexMatrix& m, const Tolerances& tol = {});

}  // namespace mpkit
