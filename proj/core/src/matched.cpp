#include "mpkit/matched.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Cholesky>

#include "mpkit/errors.hpp"
#include "mpkit/spectral.hpp"

namespace mpkit {

std::string_view formula_name(Formula f) {
  switch (f) {
    case Formula::original: return "original";
    case Formula::simplified_qstar: return "qstar";
    case Formula::simplified_q: return "q";
    case Formula::symmetric: return "symmetric";
    case Formula::block: return "block";
  }
  return "unknown";
}

std::optional<Formula> parse_formula(std::string_view name) {
  for (Formula f : kAllFormulas)
    if (formula_name(f) == name) return f;
  return std::nullopt;
}

ComplexMatrix matched_original(const Idempotent& q, const Tolerances& tol) {
  const ComplexMatrix& mat = q.matrix();
  const Index n = q.size();
  const ComplexMatrix abs_adj = abs_op(mat.adjoint(), tol);
  // |Q*| + I has spectrum in [1, inf), so a Cholesky solve is safe.
  const ComplexMatrix shifted = abs_adj + identity(n);
  const ComplexMatrix right = shifted.llt().solve(abs_adj + mat);
  return 0.5 * (abs_adj + mat.adjoint()) * pinv(abs_adj, tol) * right;
}

ComplexMatrix matched_simplified_qstar(const Idempotent& q, const Tolerances& tol) {
  const ComplexMatrix& mat = q.matrix();
  const Index n = q.size();
  const ComplexMatrix adj = mat.adjoint();
  return 0.5 * (identity(n) + abs_op(adj, tol) - abs_op(identity(n) - adj, tol));
}

ComplexMatrix matched_simplified_q(const Idempotent& q, const Tolerances& tol) {
  const ComplexMatrix& mat = q.matrix();
  const Index n = q.size();
  return 0.5 * (identity(n) + abs_op(mat, tol) - abs_op(identity(n) - mat, tol));
}

ComplexMatrix matched_symmetric(const Idempotent& q, const Tolerances& tol) {
  const ComplexMatrix& mat = q.matrix();
  // 0 on (-inf, 0], 1 on [2, inf); the spectrum of Q + Q* lives there.
  auto step = [](double t) { return (2.0 + std::abs(t) - std::abs(2.0 - t)) / 4.0; };
  return spectral_apply(mat + mat.adjoint(), step, tol);
}

ComplexMatrix matched_block(const BlockForm& bf, const Tolerances& tol) {
  const Index r = bf.rank();
  const Index n = bf.size();
  if (r == 0) return ComplexMatrix::Zero(n, n);
  if (r == n) return identity(n);

  const ComplexMatrix& a = bf.corner;
  const ComplexMatrix b = sqrt_psd(identity(r) + a * a.adjoint(), tol);
  const Eigen::LLT<ComplexMatrix> b_llt(b);
  const ComplexMatrix b_inv = b_llt.solve(identity(r));
  // B and B + I commute, so B(B + I) is Hermitian positive definite.
  const ComplexMatrix b_shift = hermitian_part(b * (b + identity(r)));

  ComplexMatrix inner(n, n);
  inner.topLeftCorner(r, r) = identity(r) + b_inv;
  inner.topRightCorner(r, n - r) = b_inv * a;
  inner.bottomLeftCorner(n - r, r) = a.adjoint() * b_inv;
  inner.bottomRightCorner(n - r, n - r) = a.adjoint() * b_shift.llt().solve(a);
  inner *= 0.5;
  return bf.basis * inner * bf.basis.adjoint();
}

ComplexMatrix matched_by(Formula f, const Idempotent& q, const Tolerances& tol,
                         const BlockForm* bf) {
  switch (f) {
    case Formula::original: return matched_original(q, tol);
    case Formula::simplified_qstar: return matched_simplified_qstar(q, tol);
    case Formula::simplified_q: return matched_simplified_q(q, tol);
    case Formula::symmetric: return matched_symmetric(q, tol);
    case Formula::block:
      if (bf != nullptr) return matched_block(*bf, tol);
      return matched_block(extract_block_form(q, tol), tol);
  }
  throw std::invalid_argument("matched_by: unknown formula");
}

ComplexMatrix abs_conjugate_complement(const BlockForm& bf, const Tolerances& tol) {
  const Index r = bf.rank();
  const Index k = bf.size() - r;
  const ComplexMatrix& a = bf.corner;
  const ComplexMatrix quarter = spectral_apply(
      identity(k) + a.adjoint() * a, [](double t) { return std::pow(t, -0.25); }, tol);

  ComplexMatrix column(bf.size(), k);
  column.topRows(r) = a * quarter;
  column.bottomRows(k) = -quarter;
  const ComplexMatrix t = bf.basis * column;
  return hermitian_part(t * t.adjoint());
}

MatchedResult matched(const Idempotent& q, const Tolerances& tol,
                      const std::optional<BlockForm>& bf) {
  MatchedResult result;
  const BlockForm block = bf ? *bf : extract_block_form(q, tol);
  for (Formula f : kAllFormulas) result.per_formula.emplace(f, matched_by(f, q, tol, &block));

  for (auto i = result.per_formula.begin(); i != result.per_formula.end(); ++i)
    for (auto j = std::next(i); j != result.per_formula.end(); ++j)
      result.max_pairwise_dev = std::max(result.max_pairwise_dev, fro_norm(i->second - j->second));

  result.m = result.per_formula.at(kReferenceFormula);
  result.proj_residual = projection_residual(result.m);

  const double threshold = tol.identity_threshold(q.matrix().squaredNorm());
  if (!(result.max_pairwise_dev <= threshold))
    throw FormulaDisagreement(result.max_pairwise_dev, threshold);
  return result;
}

ComplexMatrix symmetry_operator(const ComplexMatrix& m, const Tolerances& tol) {
  if (m.rows() != m.cols()) throw std::invalid_argument("symmetry_operator: matrix is not square");
  const double residual = projection_residual(m);
  const double threshold = tol.identity_threshold(m.squaredNorm());
  if (!(residual <= threshold)) throw NotProjection(residual, threshold);
  return 2.0 * m - identity(m.rows());
}

}  // namespace mpkit
