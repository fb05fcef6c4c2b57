#include "mpkit/matrix.hpp"

#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "mpkit/errors.hpp"
#include "mpkit/tolerances.hpp"

namespace mpkit {

double asymmetry(const ComplexMatrix& t) {
  if (t.rows() != t.cols()) throw std::invalid_argument("asymmetry: matrix is not square");
  return fro_norm(t - t.adjoint());
}

bool all_finite(const ComplexMatrix& m) {
  for (Index j = 0; j < m.cols(); ++j)
    for (Index i = 0; i < m.rows(); ++i)
      if (!std::isfinite(m(i, j).real()) || !std::isfinite(m(i, j).imag())) return false;
  return true;
}

double projection_residual(const ComplexMatrix& m) {
  return fro_norm(m * m - m) + fro_norm(m - m.adjoint());
}

ComplexMatrix block_diag_twice(const ComplexMatrix& x) {
  const Index r = x.rows();
  const Index c = x.cols();
  ComplexMatrix out = ComplexMatrix::Zero(2 * r, 2 * c);
  out.topLeftCorner(r, c) = x;
  out.bottomRightCorner(r, c) = x;
  return out;
}

void Tolerances::validate() const {
  auto require = [](double v, const char* name) {
    if (!(v > 0.0) || !std::isfinite(v))
      throw std::invalid_argument(std::string("tolerance ") + name + " must be positive and finite");
  };
  require(eig, "tol_eig");
  require(clip, "tol_clip");
  require(pinv, "tol_pinv");
  require(id, "tol_id");
  if (pinv < std::numeric_limits<double>::epsilon())
    throw std::invalid_argument("tolerance tol_pinv must be at least machine epsilon");
}

namespace {

std::string format_value(const char* label, double value) {
  std::ostringstream os;
  os << label << value;
  return os.str();
}

}  // namespace

NotHermitian::NotHermitian(double asym)
    : Error(format_value("matrix is not Hermitian: ||T - T*||_F = ", asym)), asymmetry_(asym) {}

NotPsd::NotPsd(double min_eig, double bound)
    : Error(format_value("matrix is not PSD: min eigenvalue = ", min_eig) +
            format_value(" < -", bound)),
      min_eigenvalue_(min_eig) {}

NotIdempotent::NotIdempotent(double residual, double threshold)
    : Error(format_value("NotIdempotent: ||Q^2 - Q||_F = ", residual) +
            format_value(" exceeds ", threshold)),
      residual_(residual),
      threshold_(threshold) {}

BasisNotUnitary::BasisNotUnitary(double residual)
    : Error(format_value("basis is not unitary: ||U*U - I||_F = ", residual)), residual_(residual) {}

DecompositionFailed::DecompositionFailed(double residual, double threshold)
    : Error(format_value("block decomposition failed: reconstruction residual ", residual) +
            format_value(" exceeds ", threshold)),
      residual_(residual) {}

FormulaDisagreement::FormulaDisagreement(double deviation, double threshold)
    : Error(format_value("matched projection formulas disagree: max pairwise deviation ",
                         deviation) +
            format_value(" exceeds ", threshold)),
      deviation_(deviation) {}

NotProjection::NotProjection(double residual, double threshold)
    : Error(format_value("matrix is not a projection: residual ", residual) +
            format_value(" exceeds ", threshold)),
      residual_(residual) {}

ParseError::ParseError(std::string what, std::size_t line, std::size_t column)
    : Error(std::move(what)), line_(line), column_(column) {}

}  // namespace mpkit
