#pragma once

#include <algorithm>
#include <limits>

#include "mpkit/matrix.hpp"

namespace mpkit {

// Numerical policy shared by every kernel and check.
struct Tolerances {
  // Relative eigen-reconstruction bound.
  double eig = 1e-12;
  // Eigenvalues below clip * max|lambda| are zeroed before square roots.
  double clip = 1e-10;
  // Relative singular-value cutoff for pseudoinverse and numerical rank.
  double pinv = 1e-10;
  // Identity-check residual bound, scaled by (1 + ||Q||^2) at the call site.
  double id = 1e-8;

  // Effective relative rank cutoff: never below machine epsilon * max(rows, cols).
  double pinv_cutoff(Index rows, Index cols) const {
    const double floor = std::numeric_limits<double>::epsilon() *
                         static_cast<double>(std::max<Index>({rows, cols, 1}));
    return std::max(pinv, floor);
  }

  // tol_id * (1 + scale); scale is a squared norm of the operator under test.
  double identity_threshold(double scale) const { return id * (1.0 + scale); }

  // Throws std::invalid_argument naming the offending field.
  void validate() const;
};

}  // namespace mpkit
