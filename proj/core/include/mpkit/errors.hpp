#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace mpkit {

// Base of every numerical/domain failure raised by mpkit. Precondition
// violations on shapes and arguments throw std::invalid_argument instead.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class NotHermitian : public Error {
 public:
  explicit NotHermitian(double asymmetry);
  double asymmetry() const noexcept { return asymmetry_; }

 private:
  double asymmetry_;
};

class NoConvergence : public Error {
 public:
  using Error::Error;
};

class NotPsd : public Error {
 public:
  NotPsd(double min_eigenvalue, double bound);
  double min_eigenvalue() const noexcept { return min_eigenvalue_; }

 private:
  double min_eigenvalue_;
};

class NotIdempotent : public Error {
 public:
  NotIdempotent(double residual, double threshold);
  double residual() const noexcept { return residual_; }
  double threshold() const noexcept { return threshold_; }

 private:
  double residual_;
  double threshold_;
};

class BasisNotUnitary : public Error {
 public:
  explicit BasisNotUnitary(double residual);
  double residual() const noexcept { return residual_; }

 private:
  double residual_;
};

class DecompositionFailed : public Error {
 public:
  DecompositionFailed(double residual, double threshold);
  double residual() const noexcept { return residual_; }

 private:
  double residual_;
};

class FormulaDisagreement : public Error {
 public:
  FormulaDisagreement(double deviation, double threshold);
  double deviation() const noexcept { return deviation_; }

 private:
  double deviation_;
};

class NotProjection : public Error {
 public:
  NotProjection(double residual, double threshold);
  double residual() const noexcept { return residual_; }

 private:
  double residual_;
};

// Malformed matrix or config input. line/column are 1-based; 0 when the
// problem is structural rather than syntactic.
class ParseError : public Error {
 public:
  ParseError(std::string what, std::size_t line = 0, std::size_t column = 0);
  std::size_t line() const noexcept { return line_; }
  std::size_t column() const noexcept { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

}  // namespace mpkit
