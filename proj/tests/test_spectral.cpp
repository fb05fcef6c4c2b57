#include <cmath>

#include <doctest.h>

#include "mpkit/errors.hpp"
#include "mpkit/spectral.hpp"
#include "support/generators.hpp"
#include "support/oracle.hpp"

using namespace mpkit;

namespace {

ComplexMatrix mat2(Complex a, Complex b, Complex c, Complex d) {
  ComplexMatrix m(2, 2);
  m << a, b, c, d;
  return m;
}

ComplexMatrix diag2(double a, double b) { return mat2(a, 0.0, 0.0, b); }

double rel(const ComplexMatrix& diff, const ComplexMatrix& ref) {
  return fro_norm(diff) / std::max(1.0, fro_norm(ref));
}

}  // namespace

TEST_CASE("hermitian_eigen: examples") {
  SUBCASE("diagonal") {
    const HermitianEigen e = hermitian_eigen(diag2(3, 1));
    CHECK(e.values(0) == doctest::Approx(1.0));
    CHECK(e.values(1) == doctest::Approx(3.0));
    // Each eigenvector is a unit-modulus multiple of a standard basis vector.
    CHECK(std::abs(e.vectors(1, 0)) == doctest::Approx(1.0));
    CHECK(std::abs(e.vectors(0, 1)) == doctest::Approx(1.0));
  }
  SUBCASE("zero") {
    const HermitianEigen e = hermitian_eigen(ComplexMatrix::Zero(2, 2));
    CHECK(e.values.cwiseAbs().maxCoeff() == 0.0);
    CHECK(fro_norm(e.vectors.adjoint() * e.vectors - identity(2)) < 1e-14);
  }
  SUBCASE("swap matrix: lambda^2 - 1 = 0") {
    const HermitianEigen e = hermitian_eigen(mat2(0, 1, 1, 0));
    CHECK(e.values(0) == doctest::Approx(-1.0));
    CHECK(e.values(1) == doctest::Approx(1.0));
  }
  SUBCASE("empty") {
    CHECK(hermitian_eigen(ComplexMatrix(0, 0)).values.size() == 0);
  }
}

TEST_CASE("hermitian_eigen: errors") {
  CHECK_THROWS_AS(hermitian_eigen(mat2(0, 1, 0, 0)), NotHermitian);
  CHECK_THROWS_AS(hermitian_eigen(ComplexMatrix::Zero(2, 3)), std::invalid_argument);
  ComplexMatrix bad = identity(2);
  bad(0, 0) = std::nan("");
  CHECK_THROWS_AS(hermitian_eigen(bad), std::invalid_argument);
}

TEST_CASE("hermitian_eigen: reconstruction and unitarity on random input") {
  Rng rng(11);
  const Tolerances tol;
  for (Index n : {1, 2, 5, 17, 64}) {
    const ComplexMatrix t = testgen::random_hermitian(n, rng);
    const HermitianEigen e = hermitian_eigen(t);
    CHECK(fro_norm(e.reconstruct() - t) <= tol.eig * fro_norm(t));
    CHECK(fro_norm(e.vectors.adjoint() * e.vectors - identity(n)) <= tol.eig * n);
    for (Index i = 1; i < n; ++i) CHECK(e.values(i - 1) <= e.values(i));
  }
}

TEST_CASE("hermitian_eigen agrees with the Jacobi oracle") {
  Rng rng(12);
  for (Index n : {2, 3, 6, 9}) {
    const ComplexMatrix t = testgen::random_hermitian(n, rng);
    const auto mine = hermitian_eigen(t);
    const auto ref = oracle::jacobi_eigh(t);
    for (Index i = 0; i < n; ++i)
      CHECK(mine.values(i) == doctest::Approx(ref.values[static_cast<std::size_t>(i)]).epsilon(1e-12));
  }
}

TEST_CASE("spectral_apply: examples") {
  const ComplexMatrix d = diag2(2, -1);
  CHECK(fro_norm(spectral_apply(d, [](double t) { return t; }) - d) < 1e-15);
  CHECK(fro_norm(spectral_apply(d, [](double t) { return std::max(t, 0.0); }) - diag2(2, 0)) < 1e-15);
  CHECK(fro_norm(spectral_apply(mat2(0, 1, 1, 0), [](double t) { return std::abs(t); }) -
                 identity(2)) < 1e-14);
}

TEST_CASE("spectral_apply respects composition") {
  Rng rng(13);
  const ComplexMatrix psd = testgen::random_psd(12, 12, rng) + identity(12);
  auto g = [](double t) { return std::sqrt(t); };
  auto f = [](double t) { return std::log(t); };
  const ComplexMatrix once = spectral_apply(psd, [&](double t) { return f(g(t)); });
  const ComplexMatrix twice = spectral_apply(spectral_apply(psd, g), f);
  CHECK(fro_norm(once - twice) < 1e-12 * fro_norm(once) + 1e-13);
}

TEST_CASE("abs_op: examples") {
  SUBCASE("projection is its own absolute value") {
    const ComplexMatrix p = 0.5 * mat2(1, 1, 1, 1);
    CHECK(fro_norm(abs_op(p) - p) < 1e-14);
  }
  SUBCASE("[[1,1],[0,0]] -> (1/sqrt2)[[1,1],[1,1]]") {
    const ComplexMatrix expected = mat2(1, 1, 1, 1) / std::sqrt(2.0);
    CHECK(fro_norm(abs_op(mat2(1, 1, 0, 0)) - expected) < 1e-14);
  }
  SUBCASE("zero") { CHECK(fro_norm(abs_op(ComplexMatrix::Zero(3, 3))) == 0.0); }
  SUBCASE("rectangular input gives cols x cols") {
    const ComplexMatrix t = ComplexMatrix::Ones(2, 3);
    const ComplexMatrix a = abs_op(t);
    CHECK(a.rows() == 3);
    CHECK(a.cols() == 3);
    CHECK(fro_norm(a * a - t.adjoint() * t) < 1e-13);
  }
}

TEST_CASE("abs_op: square equals T*T on random input up to 64x64") {
  Rng rng(14);
  const Tolerances tol;
  for (Index n : {1, 3, 8, 31, 64}) {
    const ComplexMatrix t = testgen::random_matrix(n, n, rng);
    const ComplexMatrix a = abs_op(t);
    const ComplexMatrix gram = t.adjoint() * t;
    CHECK(fro_norm(a * a - gram) <= 10 * tol.eig * fro_norm(gram));
    CHECK(min_eigenvalue(a) >= -1e-12);
  }
}

TEST_CASE("abs_op resolves small singular values and clips below tol_clip") {
  Rng rng(16);
  const Index n = 6;
  const ComplexMatrix u = random_unitary(n, rng);
  const ComplexMatrix w = random_unitary(n, rng);
  RealVector sigma(n);
  sigma << 2.0, 1.0, 3e-7, 1e-9, 1e-11, 0.0;
  const ComplexMatrix t = u * sigma.cast<Complex>().asDiagonal() * w.adjoint();

  // 1e-11 is below tol_clip * sigma_max = 2e-10, so it is dropped.
  RealVector kept = sigma;
  kept(4) = 0.0;
  const ComplexMatrix expected = w * kept.cast<Complex>().asDiagonal() * w.adjoint();
  CHECK(fro_norm(abs_op(t) - expected) < 1e-14);
  CHECK(fro_norm(abs_op(t.adjoint()) - u * kept.cast<Complex>().asDiagonal() * u.adjoint()) < 1e-14);
}

TEST_CASE("abs_op matches the Jacobi oracle") {
  Rng rng(15);
  for (Index n : {2, 4, 7}) {
    const ComplexMatrix t = testgen::random_low_rank(n, n, std::max<Index>(1, n / 2), rng);
    CHECK(fro_norm(abs_op(t) - oracle::abs_value(t)) < 1e-12);
  }
}

TEST_CASE("sqrt_psd: examples and errors") {
  CHECK(fro_norm(sqrt_psd(diag2(4, 9)) - diag2(2, 3)) < 1e-14);
  CHECK(fro_norm(sqrt_psd(identity(3)) - identity(3)) < 1e-14);

  // [[2,1],[1,2]] has eigenvalues 3 and 1 with eigenvectors (1,1)/sqrt2, (1,-1)/sqrt2.
  const ComplexMatrix expected =
      0.5 * (std::sqrt(3.0) * mat2(1, 1, 1, 1) + 1.0 * mat2(1, -1, -1, 1));
  CHECK(fro_norm(sqrt_psd(mat2(2, 1, 1, 2)) - expected) < 1e-14);

  CHECK_THROWS_AS(sqrt_psd(diag2(1, -1)), NotPsd);
  // A negative eigenvalue inside the clip band is treated as zero.
  CHECK(fro_norm(sqrt_psd(diag2(1, -1e-13)) - diag2(1, 0)) < 1e-15);
}

TEST_CASE("sqrt_psd: round trip on random PSD input") {
  Rng rng(16);
  for (Index n : {2, 10, 64}) {
    for (Index k : {n, std::max<Index>(1, n / 3)}) {
      const ComplexMatrix t = testgen::random_psd(n, k, rng);
      const ComplexMatrix s = sqrt_psd(t);
      CHECK(fro_norm(s * s - t) <= 1e-11 * fro_norm(t));
      CHECK(min_eigenvalue(s) >= -1e-10 * op_norm(s));
    }
  }
}

TEST_CASE("positive_part: examples") {
  CHECK(fro_norm(positive_part(diag2(2, -1)) - diag2(2, 0)) < 1e-15);
  const ComplexMatrix psd = mat2(2, 1, 1, 2);
  CHECK(fro_norm(positive_part(psd) - psd) < 1e-14);
  CHECK(fro_norm(positive_part(mat2(0, 1, 1, 0)) - 0.5 * mat2(1, 1, 1, 1)) < 1e-14);
}

TEST_CASE("positive_part: decomposition on random Hermitian input") {
  Rng rng(17);
  for (Index n : {1, 5, 33, 64}) {
    const ComplexMatrix t = testgen::random_hermitian(n, rng);
    const ComplexMatrix plus = positive_part(t);
    const ComplexMatrix minus = positive_part(-t);
    CHECK(fro_norm(plus - minus - t) <= 1e-12 * fro_norm(t));
    CHECK(fro_norm(plus * minus) <= 1e-12 * fro_norm(t) * fro_norm(t));
    CHECK(min_eigenvalue(plus) >= -1e-12);
  }
}

TEST_CASE("pinv: examples") {
  CHECK(fro_norm(pinv(ComplexMatrix::Zero(2, 3))) == 0.0);
  CHECK(pinv(ComplexMatrix::Zero(2, 3)).rows() == 3);
  CHECK(fro_norm(pinv(diag2(2, 0)) - diag2(0.5, 0)) < 1e-15);
  const ComplexMatrix p = 0.5 * mat2(1, Complex(0, 1), Complex(0, -1), 1);
  CHECK(fro_norm(pinv(p) - p) < 1e-14);
}

TEST_CASE("pinv: Penrose identities on random rank-deficient input") {
  Rng rng(18);
  for (int trial = 0; trial < 12; ++trial) {
    const Index rows = testgen::uniform_index(1, 40, rng);
    const Index cols = testgen::uniform_index(1, 40, rng);
    const Index k = testgen::uniform_index(1, std::min(rows, cols), rng);
    const ComplexMatrix a = testgen::random_low_rank(rows, cols, k, rng);
    const ComplexMatrix x = pinv(a);
    CHECK(fro_norm(a * x * a - a) <= 1e-11 * fro_norm(a));
    CHECK(fro_norm(x * a * x - x) <= 1e-11 * fro_norm(x));
    CHECK(asymmetry(a * x) <= 1e-11);
    CHECK(asymmetry(x * a) <= 1e-11);
    CHECK(numerical_rank(a) == k);
  }
}

TEST_CASE("pinv: Hermitian fast path agrees with the SVD path") {
  Rng rng(19);
  const ComplexMatrix h = testgen::random_psd(9, 4, rng) - testgen::random_psd(9, 2, rng);
  ComplexMatrix nudged = h;
  // One ulp off exact Hermitian symmetry forces the SVD route.
  nudged(0, 1) = Complex(std::nextafter(h(0, 1).real(), 10.0), h(0, 1).imag());
  CHECK(fro_norm(pinv(h) - pinv(nudged)) < 1e-10);
  CHECK(numerical_rank(h) == 6);
  CHECK(numerical_rank(nudged) == 6);
  CHECK(op_norm(h) == doctest::Approx(op_norm(nudged)).epsilon(1e-12));
}

TEST_CASE("op_norm: examples") {
  CHECK(op_norm(identity(5)) == doctest::Approx(1.0));
  CHECK(op_norm(ComplexMatrix::Zero(3, 2)) == 0.0);
  CHECK(op_norm(mat2(1, 1, 0, 0)) == doctest::Approx(std::sqrt(2.0)));
}

TEST_CASE("range_projection: examples") {
  CHECK(fro_norm(range_projection(identity(3)) - identity(3)) < 1e-14);
  CHECK(fro_norm(range_projection(mat2(1, 1, 0, 0)) - diag2(1, 0)) < 1e-14);
  CHECK(fro_norm(range_projection(ComplexMatrix::Zero(2, 2))) == 0.0);
}

TEST_CASE("range_projection: Hermitian, idempotent, fixes columns") {
  Rng rng(20);
  for (int trial = 0; trial < 8; ++trial) {
    const Index rows = testgen::uniform_index(1, 30, rng);
    const Index cols = testgen::uniform_index(1, 30, rng);
    const Index k = testgen::uniform_index(1, std::min(rows, cols), rng);
    const ComplexMatrix t = testgen::random_low_rank(rows, cols, k, rng);
    const ComplexMatrix p = range_projection(t);
    CHECK(asymmetry(p) <= 1e-12);
    CHECK(fro_norm(p * p - p) <= 1e-12 * (1.0 + fro_norm(p)));
    CHECK(fro_norm(p * t - t) <= 1e-12 * fro_norm(t));
    CHECK(numerical_rank(p) == k);
  }
}
