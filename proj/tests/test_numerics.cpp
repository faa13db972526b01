// SPDX-License-Identifier: Apache-2.0
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#include <cmath>
#include <numeric>
#include <vector>

#include <doctest.h>

#include "cran/numerics.hpp"
#include "support.hpp"

using namespace cran;
using cran::test::max_abs_diff;
using cran::test::random_hpd;
using cran::test::random_matrix;
using cran::test::relative_diff;

TEST_CASE("matrix products against hand-computed values") {
  const auto a = ComplexMatrix::from_rows({{Complex(1, 1), 2.0}, {0.0, Complex(0, -1)}});
  const auto b = ComplexMatrix::from_rows({{1.0, 0.0}, {Complex(0, 1), 3.0}});
  const auto c = a * b;
  CHECK(c(0, 0) == Complex(1, 3));
  CHECK(c(0, 1) == Complex(6, 0));
  CHECK(c(1, 0) == Complex(1, 0));
  CHECK(c(1, 1) == Complex(0, -3));
  CHECK(a.adjoint()(0, 0) == Complex(1, -1));
  CHECK(a.adjoint()(0, 1) == Complex(0, 0));
  CHECK(a.adjoint()(1, 1) == Complex(0, 1));
  CHECK_THROWS_AS(a * ComplexMatrix(3, 1), std::invalid_argument);
}

TEST_CASE("inner product conjugates the left argument") {
  const ComplexVector a{Complex(0, 1), 2.0};
  const ComplexVector b{Complex(0, 1), Complex(1, 1)};
  CHECK(inner(a, b) == Complex(3, 2));
  CHECK(squared_norm(a) == doctest::Approx(5.0));
}

TEST_CASE("hermitian_solve on scaled identities") {
  const auto x = hermitian_solve(ComplexMatrix::identity(3) * Complex(2.0),
                                 ComplexMatrix::identity(3));
  CHECK(max_abs_diff(x, ComplexMatrix::identity(3) * Complex(0.5)) < 1e-15);

  Rng rng(11);
  const auto b = random_matrix(rng, 4, 3);
  CHECK(max_abs_diff(hermitian_solve(ComplexMatrix::identity(4), b), b) < 1e-15);
}

TEST_CASE("hermitian_solve residual on random positive-definite systems") {
  Rng rng(12);
  for (std::size_t n : {1u, 2u, 6u, 17u, 40u}) {
    for (int rep = 0; rep < 10; ++rep) {
      const auto a = random_hpd(rng, n);
      const auto b = random_matrix(rng, n, 1 + rep % 4);
      const auto x = hermitian_solve(a, b);
      CHECK(relative_diff(a * x, b) <= 1e-10);
    }
  }
}

TEST_CASE("hermitian_solve rejects bad input") {
  CHECK_THROWS_AS(hermitian_solve(ComplexMatrix(2, 3), ComplexMatrix(2, 1)), std::invalid_argument);
  CHECK_THROWS_AS(hermitian_solve(ComplexMatrix::identity(2), ComplexMatrix(3, 1)),
                  std::invalid_argument);
  CHECK_THROWS_AS(hermitian_solve(ComplexMatrix(2, 2), ComplexMatrix(2, 1)), SingularMatrixError);
  const auto rank1 = ComplexMatrix::from_rows({{1.0, 1.0}, {1.0, 1.0}});
  CHECK_THROWS_AS(hermitian_solve(rank1, ComplexMatrix::identity(2)), SingularMatrixError);
}

TEST_CASE("pseudo_inverse of simple matrices") {
  CHECK(max_abs_diff(pseudo_inverse(ComplexMatrix::identity(5)), ComplexMatrix::identity(5)) <
        1e-15);
  CHECK(max_abs_diff(pseudo_inverse(ComplexMatrix::identity(2) * Complex(3.0)),
                     ComplexMatrix::identity(2) * Complex(1.0 / 3.0)) < 1e-15);
}

TEST_CASE("pseudo_inverse satisfies the Moore-Penrose identities") {
  Rng rng(13);
  const std::pair<std::size_t, std::size_t> shapes[] = {{8, 3}, {5, 5}, {20, 7}, {64, 16}};
  for (auto [rows, cols] : shapes) {
    for (int rep = 0; rep < 5; ++rep) {
      const auto a = random_matrix(rng, rows, cols);
      const auto p = pseudo_inverse(a);
      REQUIRE(p.rows() == cols);
      REQUIRE(p.cols() == rows);
      CHECK(relative_diff(a * p * a, a) <= 1e-8);
      CHECK(relative_diff(p * a * p, p) <= 1e-8);
      const auto ap = a * p;
      const auto pa = p * a;
      CHECK(relative_diff(ap.adjoint(), ap) <= 1e-8);
      CHECK(relative_diff(pa.adjoint(), pa) <= 1e-8);
    }
  }
}

TEST_CASE("pseudo_inverse rejects rank deficiency") {
  ComplexMatrix a(4, 2);
  for (std::size_t r = 0; r < 4; ++r) {
    a(r, 0) = Complex(r + 1.0, 0.5);
    a(r, 1) = a(r, 0) * 2.0;
  }
  CHECK_THROWS_AS(pseudo_inverse(a), SingularMatrixError);
  CHECK_THROWS_AS(pseudo_inverse(ComplexMatrix(2, 3)), std::invalid_argument);
}

TEST_CASE("Rng streams are reproducible and seed dependent") {
  Rng a(42), b(42), c(43);
  bool differs = false;
  for (int i = 0; i < 1000; ++i) {
    const auto x = a.next_u64();
    CHECK(x == b.next_u64());
    differs = differs || x != c.next_u64();
  }
  CHECK(differs);
  CHECK(Rng::derive(1, 0) != Rng::derive(1, 1));
  CHECK(Rng::derive(1, 0) != Rng::derive(2, 0));
  CHECK(Rng::derive(7, 3) == Rng::derive(7, 3));
}

TEST_CASE("uniform draws stay in range with the right mean") {
  Rng rng(5);
  double sum = 0.0;
  const int n = 100000;
  for (int i = 0; i < n; ++i) {
    const double u = rng.uniform();
    REQUIRE(u >= 0.0);
    REQUIRE(u < 1.0);
    sum += u;
  }
  CHECK(sum / n == doctest::Approx(0.5).epsilon(0.01));
  for (int i = 0; i < 1000; ++i) {
    const double v = rng.uniform(-3.0, 2.0);
    REQUIRE(v >= -3.0);
    REQUIRE(v < 2.0);
  }
}

TEST_CASE("complex Gaussian moments") {
  Rng rng(6);
  const auto v = sample_complex_gaussian(rng, 100000, 1.0);
  double power = 0.0, re2 = 0.0, im2 = 0.0;
  Complex mean{};
  for (const auto& z : v) {
    power += std::norm(z);
    re2 += z.real() * z.real();
    im2 += z.imag() * z.imag();
    mean += z;
  }
  const double n = static_cast<double>(v.size());
  CHECK(std::abs(power / n - 1.0) <= 0.02);
  CHECK(std::abs(re2 / n - 0.5) <= 0.01);
  CHECK(std::abs(im2 / n - 0.5) <= 0.01);
  CHECK(std::abs(mean / n) <= 0.01);

  Rng scaled(6);
  const auto w = sample_complex_gaussian(scaled, 100000, 4.0);
  double pw = 0.0;
  for (const auto& z : w) pw += std::norm(z);
  CHECK(std::abs(pw / n - 4.0) <= 0.08);
}

TEST_CASE("complex Gaussian preconditions and determinism") {
  Rng rng(1);
  CHECK_THROWS_AS(sample_complex_gaussian(rng, 4, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(sample_complex_gaussian(rng, 0, 1.0), std::invalid_argument);
  Rng a(99), b(99);
  CHECK(sample_complex_gaussian(a, 64, 1.0) == sample_complex_gaussian(b, 64, 1.0));
}

TEST_CASE("log-normal shadowing") {
  Rng rng(7);
  CHECK(sample_lognormal_shadow(rng, 0.0) == 1.0);
  const int n = 100000;
  double s = 0.0, s2 = 0.0;
  for (int i = 0; i < n; ++i) {
    const double db = 10.0 * std::log10(sample_lognormal_shadow(rng, 6.0));
    s += db;
    s2 += db * db;
  }
  const double mean = s / n;
  const double sd = std::sqrt(s2 / n - mean * mean);
  CHECK(std::abs(mean) <= 0.1);
  CHECK(std::abs(sd - 6.0) <= 0.1);
  Rng a(3), b(3);
  CHECK(sample_lognormal_shadow(a, 6.0) == sample_lognormal_shadow(b, 6.0));
  CHECK_THROWS_AS(sample_lognormal_shadow(rng, -1.0), std::invalid_argument);
}
