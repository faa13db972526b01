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

// Random generators and comparison helpers shared by the test binaries.

#ifndef CRAN_TEST_SUPPORT_HPP
#define CRAN_TEST_SUPPORT_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

#include "cran/numerics.hpp"

namespace cran::test {

inline ComplexMatrix random_matrix(Rng& rng, std::size_t rows, std::size_t cols,
                                   double scale = 1.0) {
  ComplexMatrix m(rows, cols);
  for (std::size_t r = 0; r < rows; ++r)
    for (std::size_t c = 0; c < cols; ++c)
      m(r, c) = Complex(rng.normal(), rng.normal()) * scale;
  return m;
}

/// B B^H + n I, comfortably positive definite.
inline ComplexMatrix random_hpd(Rng& rng, std::size_t n) {
  const ComplexMatrix b = random_matrix(rng, n, n);
  ComplexMatrix a = b * b.adjoint();
  for (std::size_t i = 0; i < n; ++i) a(i, i) += static_cast<double>(n);
  return a;
}

inline double max_abs_diff(const ComplexMatrix& a, const ComplexMatrix& b) {
  double d = 0.0;
  for (std::size_t r = 0; r < a.rows(); ++r)
    for (std::size_t c = 0; c < a.cols(); ++c) d = std::max(d, std::abs(a(r, c) - b(r, c)));
  return d;
}

inline double relative_diff(const ComplexMatrix& a, const ComplexMatrix& b) {
  return (a - b).frobenius_norm() / std::max(b.frobenius_norm(), 1e-300);
}

inline std::vector<double> uniform_vector(Rng& rng, std::size_t n, double lo, double hi) {
  std::vector<double> v(n);
  for (auto& x : v) x = rng.uniform(lo, hi);
  return v;
}

inline double rel_err(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

}  // namespace cran::test

#endif  // CRAN_TEST_SUPPORT_HPP
