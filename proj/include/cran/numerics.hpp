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

#ifndef CRAN_NUMERICS_HPP
#define CRAN_NUMERICS_HPP

#include <complex>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <span>
#include <stdexcept>
#include <vector>

namespace cran {

using Complex = std::complex<double>;
using ComplexVector = std::vector<Complex>;

/// Raised when a factorization meets a (numerically) singular or
/// ill-conditioned matrix.
class SingularMatrixError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Dense complex matrix, row-major.
class ComplexMatrix {
 public:
  ComplexMatrix() = default;
  ComplexMatrix(std::size_t rows, std::size_t cols, Complex fill = {});

  static ComplexMatrix identity(std::size_t n);
  static ComplexMatrix from_rows(std::initializer_list<std::initializer_list<Complex>> rows);
  /// n x 1 matrix holding `v`.
  static ComplexMatrix column_vector(std::span<const Complex> v);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool empty() const { return data_.empty(); }

  Complex& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  const Complex& operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  std::span<Complex> data() { return data_; }
  std::span<const Complex> data() const { return data_; }

  ComplexVector row(std::size_t r) const;
  ComplexVector col(std::size_t c) const;
  void set_col(std::size_t c, std::span<const Complex> v);

  ComplexMatrix adjoint() const;
  ComplexMatrix transpose() const;
  ComplexMatrix conjugate() const;

  double frobenius_norm() const;
  bool all_finite() const;

  ComplexMatrix& operator+=(const ComplexMatrix& other);
  ComplexMatrix& operator-=(const ComplexMatrix& other);
  ComplexMatrix& operator*=(Complex s);

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<Complex> data_;
};

ComplexMatrix operator+(ComplexMatrix a, const ComplexMatrix& b);
ComplexMatrix operator-(ComplexMatrix a, const ComplexMatrix& b);
ComplexMatrix operator*(ComplexMatrix a, Complex s);
ComplexMatrix operator*(Complex s, ComplexMatrix a);
ComplexMatrix operator*(const ComplexMatrix& a, const ComplexMatrix& b);
ComplexVector operator*(const ComplexMatrix& a, std::span<const Complex> x);

/// a^H b
Complex inner(std::span<const Complex> a, std::span<const Complex> b);
/// ||v||^2
double squared_norm(std::span<const Complex> v);

/// Solves A X = B for Hermitian positive-definite A via Cholesky.
/// Throws std::invalid_argument on shape mismatch and SingularMatrixError
/// when a pivot collapses relative to the diagonal scale.
ComplexMatrix hermitian_solve(const ComplexMatrix& a, const ComplexMatrix& b);

/// Moore-Penrose inverse of a full-column-rank matrix, (A^H A)^{-1} A^H.
/// Throws SingularMatrixError when the Gram condition estimate exceeds 1e10.
ComplexMatrix pseudo_inverse(const ComplexMatrix& a);

/// Counter-based generator: draw i is a SplitMix64 finalization of
/// (seed, i), so a stream is fully determined by its seed and position.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : seed_(seed) {}

  std::uint64_t next_u64();
  /// Uniform on [0, 1) with 53 random bits.
  double uniform();
  double uniform(double lo, double hi);
  /// Standard normal (Box-Muller, two uniforms per draw).
  double normal();

  std::uint64_t seed() const { return seed_; }
  std::uint64_t position() const { return counter_; }

  /// Independent child seed for `stream` under `seed`.
  static std::uint64_t derive(std::uint64_t seed, std::uint64_t stream);

 private:
  std::uint64_t seed_;
  std::uint64_t counter_ = 0;
};

/// n i.i.d. CN(0, variance) draws.
ComplexVector sample_complex_gaussian(Rng& rng, std::size_t n, double variance);

/// Linear factor whose dB value is N(0, sigma_db^2).
double sample_lognormal_shadow(Rng& rng, double sigma_db);

}  // namespace cran

#endif  // CRAN_NUMERICS_HPP
