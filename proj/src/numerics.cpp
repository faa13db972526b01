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

#include "cran/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

namespace cran {

ComplexMatrix::ComplexMatrix(std::size_t rows, std::size_t cols, Complex fill)
    : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

ComplexMatrix ComplexMatrix::identity(std::size_t n) {
  ComplexMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

ComplexMatrix ComplexMatrix::from_rows(
    std::initializer_list<std::initializer_list<Complex>> rows) {
  const std::size_t r = rows.size();
  const std::size_t c = r == 0 ? 0 : rows.begin()->size();
  ComplexMatrix m(r, c);
  std::size_t i = 0;
  for (const auto& row : rows) {
    if (row.size() != c) throw std::invalid_argument("from_rows: ragged rows");
    std::size_t j = 0;
    for (const auto& v : row) m(i, j++) = v;
    ++i;
  }
  return m;
}

ComplexMatrix ComplexMatrix::column_vector(std::span<const Complex> v) {
  ComplexMatrix m(v.size(), 1);
  std::copy(v.begin(), v.end(), m.data_.begin());
  return m;
}

ComplexVector ComplexMatrix::row(std::size_t r) const {
  return ComplexVector(data_.begin() + static_cast<std::ptrdiff_t>(r * cols_),
                       data_.begin() + static_cast<std::ptrdiff_t>((r + 1) * cols_));
}

ComplexVector ComplexMatrix::col(std::size_t c) const {
  ComplexVector v(rows_);
  for (std::size_t r = 0; r < rows_; ++r) v[r] = (*this)(r, c);
  return v;
}

void ComplexMatrix::set_col(std::size_t c, std::span<const Complex> v) {
  if (v.size() != rows_) throw std::invalid_argument("set_col: length mismatch");
  for (std::size_t r = 0; r < rows_; ++r) (*this)(r, c) = v[r];
}

ComplexMatrix ComplexMatrix::adjoint() const {
  ComplexMatrix m(cols_, rows_);
  for (std::size_t r = 0; r < rows_; ++r)
    for (std::size_t c = 0; c < cols_; ++c) m(c, r) = std::conj((*this)(r, c));
  return m;
}

ComplexMatrix ComplexMatrix::transpose() const {
  ComplexMatrix m(cols_, rows_);
  for (std::size_t r = 0; r < rows_; ++r)
    for (std::size_t c = 0; c < cols_; ++c) m(c, r) = (*this)(r, c);
  return m;
}

ComplexMatrix ComplexMatrix::conjugate() const {
  ComplexMatrix m = *this;
  for (auto& v : m.data_) v = std::conj(v);
  return m;
}

double ComplexMatrix::frobenius_norm() const {
  double s = 0.0;
  for (const auto& v : data_) s += std::norm(v);
  return std::sqrt(s);
}

bool ComplexMatrix::all_finite() const {
  return std::all_of(data_.begin(), data_.end(), [](const Complex& v) {
    return std::isfinite(v.real()) && std::isfinite(v.imag());
  });
}

ComplexMatrix& ComplexMatrix::operator+=(const ComplexMatrix& other) {
  if (rows_ != other.rows_ || cols_ != other.cols_)
    throw std::invalid_argument("matrix addition: shape mismatch");
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += other.data_[i];
  return *this;
}

ComplexMatrix& ComplexMatrix::operator-=(const ComplexMatrix& other) {
  if (rows_ != other.rows_ || cols_ != other.cols_)
    throw std::invalid_argument("matrix subtraction: shape mismatch");
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= other.data_[i];
  return *this;
}

ComplexMatrix& ComplexMatrix::operator*=(Complex s) {
  for (auto& v : data_) v *= s;
  return *this;
}

ComplexMatrix operator+(ComplexMatrix a, const ComplexMatrix& b) { return a += b; }
ComplexMatrix operator-(ComplexMatrix a, const ComplexMatrix& b) { return a -= b; }
ComplexMatrix operator*(ComplexMatrix a, Complex s) { return a *= s; }
ComplexMatrix operator*(Complex s, ComplexMatrix a) { return a *= s; }

ComplexMatrix operator*(const ComplexMatrix& a, const ComplexMatrix& b) {
  if (a.cols() != b.rows())
    throw std::invalid_argument("matrix product: inner dimensions differ (" +
                                std::to_string(a.cols()) + " vs " +
                                std::to_string(b.rows()) + ")");
  ComplexMatrix m(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const Complex aik = a(i, k);
      if (aik == Complex{}) continue;
      for (std::size_t j = 0; j < b.cols(); ++j) m(i, j) += aik * b(k, j);
    }
  }
  return m;
}

ComplexVector operator*(const ComplexMatrix& a, std::span<const Complex> x) {
  if (a.cols() != x.size())
    throw std::invalid_argument("matrix-vector product: dimension mismatch");
  ComplexVector y(a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    Complex s{};
    for (std::size_t k = 0; k < a.cols(); ++k) s += a(i, k) * x[k];
    y[i] = s;
  }
  return y;
}

Complex inner(std::span<const Complex> a, std::span<const Complex> b) {
  if (a.size() != b.size()) throw std::invalid_argument("inner: length mismatch");
  Complex s{};
  for (std::size_t i = 0; i < a.size(); ++i) s += std::conj(a[i]) * b[i];
  return s;
}

double squared_norm(std::span<const Complex> v) {
  double s = 0.0;
  for (const auto& x : v) s += std::norm(x);
  return s;
}

namespace {

// Lower-triangular L with A = L L^H. Returns the real pivots through
// `pivots` so callers can estimate conditioning.
ComplexMatrix cholesky(const ComplexMatrix& a, std::vector<double>& pivots) {
  const std::size_t n = a.rows();
  double scale = 0.0;
  for (std::size_t i = 0; i < n; ++i) scale = std::max(scale, std::abs(a(i, i).real()));
  if (!(scale > 0.0) || !std::isfinite(scale))
    throw SingularMatrixError("cholesky: zero or non-finite diagonal");

  ComplexMatrix l(n, n);
  pivots.assign(n, 0.0);
  for (std::size_t j = 0; j < n; ++j) {
    double d = a(j, j).real();
    for (std::size_t k = 0; k < j; ++k) d -= std::norm(l(j, k));
    if (!(d > 1e-14 * scale))
      throw SingularMatrixError("cholesky: matrix is not numerically positive definite (pivot " +
                                std::to_string(j) + ")");
    const double ljj = std::sqrt(d);
    l(j, j) = ljj;
    pivots[j] = d;
    for (std::size_t i = j + 1; i < n; ++i) {
      Complex s = a(i, j);
      for (std::size_t k = 0; k < j; ++k) s -= l(i, k) * std::conj(l(j, k));
      l(i, j) = s / ljj;
    }
  }
  return l;
}

ComplexMatrix cholesky_solve(const ComplexMatrix& l, const ComplexMatrix& b) {
  const std::size_t n = l.rows();
  ComplexMatrix x = b;
  for (std::size_t c = 0; c < b.cols(); ++c) {
    // forward: L y = b
    for (std::size_t i = 0; i < n; ++i) {
      Complex s = x(i, c);
      for (std::size_t k = 0; k < i; ++k) s -= l(i, k) * x(k, c);
      x(i, c) = s / l(i, i);
    }
    // backward: L^H x = y
    for (std::size_t ii = n; ii-- > 0;) {
      Complex s = x(ii, c);
      for (std::size_t k = ii + 1; k < n; ++k) s -= std::conj(l(k, ii)) * x(k, c);
      x(ii, c) = s / l(ii, ii);
    }
  }
  return x;
}

}  // namespace

ComplexMatrix hermitian_solve(const ComplexMatrix& a, const ComplexMatrix& b) {
  if (a.rows() != a.cols()) throw std::invalid_argument("hermitian_solve: A is not square");
  if (a.rows() != b.rows())
    throw std::invalid_argument("hermitian_solve: A and B row counts differ");
  if (a.rows() == 0) throw std::invalid_argument("hermitian_solve: empty system");
  std::vector<double> pivots;
  const ComplexMatrix l = cholesky(a, pivots);
  return cholesky_solve(l, b);
}

ComplexMatrix pseudo_inverse(const ComplexMatrix& a) {
  if (a.rows() < a.cols() || a.cols() == 0)
    throw std::invalid_argument("pseudo_inverse: expected a tall or square non-empty matrix");
  const ComplexMatrix ah = a.adjoint();
  const ComplexMatrix gram = ah * a;
  std::vector<double> pivots;
  const ComplexMatrix l = cholesky(gram, pivots);
  const auto [lo, hi] = std::minmax_element(pivots.begin(), pivots.end());
  if (*hi / *lo > 1e10)
    throw SingularMatrixError("pseudo_inverse: rank deficient (Gram condition estimate " +
                              std::to_string(*hi / *lo) + ")");
  return cholesky_solve(l, ah);
}

std::uint64_t Rng::next_u64() {
  std::uint64_t z = seed_ + (++counter_) * 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

double Rng::uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

double Rng::uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

double Rng::normal() {
  // 1 - u keeps the log argument in (0, 1].
  const double u1 = 1.0 - uniform();
  const double u2 = uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

std::uint64_t Rng::derive(std::uint64_t seed, std::uint64_t stream) {
  Rng r(seed ^ (0xD1B54A32D192ED03ULL * (stream + 1)));
  return r.next_u64();
}

ComplexVector sample_complex_gaussian(Rng& rng, std::size_t n, double variance) {
  if (n == 0) throw std::invalid_argument("sample_complex_gaussian: n must be positive");
  if (!(variance > 0.0))
    throw std::invalid_argument("sample_complex_gaussian: variance must be positive");
  const double s = std::sqrt(variance / 2.0);
  ComplexVector v(n);
  for (auto& x : v) {
    const double re = rng.normal();
    const double im = rng.normal();
    x = Complex(s * re, s * im);
  }
  return v;
}

double sample_lognormal_shadow(Rng& rng, double sigma_db) {
  if (!(sigma_db >= 0.0)) throw std::invalid_argument("sample_lognormal_shadow: sigma_db < 0");
  const double z = rng.normal();
  return std::pow(10.0, sigma_db * z / 10.0);
}

}  // namespace cran
