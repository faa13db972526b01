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

#include "cran/frontend.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace cran {

namespace {

void require_power_length(std::span<const double> power, const ComplexMatrix& h) {
  if (power.size() != h.rows())
    throw std::invalid_argument("power vector length must equal the device count");
}

void require_filter_shape(const ComplexMatrix& filter, const ComplexMatrix& h) {
  if (filter.cols() != h.cols())
    throw std::invalid_argument("filter columns must equal the antenna count");
}

}  // namespace

double quantization_scale(int bits) {
  if (bits < 0) throw std::invalid_argument("quantization bits must be non-negative");
  if (bits == 0) return std::numeric_limits<double>::infinity();
  if (bits >= kLosslessQuantizationBits) return 0.0;
  return std::ldexp(1.0, -2 * bits);
}

ComplexMatrix fdsf_matched_filter(const ChannelRealization& channel) {
  return channel.h.transpose();
}

FrontendDesign hsf_decompose(const ComplexMatrix& fully_digital) {
  FrontendDesign d;
  d.analog = ComplexMatrix(fully_digital.rows(), fully_digital.cols());
  for (std::size_t i = 0; i < fully_digital.rows(); ++i) {
    for (std::size_t j = 0; j < fully_digital.cols(); ++j) {
      const Complex v = fully_digital(i, j);
      if (v == Complex{}) {
        d.analog(i, j) = 1.0;
        ++d.zero_phase_entries;
      } else {
        d.analog(i, j) = std::polar(1.0, std::arg(v));
      }
    }
  }
  d.digital = pseudo_inverse(d.analog) * fully_digital;
  d.filter = d.digital.adjoint() * d.analog.adjoint();
  return d;
}

FrontendDesign fdsf_design(const ChannelRealization& channel) {
  FrontendDesign d;
  d.filter = fdsf_matched_filter(channel).adjoint();
  return d;
}

ComplexMatrix effective_channel(const ComplexMatrix& filter, const ComplexMatrix& h) {
  require_filter_shape(filter, h);
  return filter * h.transpose();
}

QuantizationModel quantization_variances(std::span<const double> power,
                                         const ComplexMatrix& filter, const ComplexMatrix& h,
                                         double noise_power, int bits) {
  require_power_length(power, h);
  QuantizationModel q;
  q.bits = bits;
  const double scale = quantization_scale(bits);
  const std::size_t chains = filter.rows();
  q.variance.assign(chains, std::numeric_limits<double>::infinity());
  if (bits == 0) return q;
  const ComplexMatrix g = effective_channel(filter, h);
  for (std::size_t r = 0; r < chains; ++r) {
    double chain_power = noise_power * squared_norm(filter.row(r));
    for (std::size_t j = 0; j < power.size(); ++j) chain_power += power[j] * std::norm(g(r, j));
    q.variance[r] = 3.0 * chain_power * scale;
  }
  return q;
}

ComplexMatrix mmse_combiner(std::span<const double> power, const ComplexMatrix& filter,
                            const ComplexMatrix& h, double noise_power,
                            const QuantizationModel& quant) {
  require_power_length(power, h);
  const ComplexMatrix g = effective_channel(filter, h);
  const std::size_t chains = g.rows();
  const std::size_t kcount = g.cols();
  if (quant.unbounded()) return ComplexMatrix(chains, kcount);
  if (quant.variance.size() != chains)
    throw std::invalid_argument("quantization model does not match the chain count");

  ComplexMatrix cov = filter * filter.adjoint();
  cov *= noise_power;
  for (std::size_t j = 0; j < kcount; ++j) {
    for (std::size_t a = 0; a < chains; ++a) {
      const Complex ga = power[j] * g(a, j);
      for (std::size_t b = 0; b < chains; ++b) cov(a, b) += ga * std::conj(g(b, j));
    }
  }
  for (std::size_t r = 0; r < chains; ++r) cov(r, r) += quant.variance[r];
  return hermitian_solve(cov, g);
}

std::vector<double> sinr(std::span<const double> power, const ComplexMatrix& filter,
                         const ComplexMatrix& combiner, const ComplexMatrix& h,
                         double noise_power, const QuantizationModel& quant) {
  require_power_length(power, h);
  const std::size_t kcount = h.rows();
  std::vector<double> gamma(kcount, 0.0);
  if (quant.unbounded()) return gamma;
  const ComplexMatrix g = effective_channel(filter, h);
  if (combiner.rows() != g.rows() || combiner.cols() != kcount)
    throw std::invalid_argument("combiner must be R x K");
  const ComplexMatrix wv = combiner.adjoint() * filter;  // row k = w_k^H V
  const ComplexMatrix wg = combiner.adjoint() * g;       // (k, j) = w_k^H V h_j
  for (std::size_t k = 0; k < kcount; ++k) {
    const double signal = power[k] * std::norm(wg(k, k));
    if (signal == 0.0) continue;
    double denom = noise_power * squared_norm(wv.row(k));
    for (std::size_t j = 0; j < kcount; ++j)
      if (j != k) denom += power[j] * std::norm(wg(k, j));
    for (std::size_t r = 0; r < g.rows(); ++r) denom += quant.variance[r] * std::norm(combiner(r, k));
    gamma[k] = signal / denom;
  }
  return gamma;
}

}  // namespace cran
