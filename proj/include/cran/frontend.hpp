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

#ifndef CRAN_FRONTEND_HPP
#define CRAN_FRONTEND_HPP

#include <cstddef>
#include <span>
#include <vector>

#include "cran/channel.hpp"
#include "cran/numerics.hpp"

namespace cran {

/// Spatial filter and baseband combiner.
///
/// `filter` is the R x N composite V = V_D^H V_A^H applied at the radio
/// head. For a fully digital design `analog` and `digital` are empty and
/// `filter` is set directly. `combiner` (R x K, column k = w_k) is filled
/// by the optimizer.
struct FrontendDesign {
  ComplexMatrix analog;    // N x R, unit-modulus entries
  ComplexMatrix digital;   // R x R
  ComplexMatrix filter;    // R x N
  ComplexMatrix combiner;  // R x K
  std::size_t zero_phase_entries = 0;  // zero-magnitude inputs given phase 0
};

/// Per-chain quantization error variances for a bit width.
struct QuantizationModel {
  int bits = 0;
  std::vector<double> variance;  // +inf on every chain when bits == 0

  bool unbounded() const { return bits == 0; }
};

/// Bit widths at or above this value are treated as lossless.
inline constexpr int kLosslessQuantizationBits = 600;

/// 2^{-2 varpi}; +inf for 0 bits, 0 for lossless widths.
double quantization_scale(int bits);

/// Matched-filter fully digital design: N x K matrix whose column k is h_k,
/// so its adjoint correlates the antenna vector with every device channel.
ComplexMatrix fdsf_matched_filter(const ChannelRealization& channel);

/// Constant-modulus phase projection plus least-squares digital stage.
FrontendDesign hsf_decompose(const ComplexMatrix& fully_digital);

/// Fully digital design used directly as the composite filter.
FrontendDesign fdsf_design(const ChannelRealization& channel);

/// R x K post-filter channel; column j is V h_j.
ComplexMatrix effective_channel(const ComplexMatrix& filter, const ComplexMatrix& h);

QuantizationModel quantization_variances(std::span<const double> power,
                                         const ComplexMatrix& filter, const ComplexMatrix& h,
                                         double noise_power, int bits);

/// Linear MMSE combiner, column k = C^{-1} V h_k with
/// C = sum_j p_j (V h_j)(V h_j)^H + sigma^2 V V^H + Q.
/// With unbounded quantization noise the combiner is all zeros.
ComplexMatrix mmse_combiner(std::span<const double> power, const ComplexMatrix& filter,
                            const ComplexMatrix& h, double noise_power,
                            const QuantizationModel& quant);

/// Post-combining SINR of every device.
std::vector<double> sinr(std::span<const double> power, const ComplexMatrix& filter,
                         const ComplexMatrix& combiner, const ComplexMatrix& h,
                         double noise_power, const QuantizationModel& quant);

}  // namespace cran

#endif  // CRAN_FRONTEND_HPP
