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

// JSON and CSV formats shared by the CLI and the experiment harness.
// Complex matrices are stored as {"rows", "cols", "data"} with data holding
// interleaved real and imaginary parts in row-major order. Doubles are
// written with 17 significant digits so files round-trip exactly.

#ifndef CRAN_SERIALIZE_HPP
#define CRAN_SERIALIZE_HPP

#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "cran/config.hpp"
#include "cran/learner.hpp"
#include "cran/scenario.hpp"
#include "cran/solver.hpp"

namespace cran {

using Json = nlohmann::ordered_json;

std::string format_double(double v);

Json config_to_json(const SystemConfig& cfg);
/// Overrides the fields present in `j` on top of `base`. Unknown keys throw.
SystemConfig config_from_json(const Json& j, SystemConfig base = default_config());
/// Applies one "key=value" override. Setting `devices` also sets `rf_chains`.
void apply_config_override(SystemConfig& cfg, std::string_view key_value);
/// JSON object, or plain "key = value" lines with '#' comments.
SystemConfig load_config(const std::filesystem::path& path, SystemConfig base = default_config());

Json matrix_to_json(const ComplexMatrix& m);
ComplexMatrix matrix_from_json(const Json& j);

Json tasks_to_json(const std::vector<TaskSpec>& tasks);
std::vector<TaskSpec> tasks_from_json(const Json& j);
/// JSON array of {bits, cycles, deadline_s} or CSV with that header.
std::vector<TaskSpec> load_tasks(const std::filesystem::path& path);

Json scenario_to_json(const Scenario& s);
Json solution_to_json(const Solution& s);
void write_trace_csv(std::ostream& out, const SolveTrace& trace);

/// Header b_1..b_K, t_1..t_K, g_1..g_K, p_1..p_K, f_1..f_K, varpi, seed.
void write_dataset_csv(std::ostream& out, const std::vector<TrainingSample>& samples,
                       std::size_t devices);
std::vector<TrainingSample> read_dataset_csv(std::istream& in, std::size_t devices);

Json model_to_json(const Model& model);
Model model_from_json(const Json& j);

Json load_json(const std::filesystem::path& path);
void save_text(const std::filesystem::path& path, const std::string& text);

}  // namespace cran

#endif  // CRAN_SERIALIZE_HPP
