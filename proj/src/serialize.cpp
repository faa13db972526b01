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

#include "cran/serialize.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <variant>

namespace cran {

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

namespace {

using Field = std::variant<double SystemConfig::*, std::size_t SystemConfig::*,
                           unsigned SystemConfig::*>;

struct NamedField {
  const char* name;
  Field field;
};

const std::vector<NamedField>& config_fields() {
  static const std::vector<NamedField> fields = {
      {"antennas", &SystemConfig::antennas},
      {"devices", &SystemConfig::devices},
      {"rf_chains", &SystemConfig::rf_chains},
      {"bandwidth_hz", &SystemConfig::bandwidth_hz},
      {"fronthaul_bps", &SystemConfig::fronthaul_bps},
      {"cpu_hz", &SystemConfig::cpu_hz},
      {"modulation_order", &SystemConfig::modulation_order},
      {"noise_power_w", &SystemConfig::noise_power_w},
      {"max_power_w", &SystemConfig::max_power_w},
      {"cycles_per_bit", &SystemConfig::cycles_per_bit},
      {"device_min_y", &SystemConfig::device_min_y},
      {"carrier_hz", &SystemConfig::carrier_hz},
      {"pathloss_exponent", &SystemConfig::pathloss_exponent},
      {"shadow_sigma_db", &SystemConfig::shadow_sigma_db},
      {"rician_db_intercept", &SystemConfig::rician_db_intercept},
      {"rician_db_slope", &SystemConfig::rician_db_slope},
      {"bits_min", &SystemConfig::bits_min},
      {"bits_max", &SystemConfig::bits_max},
      {"deadline_min_s", &SystemConfig::deadline_min_s},
      {"deadline_max_s", &SystemConfig::deadline_max_s},
  };
  return fields;
}

double* room_field(SystemConfig& cfg, std::string_view key) {
  if (key == "room_x") return &cfg.room.x;
  if (key == "room_y") return &cfg.room.y;
  if (key == "room_z") return &cfg.room.z;
  return nullptr;
}

std::string canonical_key(std::string_view key) {
  if (key == "eta") return "cycles_per_bit";
  if (key == "N") return "antennas";
  if (key == "K") return "devices";
  return std::string(key);
}

double parse_number(std::string_view key, std::string_view text) {
  const std::string s(text);
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != s.size())
    throw std::invalid_argument("config key '" + std::string(key) + "': '" + s +
                                "' is not a number");
  return v;
}

void set_field(SystemConfig& cfg, std::string_view raw_key, double value) {
  const std::string key = canonical_key(raw_key);
  if (double* room = room_field(cfg, key)) {
    *room = value;
    return;
  }
  for (const auto& nf : config_fields()) {
    if (key != nf.name) continue;
    std::visit(
        [&](auto member) {
          using T = std::remove_reference_t<decltype(cfg.*member)>;
          if constexpr (std::is_same_v<T, double>) {
            cfg.*member = value;
          } else {
            if (!(value >= 0.0) || value != std::floor(value))
              throw std::invalid_argument("config key '" + key + "' must be a non-negative integer");
            cfg.*member = static_cast<T>(value);
          }
        },
        nf.field);
    if (key == "devices") cfg.rf_chains = cfg.devices;
    return;
  }
  throw std::invalid_argument("unknown config key '" + std::string(raw_key) + "'");
}

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n\"");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n\"");
  return std::string(s.substr(b, e - b + 1));
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, ',')) cells.push_back(trim(cell));
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

}  // namespace

Json config_to_json(const SystemConfig& cfg) {
  Json j = Json::object();
  for (const auto& nf : config_fields()) {
    std::visit([&](auto member) { j[nf.name] = cfg.*member; }, nf.field);
  }
  j["room_x"] = cfg.room.x;
  j["room_y"] = cfg.room.y;
  j["room_z"] = cfg.room.z;
  return j;
}

SystemConfig config_from_json(const Json& j, SystemConfig base) {
  if (!j.is_object()) throw std::invalid_argument("config JSON must be an object");
  // Apply `devices` first so an explicit rf_chains still wins.
  if (j.contains("devices")) set_field(base, "devices", j.at("devices").get<double>());
  if (j.contains("K")) set_field(base, "K", j.at("K").get<double>());
  for (const auto& [key, value] : j.items()) {
    if (key == "devices" || key == "K") continue;
    if (!value.is_number())
      throw std::invalid_argument("config key '" + key + "' must be numeric");
    set_field(base, key, value.get<double>());
  }
  base.validate();
  return base;
}

void apply_config_override(SystemConfig& cfg, std::string_view key_value) {
  const auto eq = key_value.find('=');
  if (eq == std::string_view::npos)
    throw std::invalid_argument("override '" + std::string(key_value) + "' is not key=value");
  const std::string key = trim(key_value.substr(0, eq));
  set_field(cfg, key, parse_number(key, trim(key_value.substr(eq + 1))));
}

SystemConfig load_config(const std::filesystem::path& path, SystemConfig base) {
  const std::string text = read_file(path);
  const auto first = text.find_first_not_of(" \t\r\n");
  if (first != std::string::npos && text[first] == '{') {
    try {
      return config_from_json(Json::parse(text), base);
    } catch (const Json::exception& e) {
      throw std::runtime_error(path.string() + ": " + e.what());
    }
  }
  std::istringstream lines(text);
  std::string line;
  int number = 0;
  while (std::getline(lines, line)) {
    ++number;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    if (trim(line).empty() || trim(line).front() == '[') continue;
    try {
      apply_config_override(base, line);
    } catch (const std::exception& e) {
      throw std::runtime_error(path.string() + ":" + std::to_string(number) + ": " + e.what());
    }
  }
  base.validate();
  return base;
}

Json matrix_to_json(const ComplexMatrix& m) {
  Json data = Json::array();
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t c = 0; c < m.cols(); ++c) {
      data.push_back(m(i, c).real());
      data.push_back(m(i, c).imag());
    }
  return Json{{"rows", m.rows()}, {"cols", m.cols()}, {"data", std::move(data)}};
}

ComplexMatrix matrix_from_json(const Json& j) {
  const auto rows = j.at("rows").get<std::size_t>();
  const auto cols = j.at("cols").get<std::size_t>();
  const Json& data = j.at("data");
  if (data.size() != 2 * rows * cols)
    throw std::invalid_argument("matrix JSON: data length does not match rows x cols");
  ComplexMatrix m(rows, cols);
  for (std::size_t i = 0; i < rows; ++i)
    for (std::size_t c = 0; c < cols; ++c) {
      const std::size_t at = 2 * (i * cols + c);
      m(i, c) = Complex(data[at].get<double>(), data[at + 1].get<double>());
    }
  return m;
}

Json tasks_to_json(const std::vector<TaskSpec>& tasks) {
  Json arr = Json::array();
  for (const auto& t : tasks)
    arr.push_back(Json{{"bits", t.bits}, {"cycles", t.cycles}, {"deadline_s", t.deadline_s}});
  return arr;
}

std::vector<TaskSpec> tasks_from_json(const Json& j) {
  if (!j.is_array()) throw std::invalid_argument("tasks JSON must be an array");
  std::vector<TaskSpec> tasks;
  for (const auto& e : j) {
    TaskSpec t{e.at("bits").get<double>(), e.at("cycles").get<double>(),
               e.at("deadline_s").get<double>()};
    t.validate();
    tasks.push_back(t);
  }
  return tasks;
}

std::vector<TaskSpec> load_tasks(const std::filesystem::path& path) {
  const std::string text = read_file(path);
  const auto first = text.find_first_not_of(" \t\r\n");
  if (first != std::string::npos && (text[first] == '[' || text[first] == '{')) {
    Json j = Json::parse(text);
    return tasks_from_json(j.is_object() ? j.at("tasks") : j);
  }
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || split_csv_line(line) != std::vector<std::string>{"bits", "cycles", "deadline_s"})
    throw std::runtime_error(path.string() + ": expected header bits,cycles,deadline_s");
  std::vector<TaskSpec> tasks;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    const auto cells = split_csv_line(line);
    if (cells.size() != 3) throw std::runtime_error(path.string() + ": task rows need 3 columns");
    TaskSpec t{parse_number("bits", cells[0]), parse_number("cycles", cells[1]),
               parse_number("deadline_s", cells[2])};
    t.validate();
    tasks.push_back(t);
  }
  return tasks;
}

Json scenario_to_json(const Scenario& s) {
  Json antennas = Json::array();
  for (const auto& a : s.geometry.antennas) antennas.push_back(Json::array({a.x, a.z}));
  Json devices = Json::array();
  for (const auto& d : s.geometry.devices) devices.push_back(Json::array({d.x, d.y, d.z}));
  Json j;
  j["seed"] = s.seed;
  j["config"] = config_to_json(s.config);
  j["antennas_xz"] = std::move(antennas);
  j["devices_xyz"] = std::move(devices);
  j["tasks"] = tasks_to_json(s.tasks);
  j["channel"] = matrix_to_json(s.channel.h);
  j["hybrid"] = Json{{"analog", matrix_to_json(s.hybrid.analog)},
                     {"digital", matrix_to_json(s.hybrid.digital)},
                     {"filter", matrix_to_json(s.hybrid.filter)},
                     {"zero_phase_entries", s.hybrid.zero_phase_entries}};
  j["fully_digital"] = Json{{"filter", matrix_to_json(s.digital.filter)}};
  return j;
}

Json solution_to_json(const Solution& s) {
  Json j;
  j["status"] = to_string(s.status);
  j["diagnostic"] = s.diagnostic;
  j["total_power_w"] = s.usable() ? Json(s.total_power()) : Json(nullptr);
  j["power_w"] = s.power;
  j["cpu_hz"] = s.cpu;
  j["bits"] = s.bits;
  j["outer_iterations"] = s.trace.outer_iterations;
  j["inner_iterations"] = s.trace.inner_iterations;
  j["objective"] = s.trace.objective;
  if (!s.combiner.empty()) j["combiner"] = matrix_to_json(s.combiner);
  return j;
}

void write_trace_csv(std::ostream& out, const SolveTrace& trace) {
  out << "outer,objective_w,bits,inner_iterations\n";
  out << "0," << format_double(trace.objective.front()) << ",,\n";
  for (std::size_t i = 0; i < trace.bits.size(); ++i) {
    out << i + 1 << ',';
    if (i + 1 < trace.objective.size()) out << format_double(trace.objective[i + 1]);
    out << ',' << trace.bits[i] << ',';
    if (i < trace.inner_iterations.size()) out << trace.inner_iterations[i];
    out << '\n';
  }
}

void write_dataset_csv(std::ostream& out, const std::vector<TrainingSample>& samples,
                       std::size_t devices) {
  const char* groups[] = {"b", "t", "g", "p", "f"};
  for (const char* g : groups)
    for (std::size_t k = 1; k <= devices; ++k) out << g << '_' << k << ',';
  out << "varpi,seed\n";
  for (const auto& s : samples) {
    if (s.x.size() != 3 * devices || s.y.size() != 2 * devices + 1)
      throw std::invalid_argument("write_dataset_csv: sample width does not match devices");
    for (double v : s.x) out << format_double(v) << ',';
    for (double v : s.y) out << format_double(v) << ',';
    out << s.seed << '\n';
  }
}

std::vector<TrainingSample> read_dataset_csv(std::istream& in, std::size_t devices) {
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("dataset CSV: missing header");
  const std::size_t width = 5 * devices + 2;
  if (split_csv_line(line).size() != width)
    throw std::runtime_error("dataset CSV: header does not match the configured device count");
  std::vector<TrainingSample> out;
  std::size_t number = 1;
  while (std::getline(in, line)) {
    ++number;
    if (trim(line).empty()) continue;
    const auto cells = split_csv_line(line);
    if (cells.size() != width)
      throw std::runtime_error("dataset CSV line " + std::to_string(number) + ": expected " +
                               std::to_string(width) + " columns");
    TrainingSample s;
    for (std::size_t i = 0; i < 3 * devices; ++i) s.x.push_back(parse_number("feature", cells[i]));
    for (std::size_t i = 3 * devices; i < width - 1; ++i)
      s.y.push_back(parse_number("target", cells[i]));
    s.seed = std::stoull(cells.back());
    out.push_back(std::move(s));
  }
  return out;
}

Json model_to_json(const Model& model) {
  Json layers = Json::array();
  for (const auto& l : model.params.layers)
    layers.push_back(Json{{"inputs", l.inputs}, {"outputs", l.outputs}, {"weight", l.weight},
                          {"bias", l.bias}});
  Json j;
  j["layer_sizes"] = model.params.sizes();
  j["config"] = config_to_json(model.config);
  j["layers"] = std::move(layers);
  j["x_scaler"] = Json{{"min", model.x_scaler.min}, {"max", model.x_scaler.max}};
  j["y_scaler"] = Json{{"min", model.y_scaler.min}, {"max", model.y_scaler.max}};
  j["power_margin"] = model.power_margin;
  j["training"] = Json{{"train_mse", model.report.train_mse},
                       {"test_mse", model.report.test_mse},
                       {"plateau_epoch", model.report.plateau_epoch},
                       {"best_epoch", model.report.best_epoch}};
  return j;
}

Model model_from_json(const Json& j) {
  Model m;
  m.config = config_from_json(j.at("config"));
  for (const auto& l : j.at("layers")) {
    DenseLayer layer;
    layer.inputs = l.at("inputs").get<std::size_t>();
    layer.outputs = l.at("outputs").get<std::size_t>();
    layer.weight = l.at("weight").get<std::vector<double>>();
    layer.bias = l.at("bias").get<std::vector<double>>();
    if (layer.weight.size() != layer.inputs * layer.outputs || layer.bias.size() != layer.outputs)
      throw std::invalid_argument("model JSON: layer shape mismatch");
    m.params.layers.push_back(std::move(layer));
  }
  if (m.params.sizes() != default_layer_sizes(m.config.devices))
    throw std::invalid_argument("model JSON: layer sizes do not match the device count");
  if (!m.params.all_finite()) throw std::invalid_argument("model JSON: non-finite parameters");
  m.x_scaler.min = j.at("x_scaler").at("min").get<std::vector<double>>();
  m.x_scaler.max = j.at("x_scaler").at("max").get<std::vector<double>>();
  m.y_scaler.min = j.at("y_scaler").at("min").get<std::vector<double>>();
  m.y_scaler.max = j.at("y_scaler").at("max").get<std::vector<double>>();
  m.power_margin = j.at("power_margin").get<double>();
  if (const auto it = j.find("training"); it != j.end()) {
    m.report.train_mse = it->at("train_mse").get<std::vector<double>>();
    m.report.test_mse = it->at("test_mse").get<std::vector<double>>();
    m.report.plateau_epoch = it->at("plateau_epoch").get<std::size_t>();
    m.report.best_epoch = it->at("best_epoch").get<std::size_t>();
  }
  return m;
}

Json load_json(const std::filesystem::path& path) {
  try {
    return Json::parse(read_file(path));
  } catch (const Json::exception& e) {
    throw std::runtime_error(path.string() + ": " + e.what());
  }
}

void save_text(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

}  // namespace cran
