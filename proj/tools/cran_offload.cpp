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

// Command-line front end: scene, solve, sweep, dataset, train, eval, profile.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "cran/harness.hpp"
#include "cran/learner.hpp"
#include "cran/scenario.hpp"
#include "cran/serialize.hpp"
#include "cran/solver.hpp"

using namespace cran;

namespace {

struct Common {
  std::string config_path;
  std::vector<std::string> overrides;
  std::uint64_t seed = 1;
};

void add_common(CLI::App* app, Common& c) {
  app->add_option("-c,--config", c.config_path, "JSON or key = value config file");
  app->add_option("--set", c.overrides, "config override key=value (repeatable)");
  app->add_option("--seed", c.seed, "master or scenario seed");
}

SystemConfig resolve_config(const Common& c) {
  SystemConfig cfg = c.config_path.empty() ? default_config() : load_config(c.config_path);
  for (const auto& kv : c.overrides) apply_config_override(cfg, kv);
  cfg.validate();
  return cfg;
}

void write_output(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
  } else {
    save_text(path, text);
    std::cerr << "wrote " << path << '\n';
  }
}

std::vector<TrainingSample> read_samples(const std::string& path, std::size_t devices) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  return read_dataset_csv(in, devices);
}

Method method_from_string(const std::string& name) {
  for (auto m : {Method::kJoint, Method::kFixedF, Method::kFixedVarpi, Method::kFdsf})
    if (name == to_string(m)) return m;
  throw std::invalid_argument("unknown method '" + name + "'");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Joint power, CPU and fronthaul bit-width allocation for offloading over a "
               "large-array cloud radio access network"};
  app.require_subcommand(1);

  // scene --------------------------------------------------------------------
  Common scene_c;
  std::string scene_out;
  auto* scene = app.add_subcommand("scene", "draw a scenario and dump it as JSON");
  add_common(scene, scene_c);
  scene->add_option("-o,--out", scene_out, "output file (default stdout)");

  // solve --------------------------------------------------------------------
  Common solve_c;
  std::string solve_out, solve_trace, solve_tasks, solve_method = "joint";
  auto* solve = app.add_subcommand("solve", "optimize one scenario");
  add_common(solve, solve_c);
  solve->add_option("-m,--method", solve_method, "joint | fixed-f | fixed-varpi | fdsf");
  solve->add_option("--tasks", solve_tasks, "replace the drawn tasks (JSON or CSV)");
  solve->add_option("-o,--out", solve_out, "solution JSON (default stdout)");
  solve->add_option("--trace", solve_trace, "per-iteration trace CSV");

  // sweep --------------------------------------------------------------------
  Common sweep_c;
  std::string sweep_kind = "power-vs-N", sweep_model, sweep_dir;
  std::vector<double> sweep_values;
  std::size_t sweep_trials = 0, sweep_jobs = 1;
  bool sweep_timing = false;
  auto* sweep = app.add_subcommand("sweep", "run a Monte-Carlo experiment");
  add_common(sweep, sweep_c);
  sweep->add_option("-e,--experiment", sweep_kind,
                    "power-vs-N | power-vs-eta | cdf | dnn-eval | timing");
  sweep->add_option("--values", sweep_values, "sweep values (antennas or eta)");
  sweep->add_option("--trials", sweep_trials, "trials per point (default depends on experiment)");
  sweep->add_option("-j,--jobs", sweep_jobs, "worker threads");
  sweep->add_option("--model", sweep_model, "trained model JSON for the dnn method");
  sweep->add_option("--out-dir", sweep_dir,
                    "output directory (default <results root>/<experiment>/<timestamp>)");
  sweep->add_flag("--timing", sweep_timing, "record wall times (output no longer reproducible)");

  // dataset ------------------------------------------------------------------
  Common ds_c;
  std::size_t ds_count = 5000, ds_jobs = 1;
  std::string ds_out = "dataset.csv";
  auto* dataset = app.add_subcommand("dataset", "solve random instances into a training set");
  add_common(dataset, ds_c);
  dataset->add_option("-n,--count", ds_count, "usable samples to collect");
  dataset->add_option("-j,--jobs", ds_jobs, "worker threads");
  dataset->add_option("-o,--out", ds_out, "dataset CSV");

  // train --------------------------------------------------------------------
  Common tr_c;
  std::string tr_data, tr_out = "model.json";
  std::size_t tr_epochs = 60, tr_calibration = 1000;
  double tr_coverage = 0.95;
  bool tr_shuffle = false, tr_no_stop = false;
  auto* trainer = app.add_subcommand("train", "fit the allocator network to a dataset");
  add_common(trainer, tr_c);
  trainer->add_option("-d,--dataset", tr_data, "dataset CSV")->required();
  trainer->add_option("-o,--out", tr_out, "model JSON");
  trainer->add_option("--epochs", tr_epochs, "maximum epochs");
  trainer->add_option("--coverage", tr_coverage,
                      "fraction of training instances the power margin must make feasible");
  trainer->add_option("--calibration", tr_calibration, "training instances used for the margin");
  trainer->add_flag("--shuffle-labels", tr_shuffle, "control run with permuted targets");
  trainer->add_flag("--no-early-stop", tr_no_stop, "train for all epochs");

  // eval ---------------------------------------------------------------------
  Common ev_c;
  std::string ev_model, ev_data;
  auto* eval = app.add_subcommand("eval", "compare the network with the optimizer on the test split");
  add_common(eval, ev_c);
  eval->add_option("--model", ev_model, "model JSON")->required();
  eval->add_option("-d,--dataset", ev_data, "dataset CSV (the last 10% is evaluated)")->required();

  // profile ------------------------------------------------------------------
  Common pr_c;
  std::string pr_out;
  auto* profile = app.add_subcommand("profile", "per-device allocation table for one scenario");
  add_common(profile, pr_c);
  profile->add_option("-o,--out", pr_out, "CSV (default stdout)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*scene) {
      const SystemConfig cfg = resolve_config(scene_c);
      write_output(scene_out, scenario_to_json(make_scenario(cfg, scene_c.seed)).dump(2) + "\n");
    } else if (*solve) {
      const SystemConfig cfg = resolve_config(solve_c);
      const Method method = method_from_string(solve_method);
      const Scenario sc = make_scenario(cfg, solve_c.seed);
      Instance inst =
          sc.instance(method == Method::kFdsf ? FilterKind::kFullyDigital : FilterKind::kHybrid);
      if (!solve_tasks.empty()) {
        inst.tasks = load_tasks(solve_tasks);
        if (inst.tasks.size() != cfg.devices)
          throw std::invalid_argument("task file must list one task per device");
      }
      Solution sol = method == Method::kFixedF       ? baseline_fixed_f(inst)
                     : method == Method::kFixedVarpi ? baseline_fixed_varpi(inst)
                                                     : alternating_optimize(inst);
      Json j = solution_to_json(sol);
      if (sol.usable()) {
        const AuditReport audit = audit_solution(inst, sol);
        j["audit_passed"] = audit.passed;
        j["latency_s"] = audit.latency;
        j["sinr"] = audit.sinr;
      }
      write_output(solve_out, j.dump(2) + "\n");
      if (!solve_trace.empty()) {
        std::ostringstream t;
        write_trace_csv(t, sol.trace);
        save_text(solve_trace, t.str());
      }
      std::cerr << to_string(sol.status);
      if (sol.usable()) std::cerr << ", total power " << format_double(sol.total_power()) << " W";
      if (!sol.diagnostic.empty()) std::cerr << " (" << sol.diagnostic << ")";
      std::cerr << '\n';
      return sol.usable() ? 0 : 2;
    } else if (*sweep) {
      ExperimentPlan plan = default_plan(experiment_kind_from_string(sweep_kind));
      if (plan.kind == ExperimentKind::kPerDeviceProfile)
        throw std::invalid_argument("use the profile subcommand for per-device tables");
      plan.base = resolve_config(sweep_c);
      plan.master_seed = sweep_c.seed;
      plan.jobs = sweep_jobs;
      if (!sweep_values.empty()) plan.sweep = sweep_values;
      if (sweep_trials > 0) plan.trials = sweep_trials;
      plan.record_timing = plan.record_timing || sweep_timing;
      if (!sweep_model.empty())
        plan.model = std::make_shared<const Model>(model_from_json(load_json(sweep_model)));
      const ExperimentResult result = run_experiment(plan);
      const auto dir = sweep_dir.empty() ? timestamped_dir(results_root(), sweep_kind)
                                         : std::filesystem::path(sweep_dir);
      emit_results(result, dir);
      std::cerr << "wrote " << dir.string() << '\n';
      for (const auto& s : result.summary) {
        std::printf("%-12s %-12s feasible %4zu/%-4zu mean P_sum %.6e W\n",
                    format_double(s.sweep_value).c_str(), to_string(s.method), s.feasible,
                    s.trials, s.mean_p_sum);
      }
      for (const auto& f : result.failures) std::cerr << "failure: " << f << '\n';
      return result.failures.empty() ? 0 : 2;
    } else if (*dataset) {
      const SystemConfig cfg = resolve_config(ds_c);
      DatasetOptions opt;
      opt.jobs = ds_jobs;
      const Dataset ds = generate_dataset(cfg, ds_c.seed, ds_count, opt);
      std::ostringstream out;
      write_dataset_csv(out, ds.samples, cfg.devices);
      save_text(ds_out, out.str());
      std::cerr << "wrote " << ds_out << ": " << ds.samples.size() << " samples from " << ds.draws
                << " draws (" << ds.discarded_seeds.size() << " discarded)\n";
    } else if (*trainer) {
      const SystemConfig cfg = resolve_config(tr_c);
      const auto samples = read_samples(tr_data, cfg.devices);
      std::vector<TrainingSample> train_set, test_set;
      split_dataset(samples, train_set, test_set);
      TrainOptions opt;
      opt.seed = tr_c.seed;
      opt.max_epochs = tr_epochs;
      opt.shuffle_labels = tr_shuffle;
      opt.stop_at_plateau = !tr_no_stop;
      Model model = train(cfg, train_set, test_set, opt);
      const auto cal = instances_from_samples(cfg, train_set, tr_calibration);
      model.power_margin = calibrate_power_margin(model, cal, tr_coverage);
      save_text(tr_out, model_to_json(model).dump() + "\n");
      for (std::size_t e = 0; e < model.report.test_mse.size(); ++e)
        std::printf("epoch %3zu  train %.6e  test %.6e\n", e + 1, model.report.train_mse[e],
                    model.report.test_mse[e]);
      std::printf("plateau epoch %zu, best epoch %zu, power margin %.4f\n",
                  model.report.plateau_epoch, model.report.best_epoch, model.power_margin);
    } else if (*eval) {
      const Model model = model_from_json(load_json(ev_model));
      const auto samples = read_samples(ev_data, model.config.devices);
      std::vector<TrainingSample> train_set, test_set;
      split_dataset(samples, train_set, test_set);
      const EvalReport rep = evaluate_model(model, test_set);
      std::printf("instances %zu\nfeasible %zu (%.1f%%)\nmedian P_sum ratio %.4f\n"
                  "mean inference time %.3e s\n",
                  rep.instances, rep.feasible, 100.0 * rep.feasible / rep.instances,
                  rep.median_power_ratio, rep.mean_inference_s);
    } else if (*profile) {
      const SystemConfig cfg = resolve_config(pr_c);
      const ProfileResult p = per_device_profile(make_scenario(cfg, pr_c.seed).instance());
      write_output(pr_out, profile_csv(p));
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
