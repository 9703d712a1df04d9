// SPDX-License-Identifier: Apache-2.0
//
// pass-secmcast: secure multicast beamforming for pinching-antenna systems
// Copyright (C) 2026 The pass-secmcast authors
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

// Command-line front end: solve, experiment, validate, trace.

#include "pass_secmcast/harness.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>
#include <optional>
#include <string>

namespace {

using pass::harness::json;

enum Exit { kOk = 0, kRuntime = 1, kUsage = 2, kInput = 3 };

int fail(const std::string& kind, const std::string& message, int code) {
  std::cerr << json{{"error", message}, {"kind", kind}}.dump() << '\n';
  return code;
}

struct Overrides {
  std::optional<std::uint64_t> seed;
  std::optional<std::string> method;
  std::optional<std::string> system;
  std::optional<double> power_dbm;
  std::optional<double> tol;
  std::optional<int> max_iters;
};

void add_overrides(CLI::App* app, Overrides& o) {
  app->add_option("--seed", o.seed, "RNG seed");
  app->add_option("--method", o.method, "sdr | dinkelbach_admm | mm_sdr | socp");
  app->add_option("--system", o.system, "pass | massive | conventional");
  app->add_option("--power-dbm", o.power_dbm, "Transmit power in dBm");
  app->add_option("--tol", o.tol, "Inner solver tolerance");
  app->add_option("--max-iters", o.max_iters, "AO iteration cap");
}

pass::harness::ScenarioFile load_with(const std::string& path, const Overrides& o) {
  auto f = pass::harness::load_scenario(path);
  if (o.seed) f.seed = *o.seed;
  if (o.method) f.method = *o.method;
  if (o.system) f.system = *o.system;
  if (o.power_dbm) f.params.power_dbm = *o.power_dbm;
  if (o.tol) f.run.tol = *o.tol;
  if (o.max_iters) f.run.max_iters = *o.max_iters;
  return f;
}

void require_valid(const pass::harness::ScenarioFile& f) {
  const auto issues = pass::harness::lint_scenario(f);
  if (!issues.empty()) throw pass::harness::InputError(issues.front());
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Secure multicast beamforming and pinching-antenna placement"};
  app.require_subcommand(1);

  Overrides solve_o, trace_o, exp_o;
  std::string solve_in, trace_in, validate_in, spec_in, out_dir = "out", out_file;
  std::optional<int> trials;
  std::optional<unsigned> threads;
  bool dump = false, no_timing = false;

  auto* solve = app.add_subcommand("solve", "Optimize one scenario file and print a JSON report");
  solve->add_option("scenario", solve_in, "Scenario JSON")->required();
  solve->add_option("-o,--output", out_file, "Write the report here instead of stdout");
  add_overrides(solve, solve_o);

  auto* trace = app.add_subcommand("trace", "Optimize one scenario and print the AO trace as CSV");
  trace->add_option("scenario", trace_in, "Scenario JSON")->required();
  add_overrides(trace, trace_o);

  auto* validate = app.add_subcommand("validate", "Check a scenario file and its optional layout");
  validate->add_option("scenario", validate_in, "Scenario JSON")->required();

  auto* experiment = app.add_subcommand("experiment", "Run a figure spec and write CSV, plot script and manifest");
  experiment->add_option("spec", spec_in, "Experiment spec JSON")->required();
  experiment->add_option("--out-dir", out_dir, "Output directory");
  experiment->add_option("--trials", trials, "Override the trial count");
  experiment->add_option("--threads", threads, "Worker threads");
  experiment->add_flag("--dump-scenarios", dump, "Also save every instance as a scenario file");
  experiment->add_flag("--no-timing", no_timing, "Write zero wall-clock columns");
  add_overrides(experiment, exp_o);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return fail("usage", e.what(), kUsage);
  }

  try {
    if (*solve) {
      const auto f = load_with(solve_in, solve_o);
      require_valid(f);
      const auto r = pass::harness::solve_file(f);
      const std::string text = pass::harness::report_json(f, r).dump(2) + "\n";
      if (out_file.empty()) {
        std::cout << text;
      } else {
        std::ofstream out(out_file, std::ios::binary);
        if (!out) throw std::runtime_error("cannot write " + out_file);
        out << text;
      }
      return kOk;
    }
    if (*trace) {
      const auto f = load_with(trace_in, trace_o);
      require_valid(f);
      const auto r = pass::harness::solve_file(f);
      std::cout << "iteration,rate_bps_hz,rate_unclamped,layout_hash,txbf_ms,pinch_ms\n";
      for (const auto& t : r.trace)
        std::cout << t.iteration << ',' << pass::harness::format_double(t.rate) << ','
                  << pass::harness::format_double(t.rate_unclamped) << ',' << t.layout_hash << ','
                  << pass::harness::format_double(t.txbf_ms) << ',' << pass::harness::format_double(t.pinch_ms)
                  << '\n';
      return kOk;
    }
    if (*validate) {
      const auto f = pass::harness::load_scenario(validate_in);
      const auto issues = pass::harness::lint_scenario(f);
      std::cout << json{{"valid", issues.empty()}, {"violations", issues}}.dump(2) << '\n';
      return issues.empty() ? kOk : kInput;
    }
    if (*experiment) {
      auto spec = pass::harness::load_spec(spec_in);
      if (trials) spec.trials = *trials;
      if (exp_o.seed) spec.seed = *exp_o.seed;
      if (exp_o.method) spec.methods = {*exp_o.method};
      if (exp_o.system) spec.systems = {*exp_o.system};
      if (exp_o.power_dbm) spec.params.power_dbm = *exp_o.power_dbm;
      if (exp_o.tol) spec.run.tol = *exp_o.tol;
      if (exp_o.max_iters) spec.run.max_iters = *exp_o.max_iters;
      if (no_timing) spec.timing = false;
      pass::harness::validate_spec(spec);
      const auto w = pass::harness::run_experiment(spec, out_dir, threads.value_or(pass::harness::worker_count()), dump);
      std::cerr << w.result.rows.size() << " rows, " << w.result.failures.size() << " failures -> "
                << w.rows_csv.string() << '\n';
      return w.result.failures.empty() ? kOk : kRuntime;
    }
  } catch (const pass::harness::InputError& e) {
    return fail("input", e.what(), kInput);
  } catch (const std::invalid_argument& e) {
    return fail("input", e.what(), kInput);
  } catch (const std::exception& e) {
    return fail("runtime", e.what(), kRuntime);
  }
  return kUsage;
}
