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

#pragma once

#include "pass_secmcast/baselines.hpp"
#include "pass_secmcast/config.hpp"
#include "pass_secmcast/multigroup.hpp"
#include "pass_secmcast/pinch_single.hpp"

#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#ifndef PASS_SECMCAST_BUILD_ID
#define PASS_SECMCAST_BUILD_ID "unknown"
#endif

namespace pass::harness {

using json = nlohmann::json;

inline constexpr int kSchemaVersion = 1;

/// Malformed spec or scenario input.
struct InputError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

/// Per-trial seed; shared by every method, system and sweep value of a trial.
inline std::uint64_t trial_seed(std::uint64_t seed, int trial) {
  return splitmix64(seed ^ splitmix64(static_cast<std::uint64_t>(trial) + 1));
}

// ---------------------------------------------------------------------------
// Parameters and specs

/// Scalar deployment parameters as written in spec and scenario files.
struct Params {
  double f_c_hz = 28e9;
  double h_m = 5.0;
  double D_x_m = 20.0;
  double D_y_m = 6.0;
  int M = 4;
  int N = 2;
  int G = 1;
  int K = 2;
  int L = 2;
  int Q = 1000;
  double power_dbm = -20.0;
  double noise_dbm = kDefaultNoiseDbm;
  double n_eff = kDefaultNeff;

  SystemConfig config() const {
    return make_config(f_c_hz, h_m, D_x_m, D_y_m, M, N, Q, dbm_to_watt(power_dbm), G, n_eff);
  }
};

inline void to_json(json& j, const Params& p) {
  j = json{{"f_c_hz", p.f_c_hz}, {"h_m", p.h_m},   {"D_x_m", p.D_x_m}, {"D_y_m", p.D_y_m},
           {"M", p.M},           {"N", p.N},       {"G", p.G},         {"K", p.K},
           {"L", p.L},           {"Q", p.Q},       {"power_dbm", p.power_dbm},
           {"noise_dbm", p.noise_dbm},             {"n_eff", p.n_eff}};
}

inline void from_json(const json& j, Params& p) {
  static const std::vector<std::string> known = {"f_c_hz", "h_m", "D_x_m", "D_y_m", "M", "N", "G",
                                                 "K", "L", "Q", "power_dbm", "noise_dbm", "n_eff"};
  for (const auto& [key, _] : j.items())
    if (std::find(known.begin(), known.end(), key) == known.end()) throw InputError("unknown parameter '" + key + "'");
  p.f_c_hz = j.value("f_c_hz", p.f_c_hz);
  p.h_m = j.value("h_m", p.h_m);
  p.D_x_m = j.value("D_x_m", p.D_x_m);
  p.D_y_m = j.value("D_y_m", p.D_y_m);
  p.M = j.value("M", p.M);
  p.N = j.value("N", p.N);
  p.G = j.value("G", p.G);
  p.K = j.value("K", p.K);
  p.L = j.value("L", p.L);
  p.Q = j.value("Q", p.Q);
  p.power_dbm = j.value("power_dbm", p.power_dbm);
  p.noise_dbm = j.value("noise_dbm", p.noise_dbm);
  p.n_eff = j.value("n_eff", p.n_eff);
}

/// Sets one swept parameter. "iteration" leaves the parameters untouched.
inline void apply_sweep(Params& p, const std::string& name, double v) {
  auto as_int = [&](int& field) {
    if (v != std::floor(v)) throw InputError("sweep '" + name + "' needs integer values");
    field = static_cast<int>(v);
  };
  if (name == "power_dbm") p.power_dbm = v;
  else if (name == "D_x_m") p.D_x_m = v;
  else if (name == "D_y_m") p.D_y_m = v;
  else if (name == "h_m") p.h_m = v;
  else if (name == "M") as_int(p.M);
  else if (name == "N") as_int(p.N);
  else if (name == "G") as_int(p.G);
  else if (name == "K") as_int(p.K);
  else if (name == "L") as_int(p.L);
  else if (name == "Q") as_int(p.Q);
  else if (name != "iteration") throw InputError("unknown sweep variable '" + name + "'");
}

enum class SystemKind { pass, conventional, massive };

inline const char* to_string(SystemKind s) {
  switch (s) {
    case SystemKind::pass: return "pass";
    case SystemKind::conventional: return "conventional";
    case SystemKind::massive: return "massive";
  }
  return "unknown";
}

inline SystemKind parse_system(const std::string& s) {
  if (s == "pass") return SystemKind::pass;
  if (s == "conventional") return SystemKind::conventional;
  if (s == "massive") return SystemKind::massive;
  throw InputError("unknown system '" + s + "' (pass, conventional, massive)");
}

inline TxbfMethod parse_method(const std::string& s) {
  if (s == "sdr") return TxbfMethod::sdr;
  if (s == "dinkelbach_admm") return TxbfMethod::dinkelbach_admm;
  if (s == "mm_sdr") return TxbfMethod::mm_sdr;
  if (s == "socp") return TxbfMethod::socp;
  throw InputError("unknown method '" + s + "' (sdr, dinkelbach_admm, mm_sdr, socp)");
}

inline bool single_group_method(TxbfMethod m) { return m == TxbfMethod::sdr || m == TxbfMethod::dinkelbach_admm; }

/// Optimizer knobs shared by specs, scenarios and the CLI.
struct RunOptions {
  int max_iters = 50;
  double eps = 1e-3;
  std::optional<double> tol;  // overrides the inner solver tolerances
  int supergradient_iters = 2000;
  int randomization_trials = 200;

  AoOptions ao(std::uint64_t seed) const {
    AoOptions o;
    o.max_iters = max_iters;
    o.eps = eps;
    o.seed = seed;
    o.solver.supergradient_iters = supergradient_iters;
    o.solver.randomization_trials = randomization_trials;
    if (tol) {
      o.solver.sdp_gap_tol = *tol;
      o.solver.qcqp_kkt_tol = *tol;
      o.dinkelbach.tol = *tol;
    }
    return o;
  }
};

inline void to_json(json& j, const RunOptions& o) {
  j = json{{"max_iters", o.max_iters},
           {"eps", o.eps},
           {"supergradient_iters", o.supergradient_iters},
           {"randomization_trials", o.randomization_trials}};
  if (o.tol) j["tol"] = *o.tol;
}

inline void from_json(const json& j, RunOptions& o) {
  o.max_iters = j.value("max_iters", o.max_iters);
  o.eps = j.value("eps", o.eps);
  if (j.contains("tol")) o.tol = j.at("tol").get<double>();
  o.supergradient_iters = j.value("supergradient_iters", o.supergradient_iters);
  o.randomization_trials = j.value("randomization_trials", o.randomization_trials);
  if (o.max_iters < 1) throw InputError("max_iters must be >= 1");
  if (!(o.eps > 0.0)) throw InputError("eps must be positive");
}

inline const std::vector<std::string>& figure_families() {
  static const std::vector<std::string> f = {"convergence", "rate_vs_power", "rate_vs_region", "rate_vs_array",
                                             "rate_vs_users"};
  return f;
}

struct ExperimentSpec {
  std::string name;
  std::string family;
  std::string sweep_name;
  std::vector<double> sweep_values;
  Params params;
  int trials = 1;
  std::uint64_t seed = 1;
  std::vector<std::string> methods;
  std::vector<std::string> systems;
  RunOptions run;
  bool timing = true;
};

/// Throws InputError on any inconsistency.
inline void validate_spec(const ExperimentSpec& s) {
  const auto& fam = figure_families();
  if (std::find(fam.begin(), fam.end(), s.family) == fam.end())
    throw InputError("unknown figure family '" + s.family + "'");
  if (s.trials < 1) throw InputError("trials must be >= 1");
  if (s.sweep_values.empty()) throw InputError("sweep needs at least one value");
  if (s.methods.empty() || s.systems.empty()) throw InputError("methods and systems must be non-empty");
  if ((s.family == "convergence") != (s.sweep_name == "iteration"))
    throw InputError("the convergence family sweeps 'iteration' and only it does");
  for (const double v : s.sweep_values) {
    Params p = s.params;
    apply_sweep(p, s.sweep_name, v);
    try {
      (void)p.config();
    } catch (const std::invalid_argument& e) {
      throw InputError(std::string("sweep value gives an invalid configuration: ") + e.what());
    }
    if (p.K < 1 || p.L < 0) throw InputError("need K >= 1 and L >= 0");
    if (p.K < p.G) throw InputError("need K >= G so every group has a member");
    for (const auto& m : s.methods)
      if (single_group_method(parse_method(m)) && p.G != 1)
        throw InputError("method '" + m + "' is single-group but G = " + std::to_string(p.G));
  }
  for (const auto& sys : s.systems) (void)parse_system(sys);
}

inline void to_json(json& j, const ExperimentSpec& s) {
  j = json{{"schema_version", kSchemaVersion},
           {"name", s.name},
           {"figure", s.family},
           {"sweep", {{"name", s.sweep_name}, {"values", s.sweep_values}}},
           {"params", s.params},
           {"trials", s.trials},
           {"seed", s.seed},
           {"methods", s.methods},
           {"systems", s.systems},
           {"solver", s.run},
           {"timing", s.timing}};
}

inline ExperimentSpec spec_from_json(const json& j) {
  try {
    if (j.value("schema_version", 0) != kSchemaVersion)
      throw InputError("schema_version must be " + std::to_string(kSchemaVersion));
    ExperimentSpec s;
    s.family = j.at("figure").get<std::string>();
    s.name = j.value("name", s.family);
    s.sweep_name = j.at("sweep").at("name").get<std::string>();
    s.sweep_values = j.at("sweep").at("values").get<std::vector<double>>();
    if (j.contains("params")) s.params = j.at("params").get<Params>();
    s.trials = j.value("trials", 1);
    s.seed = j.value("seed", std::uint64_t{1});
    s.methods = j.at("methods").get<std::vector<std::string>>();
    s.systems = j.at("systems").get<std::vector<std::string>>();
    if (j.contains("solver")) s.run = j.at("solver").get<RunOptions>();
    s.timing = j.value("timing", true);
    validate_spec(s);
    return s;
  } catch (const json::exception& e) {
    throw InputError(std::string("spec: ") + e.what());
  }
}

inline json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw InputError(path.string() + ": " + e.what());
  }
}

inline ExperimentSpec load_spec(const std::filesystem::path& path) { return spec_from_json(read_json_file(path)); }

// ---------------------------------------------------------------------------
// Scenarios

/// Users uniform over the region; bobs split into G balanced random groups.
inline Scenario generate_scenario(const Params& p, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> ux(0.0, p.D_x_m), uy(0.0, p.D_y_m);
  const double noise = dbm_to_watt(p.noise_dbm);
  Scenario sc;
  sc.groups = p.G;
  for (int k = 0; k < p.K; ++k) {
    const double x = ux(rng);
    sc.bobs.push_back({0, {x, uy(rng), 0.0}, noise});
  }
  for (int l = 0; l < p.L; ++l) {
    const double x = ux(rng);
    sc.eves.push_back({{x, uy(rng), 0.0}, noise});
  }
  std::vector<int> order(static_cast<std::size_t>(p.K));
  for (int k = 0; k < p.K; ++k) order[static_cast<std::size_t>(k)] = k;
  std::shuffle(order.begin(), order.end(), rng);
  for (int i = 0; i < p.K; ++i) sc.bobs[static_cast<std::size_t>(order[static_cast<std::size_t>(i)])].group = i % p.G;
  return sc;
}

inline Scenario generate_scenario(const ExperimentSpec& spec, int trial, double sweep_value) {
  Params p = spec.params;
  apply_sweep(p, spec.sweep_name, sweep_value);
  return generate_scenario(p, trial_seed(spec.seed, trial));
}

/// Self-contained problem instance: parameters, users, optional layout and
/// the optimizer choice. Round-trips through JSON bit-exactly.
struct ScenarioFile {
  Params params;
  Scenario scenario;
  std::optional<Eigen::MatrixXd> layout;
  std::string method = "sdr";
  std::string system = "pass";
  std::uint64_t seed = 0;
  RunOptions run;
};

inline json scenario_to_json(const ScenarioFile& f) {
  json bobs = json::array(), eves = json::array();
  for (const Bob& b : f.scenario.bobs)
    bobs.push_back({{"group", b.group}, {"pos", {b.pos.x(), b.pos.y(), b.pos.z()}}, {"noise_w", b.noise_w}});
  for (const Eve& e : f.scenario.eves)
    eves.push_back({{"pos", {e.pos.x(), e.pos.y(), e.pos.z()}}, {"noise_w", e.noise_w}});
  json j{{"schema_version", kSchemaVersion},
         {"params", f.params},
         {"scenario", {{"groups", f.scenario.groups}, {"bobs", bobs}, {"eves", eves}}},
         {"method", f.method},
         {"system", f.system},
         {"seed", f.seed},
         {"solver", f.run}};
  if (f.layout) {
    json rows = json::array();
    for (Eigen::Index m = 0; m < f.layout->rows(); ++m) {
      std::vector<double> r(static_cast<std::size_t>(f.layout->cols()));
      for (Eigen::Index n = 0; n < f.layout->cols(); ++n) r[static_cast<std::size_t>(n)] = (*f.layout)(m, n);
      rows.push_back(r);
    }
    j["layout"] = {{"x", rows}};
  }
  return j;
}

inline ScenarioFile scenario_from_json(const json& j) {
  try {
    if (j.value("schema_version", 0) != kSchemaVersion)
      throw InputError("schema_version must be " + std::to_string(kSchemaVersion));
    ScenarioFile f;
    if (j.contains("params")) f.params = j.at("params").get<Params>();
    const json& s = j.at("scenario");
    f.scenario.groups = s.value("groups", f.params.G);
    const double noise = dbm_to_watt(f.params.noise_dbm);
    auto pos = [](const json& p) {
      const auto v = p.get<std::vector<double>>();
      if (v.size() != 3) throw InputError("positions need three coordinates");
      return Eigen::Vector3d(v[0], v[1], v[2]);
    };
    for (const json& b : s.at("bobs")) f.scenario.bobs.push_back({b.value("group", 0), pos(b.at("pos")), b.value("noise_w", noise)});
    for (const json& e : s.value("eves", json::array())) f.scenario.eves.push_back({pos(e.at("pos")), e.value("noise_w", noise)});
    f.params.K = static_cast<int>(f.scenario.bobs.size());
    f.params.L = static_cast<int>(f.scenario.eves.size());
    f.params.G = f.scenario.groups;
    if (j.contains("layout")) {
      const auto rows = j.at("layout").at("x").get<std::vector<std::vector<double>>>();
      Eigen::MatrixXd x(static_cast<Eigen::Index>(rows.size()), rows.empty() ? 0 : static_cast<Eigen::Index>(rows[0].size()));
      for (std::size_t m = 0; m < rows.size(); ++m) {
        if (static_cast<Eigen::Index>(rows[m].size()) != x.cols()) throw InputError("layout rows differ in length");
        for (std::size_t n = 0; n < rows[m].size(); ++n) x(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(n)) = rows[m][n];
      }
      f.layout = x;
    }
    f.method = j.value("method", f.method);
    f.system = j.value("system", f.system);
    f.seed = j.value("seed", f.seed);
    if (j.contains("solver")) f.run = j.at("solver").get<RunOptions>();
    return f;
  } catch (const json::exception& e) {
    throw InputError(std::string("scenario: ") + e.what());
  }
}

inline ScenarioFile load_scenario(const std::filesystem::path& path) { return scenario_from_json(read_json_file(path)); }

/// Every problem found in a scenario file: configuration, users, layout.
inline std::vector<std::string> lint_scenario(const ScenarioFile& f) {
  std::vector<std::string> issues;
  SystemConfig cfg;
  try {
    cfg = f.params.config();
  } catch (const std::invalid_argument& e) {
    issues.emplace_back(e.what());
    return issues;
  }
  for (auto& s : validate_scenario(f.scenario, cfg)) issues.push_back(std::move(s));
  if (f.layout) {
    if (f.layout->rows() != cfg.M || f.layout->cols() != cfg.N) {
      issues.push_back("layout is " + std::to_string(f.layout->rows()) + "x" + std::to_string(f.layout->cols()) +
                       ", expected " + std::to_string(cfg.M) + "x" + std::to_string(cfg.N));
    } else {
      for (const auto& v : validate_layout(make_layout(cfg, *f.layout), cfg))
        issues.push_back(std::string(pass::to_string(v.kind)) + " violation at (" + std::to_string(v.m) + "," +
                         std::to_string(v.n) + "): " + std::to_string(v.value));
    }
  }
  try {
    (void)parse_method(f.method);
    (void)parse_system(f.system);
  } catch (const InputError& e) {
    issues.emplace_back(e.what());
  }
  return issues;
}

// ---------------------------------------------------------------------------
// Running

/// Optimizes one instance with the chosen method on the chosen system.
inline AoResult solve_instance(const Params& p, const Scenario& sc, TxbfMethod method, SystemKind system,
                               std::uint64_t seed, const RunOptions& run,
                               const std::optional<Eigen::MatrixXd>& layout = std::nullopt) {
  const SystemConfig cfg = p.config();
  AoOptions opt = run.ao(seed);
  if (system != SystemKind::pass)
    return baseline_optimize(system == SystemKind::massive ? BaselineKind::massive : BaselineKind::conventional, sc,
                             cfg, method, opt);
  if (layout) opt.initial_layout = make_layout(cfg, *layout);
  return single_group_method(method) ? ao_single_group(sc, cfg, method, opt) : ao_multigroup(sc, cfg, method, opt);
}

inline AoResult solve_file(const ScenarioFile& f) {
  return solve_instance(f.params, f.scenario, parse_method(f.method), parse_system(f.system), f.seed, f.run, f.layout);
}

/// Deterministic report of a solved instance (no timings).
inline json report_json(const ScenarioFile& f, const AoResult& r) {
  json beams = json::array();
  for (const auto& w : r.beams) {
    json b = json::array();
    for (Eigen::Index i = 0; i < w.size(); ++i) b.push_back({w(i).real(), w(i).imag()});
    beams.push_back(b);
  }
  json trace = json::array();
  for (const auto& t : r.trace)
    trace.push_back({{"iteration", t.iteration}, {"rate", t.rate}, {"layout_hash", t.layout_hash}});
  json j{{"schema_version", kSchemaVersion},
         {"method", f.method},
         {"system", f.system},
         {"seed", f.seed},
         {"min_rate_bps_hz", r.report.min_rate},
         {"min_rate_unclamped", r.report.min_rate_unclamped},
         {"group_rate", r.report.group_rate},
         {"bob_sinr", r.report.bob_sinr},
         {"eve_sinr", r.report.eve_sinr},
         {"per_user_secrecy", r.report.per_user_secrecy},
         {"iterations", r.iterations},
         {"converged", r.converged},
         {"beams", beams},
         {"trace", trace}};
  if (r.layout) {
    json rows = json::array();
    for (Eigen::Index m = 0; m < r.layout->x.rows(); ++m) {
      json row = json::array();
      for (Eigen::Index n = 0; n < r.layout->x.cols(); ++n) row.push_back(r.layout->x(m, n));
      rows.push_back(row);
    }
    j["layout"] = rows;
  }
  return j;
}

struct Row {
  std::string figure;
  std::string system;
  std::string method;
  std::string sweep_name;
  double sweep_value = 0.0;
  int trial = 0;
  std::uint64_t seed = 0;
  double min_rate = 0.0;
  int iters = 0;
  double wall_ms = 0.0;
  std::string status;
};

inline const char* kCsvHeader =
    "schema_version,figure,system,method,sweep_name,sweep_value,trial,seed,min_rate_bps_hz,iters,wall_ms,status";

inline std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

inline std::string csv_line(const Row& r) {
  std::ostringstream os;
  os << kSchemaVersion << ',' << r.figure << ',' << r.system << ',' << r.method << ',' << r.sweep_name << ','
     << format_double(r.sweep_value) << ',' << r.trial << ',' << r.seed << ',' << format_double(r.min_rate) << ','
     << r.iters << ',' << format_double(r.wall_ms) << ',' << r.status;
  return os.str();
}

/// Worker count: hardware threads, capped by PASS_SECMCAST_THREADS.
inline unsigned worker_count() {
  unsigned n = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("PASS_SECMCAST_THREADS")) {
    const long cap = std::strtol(env, nullptr, 10);
    if (cap >= 1) n = std::min(n, static_cast<unsigned>(cap));
  }
  return n;
}

/// Runs body(i) for i in [0, count) on up to `threads` workers.
template <class Body>
void parallel_for(std::size_t count, unsigned threads, Body&& body) {
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < count; i = next++) body(i);
  };
  const unsigned n = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(count)));
  std::vector<std::thread> pool;
  for (unsigned t = 1; t < n; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
}

struct Failure {
  std::size_t row = 0;
  std::string message;
};

struct ExperimentResult {
  std::vector<Row> rows;
  std::vector<Failure> failures;
  double generate_ms = 0.0;
  double solve_ms = 0.0;
  double write_ms = 0.0;
  unsigned threads = 1;
};

/// All rows of an experiment, ordered by (sweep value, method, system, trial).
inline ExperimentResult run_trials(const ExperimentSpec& spec, unsigned threads = worker_count()) {
  validate_spec(spec);
  using clock = std::chrono::steady_clock;
  ExperimentResult out;
  out.threads = threads;
  const bool convergence = spec.family == "convergence";
  const std::size_t nv = convergence ? 1 : spec.sweep_values.size();

  struct Task {
    std::size_t sweep, method, system;
    int trial;
  };
  std::vector<Task> tasks;
  for (std::size_t v = 0; v < nv; ++v)
    for (std::size_t m = 0; m < spec.methods.size(); ++m)
      for (std::size_t s = 0; s < spec.systems.size(); ++s)
        for (int t = 0; t < spec.trials; ++t) tasks.push_back({v, m, s, t});

  auto t0 = clock::now();
  std::vector<Scenario> scenarios(nv * static_cast<std::size_t>(spec.trials));
  std::vector<Params> params(nv);
  for (std::size_t v = 0; v < nv; ++v) {
    params[v] = spec.params;
    apply_sweep(params[v], spec.sweep_name, spec.sweep_values[v]);
    for (int t = 0; t < spec.trials; ++t)
      scenarios[v * static_cast<std::size_t>(spec.trials) + static_cast<std::size_t>(t)] =
          generate_scenario(params[v], trial_seed(spec.seed, t));
  }
  out.generate_ms = std::chrono::duration<double, std::milli>(clock::now() - t0).count();

  t0 = clock::now();
  std::vector<std::vector<Row>> per_task(tasks.size());
  std::vector<std::string> errors(tasks.size());
  parallel_for(tasks.size(), threads, [&](std::size_t i) {
    const Task& k = tasks[i];
    Row base;
    base.figure = spec.name;
    base.system = spec.systems[k.system];
    base.method = spec.methods[k.method];
    base.sweep_name = spec.sweep_name;
    base.sweep_value = spec.sweep_values[k.sweep];
    base.trial = k.trial;
    base.seed = trial_seed(spec.seed, k.trial);
    const auto start = clock::now();
    try {
      const Scenario& sc = scenarios[k.sweep * static_cast<std::size_t>(spec.trials) + static_cast<std::size_t>(k.trial)];
      const AoResult r = solve_instance(params[k.sweep], sc, parse_method(base.method), parse_system(base.system),
                                        base.seed, spec.run);
      const double ms = std::chrono::duration<double, std::milli>(clock::now() - start).count();
      const std::string status = r.converged ? "ok" : "max_iters";
      if (convergence) {
        double acc = 0.0;
        std::size_t it = 0;
        for (const double iv : spec.sweep_values) {
          const auto want = static_cast<std::size_t>(std::max(0.0, iv));
          for (; it < r.trace.size() && it <= want; ++it) acc += r.trace[it].txbf_ms + r.trace[it].pinch_ms;
          Row row = base;
          row.sweep_value = iv;
          const std::size_t idx = std::min(want, r.trace.size() - 1);
          row.min_rate = r.trace[idx].rate;
          row.iters = static_cast<int>(idx);
          row.wall_ms = spec.timing ? acc : 0.0;
          row.status = status;
          per_task[i].push_back(row);
        }
      } else {
        base.min_rate = r.report.min_rate;
        base.iters = r.iterations;
        base.wall_ms = spec.timing ? ms : 0.0;
        base.status = status;
        per_task[i].push_back(base);
      }
    } catch (const std::exception& e) {
      errors[i] = e.what();
      if (convergence) {
        for (const double iv : spec.sweep_values) {
          Row row = base;
          row.sweep_value = iv;
          row.status = "error";
          per_task[i].push_back(row);
        }
      } else {
        base.status = "error";
        per_task[i].push_back(base);
      }
    }
  });
  out.solve_ms = std::chrono::duration<double, std::milli>(clock::now() - t0).count();

  for (std::size_t i = 0; i < tasks.size(); ++i) {
    if (!errors[i].empty()) out.failures.push_back({out.rows.size(), errors[i]});
    for (auto& r : per_task[i]) out.rows.push_back(std::move(r));
  }
  if (convergence) {
    // Order by iteration first, like every other sweep.
    std::stable_sort(out.rows.begin(), out.rows.end(),
                     [](const Row& a, const Row& b) { return a.sweep_value < b.sweep_value; });
  }
  return out;
}

struct AggregateRow {
  std::string figure, system, method, sweep_name;
  double sweep_value = 0.0;
  int trials = 0;
  int failures = 0;
  double mean_rate = 0.0;
  double mean_iters = 0.0;
  double mean_wall_ms = 0.0;
};

/// Means over successful rows per (sweep value, method, system).
inline std::vector<AggregateRow> aggregate(const std::vector<Row>& rows) {
  std::vector<AggregateRow> out;
  std::map<std::tuple<double, std::string, std::string>, std::size_t> index;
  for (const Row& r : rows) {
    const auto key = std::make_tuple(r.sweep_value, r.method, r.system);
    auto it = index.find(key);
    if (it == index.end()) {
      it = index.emplace(key, out.size()).first;
      out.push_back({r.figure, r.system, r.method, r.sweep_name, r.sweep_value});
    }
    AggregateRow& a = out[it->second];
    if (r.status == "error") {
      ++a.failures;
      continue;
    }
    ++a.trials;
    a.mean_rate += r.min_rate;
    a.mean_iters += r.iters;
    a.mean_wall_ms += r.wall_ms;
  }
  for (auto& a : out)
    if (a.trials > 0) {
      a.mean_rate /= a.trials;
      a.mean_iters /= a.trials;
      a.mean_wall_ms /= a.trials;
    }
  return out;
}

inline const char* kAggregateHeader =
    "schema_version,figure,system,method,sweep_name,sweep_value,trials,failures,mean_min_rate_bps_hz,mean_iters,"
    "mean_wall_ms";

inline std::string aggregate_line(const AggregateRow& a) {
  std::ostringstream os;
  os << kSchemaVersion << ',' << a.figure << ',' << a.system << ',' << a.method << ',' << a.sweep_name << ','
     << format_double(a.sweep_value) << ',' << a.trials << ',' << a.failures << ',' << format_double(a.mean_rate)
     << ',' << format_double(a.mean_iters) << ',' << format_double(a.mean_wall_ms);
  return os.str();
}

inline std::string axis_label(const std::string& sweep) {
  if (sweep == "power_dbm") return "Transmit power (dBm)";
  if (sweep == "D_x_m") return "Side length D_x (m)";
  if (sweep == "D_y_m") return "Side length D_y (m)";
  if (sweep == "iteration") return "AO iteration";
  if (sweep == "M") return "Number of waveguides M";
  if (sweep == "N") return "PAs per waveguide N";
  if (sweep == "K") return "Number of Bobs K";
  if (sweep == "L") return "Number of Eves L";
  return sweep;
}

/// Matplotlib script that plots aggregate.csv (one line per system/method).
inline std::string plot_script(const ExperimentSpec& spec) {
  std::ostringstream os;
  os << "#!/usr/bin/env python3\n"
        "# Plots the aggregate CSV written next to this script.\n"
        "import csv\n"
        "import pathlib\n"
        "import sys\n\n"
        "import matplotlib\n"
        "matplotlib.use(\"Agg\")\n"
        "import matplotlib.pyplot as plt\n\n"
        "here = pathlib.Path(__file__).resolve().parent\n"
        "series = {}\n"
        "with open(here / \"aggregate.csv\", newline=\"\") as f:\n"
        "    for row in csv.DictReader(f):\n"
        "        key = (row[\"system\"], row[\"method\"])\n"
        "        series.setdefault(key, []).append((float(row[\"sweep_value\"]), float(row[\"mean_min_rate_bps_hz\"])))\n\n"
        "markers = {\"pass\": \"o\", \"massive\": \"s\", \"conventional\": \"^\"}\n"
        "fig, ax = plt.subplots(figsize=(5, 3.6))\n"
        "for (system, method), pts in sorted(series.items()):\n"
        "    pts.sort()\n"
        "    ax.plot([p[0] for p in pts], [p[1] for p in pts], marker=markers.get(system, \"x\"),\n"
        "            label=f\"{system} / {method}\")\n"
     << "ax.set_xlabel(\"" << axis_label(spec.sweep_name) << "\")\n"
     << "ax.set_ylabel(\"Secrecy multicast rate (bit/s/Hz)\")\n"
     << "ax.set_title(\"" << spec.name << "\")\n"
     << "ax.grid(True, alpha=0.3)\n"
        "ax.legend(fontsize=8)\n"
        "fig.tight_layout()\n"
        "out = sys.argv[1] if len(sys.argv) > 1 else str(here / \""
     << spec.name << ".pdf\")\n"
        "fig.savefig(out)\n";
  return os.str();
}

struct WrittenExperiment {
  ExperimentResult result;
  std::filesystem::path rows_csv, aggregate_csv, plot_py, manifest_json;
};

/// Runs the spec and writes results.csv, aggregate.csv, plot.py and
/// manifest.json into out_dir. With dump_scenarios every instance is also
/// saved as a solvable scenario file.
inline WrittenExperiment run_experiment(const ExperimentSpec& spec, const std::filesystem::path& out_dir,
                                        unsigned threads = worker_count(), bool dump_scenarios = false) {
  namespace fs = std::filesystem;
  WrittenExperiment w;
  w.result = run_trials(spec, threads);
  const auto t0 = std::chrono::steady_clock::now();
  fs::create_directories(out_dir);
  w.rows_csv = out_dir / "results.csv";
  w.aggregate_csv = out_dir / "aggregate.csv";
  w.plot_py = out_dir / "plot.py";
  w.manifest_json = out_dir / "manifest.json";
  auto open = [](const fs::path& p) {
    std::ofstream f(p, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write " + p.string());
    return f;
  };
  {
    auto f = open(w.rows_csv);
    f << kCsvHeader << '\n';
    for (const Row& r : w.result.rows) f << csv_line(r) << '\n';
  }
  {
    auto f = open(w.aggregate_csv);
    f << kAggregateHeader << '\n';
    for (const auto& a : aggregate(w.result.rows)) f << aggregate_line(a) << '\n';
  }
  {
    auto f = open(w.plot_py);
    f << plot_script(spec);
  }
  if (dump_scenarios) {
    const fs::path dir = out_dir / "scenarios";
    fs::create_directories(dir);
    const std::size_t nv = spec.family == "convergence" ? 1 : spec.sweep_values.size();
    for (std::size_t v = 0; v < nv; ++v)
      for (int t = 0; t < spec.trials; ++t)
        for (const auto& m : spec.methods)
          for (const auto& s : spec.systems) {
            ScenarioFile f;
            f.params = spec.params;
            apply_sweep(f.params, spec.sweep_name, spec.sweep_values[v]);
            f.scenario = generate_scenario(f.params, trial_seed(spec.seed, t));
            f.method = m;
            f.system = s;
            f.seed = trial_seed(spec.seed, t);
            f.run = spec.run;
            auto out = open(dir / ("v" + std::to_string(v) + "_t" + std::to_string(t) + "_" + m + "_" + s + ".json"));
            out << scenario_to_json(f).dump(2) << '\n';
          }
  }
  w.result.write_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();

  json seeds = json::array();
  for (int t = 0; t < spec.trials; ++t) seeds.push_back({{"trial", t}, {"seed", trial_seed(spec.seed, t)}});
  json failures = json::array();
  for (const auto& f : w.result.failures) failures.push_back({{"row", f.row}, {"message", f.message}});
  const AoOptions ao = spec.run.ao(0);
  const json manifest{
      {"schema_version", kSchemaVersion},
      {"build_id", PASS_SECMCAST_BUILD_ID},
      {"spec", spec},
      {"trial_seeds", seeds},
      {"solver",
       {{"sdp_feas_tol", ao.solver.sdp_feas_tol},
        {"sdp_gap_tol", ao.solver.sdp_gap_tol},
        {"sdp_max_iters", ao.solver.sdp_max_iters},
        {"qcqp_kkt_tol", ao.solver.qcqp_kkt_tol},
        {"qcqp_max_newton", ao.solver.qcqp_max_newton},
        {"supergradient_iters", ao.solver.supergradient_iters},
        {"randomization_trials", ao.solver.randomization_trials},
        {"dinkelbach_tol", ao.dinkelbach.tol},
        {"dinkelbach_outer_iters", ao.dinkelbach.outer_iters},
        {"admm_inner_iters", ao.dinkelbach.inner_iters},
        {"ao_max_iters", ao.max_iters},
        {"ao_eps", ao.eps}}},
      {"threads", w.result.threads},
      {"stage_ms",
       {{"generate", w.result.generate_ms}, {"solve", w.result.solve_ms}, {"write", w.result.write_ms}}},
      {"rows", w.result.rows.size()},
      {"failures", failures},
      {"outputs", {"results.csv", "aggregate.csv", "plot.py"}}};
  auto f = open(w.manifest_json);
  f << manifest.dump(2) << '\n';
  return w;
}

}  // namespace pass::harness
