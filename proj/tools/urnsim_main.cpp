#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "urnsim/analysis.hpp"
#include "urnsim/csv.hpp"
#include "urnsim/ctmc.hpp"
#include "urnsim/discrete.hpp"
#include "urnsim/feedback.hpp"
#include "urnsim/manifest.hpp"
#include "urnsim/master.hpp"
#include "urnsim/stable_sum.hpp"
#include "urnsim/tail_curve.hpp"
#include "urnsim/version.hpp"

namespace {

using nlohmann::json;

// command-line contract violations CLI11 cannot see on its own
// (cross-option requirements, bad list syntax, unknown config keys)
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

json load_config(const std::string& path) {
  if (path.empty()) return json::object();
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config " + path);
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw UsageError("config " + path + ": " + e.what());
  }
  if (!j.is_object())
    throw UsageError("config " + path + " must hold a JSON object");
  return j;
}

void check_config_keys(const json& cfg,
                       std::initializer_list<const char*> allowed) {
  for (auto it = cfg.begin(); it != cfg.end(); ++it) {
    if (it.key() == "command") continue;  // self-documentation, not a param
    bool known = false;
    for (const char* k : allowed)
      if (it.key() == k) {
        known = true;
        break;
      }
    if (!known)
      throw UsageError("config key '" + it.key() + "' is not recognized here");
  }
}

// config stand-ins for list-valued flags may be strings, numbers, or arrays;
// normalize to the comma-separated form the flag parser expects
std::string as_list_string(const json& v) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_number()) return v.dump();
  if (v.is_array()) {
    std::string out;
    for (const auto& e : v) {
      if (!out.empty()) out += ',';
      out += e.is_string() ? e.get<std::string>() : e.dump();
    }
    return out;
  }
  throw UsageError("config value " + v.dump() + " cannot be read as a list");
}

// flags override config values: only fill from config when the flag is absent
template <typename T>
void merge_value(const CLI::App& cmd, const json& cfg, const std::string& flag,
                 const std::string& key, T& var) {
  if (cmd.count(flag) > 0 || !cfg.contains(key)) return;
  try {
    var = cfg.at(key).get<T>();
  } catch (const json::exception&) {
    throw UsageError("config key '" + key + "' has the wrong type");
  }
}

void merge_list(const CLI::App& cmd, const json& cfg, const std::string& flag,
                const std::string& key, std::string& var) {
  if (cmd.count(flag) > 0 || !cfg.contains(key)) return;
  var = as_list_string(cfg.at(key));
}

bool provided(const CLI::App& cmd, const json& cfg, const std::string& flag,
              const std::string& key) {
  return cmd.count(flag) > 0 || cfg.contains(key);
}

std::string join_path(const std::string& dir, const std::string& name) {
  return (std::filesystem::path(dir) / name).string();
}

// precedence: --out-dir flag > config out_dir > URNSIM_OUT_DIR > cwd
std::string prepare_out_dir(std::string dir) {
  if (dir.empty()) {
    const char* env = std::getenv("URNSIM_OUT_DIR");
    dir = env != nullptr && *env != '\0' ? env : ".";
  }
  std::filesystem::create_directories(dir);
  return dir;
}

// rounds accumulated range points back to their decimal intent, so a
// 0.1-step grid yields 0.3 rather than 0.30000000000000004 (the artifact
// would otherwise leak into output filenames)
double snap_decimal(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return std::strtod(buf, nullptr);
}

// "start:stop:step" inclusive range, or a comma-separated list
std::vector<double> parse_grid(const std::string& text) {
  try {
    if (text.find(':') != std::string::npos) {
      const auto parts = urnsim::split(text, ':');
      if (parts.size() != 3)
        throw UsageError("ranges take the form start:stop:step");
      const double start = urnsim::parse_double(parts[0]);
      const double stop = urnsim::parse_double(parts[1]);
      const double step = urnsim::parse_double(parts[2]);
      if (!(step > 0.0) || stop < start)
        throw UsageError("need start <= stop and step > 0");
      std::vector<double> out;
      const auto n = static_cast<std::size_t>((stop - start) / step + 1e-9);
      out.reserve(n + 1);
      for (std::size_t k = 0; k <= n; ++k)
        out.push_back(k == 0 ? start
                             : snap_decimal(start +
                                            static_cast<double>(k) * step));
      return out;
    }
    std::vector<double> out;
    for (const std::string& tok : urnsim::split(text, ','))
      out.push_back(urnsim::parse_double(tok));
    return out;
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
}

// whole numbers >= 1, accepting scientific notation like 1e6
std::vector<std::uint64_t> parse_index_list(const std::string& text) {
  std::vector<std::uint64_t> out;
  for (double v : parse_grid(text)) {
    if (!(v >= 1.0) || v != std::floor(v) || v > 9.007199254740992e15)
      throw UsageError("expected whole numbers >= 1, got " +
                       urnsim::format_double(v));
    out.push_back(static_cast<std::uint64_t>(v));
  }
  return out;
}

// one manifest per run, listing every file the run produced
struct OutputBatch {
  urnsim::RunManifest manifest;
  std::string dir;

  OutputBatch(std::string command, std::string out_dir)
      : dir(std::move(out_dir)) {
    manifest.command = std::move(command);
    manifest.tool_version = urnsim::kVersion;
    manifest.started_at = urnsim::iso8601_now();
  }

  std::string path(const std::string& name) const {
    return join_path(dir, name);
  }

  void record(const std::string& written_path) {
    manifest.outputs.push_back(written_path);
    std::cout << "wrote " << written_path << '\n';
  }

  void finish(const std::string& manifest_name) {
    manifest.finished_at = urnsim::iso8601_now();
    const std::string p = path(manifest_name);
    manifest.write(p);
    std::cout << "wrote " << p << '\n';
  }
};

void write_json_file(const std::string& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  out << j.dump(2) << '\n';
  if (!out) throw std::runtime_error("failed writing " + path);
}

// ---------------------------------------------------------------- discrete

struct DiscreteOpts {
  CLI::App* cmd = nullptr;
  std::string config, out_dir;
  std::uint64_t num_agents = 0;
  double gamma = 0.0;
  double eta = 1.0;
  std::string checkpoints, init;
  std::uint64_t seed = 0;
  bool unbounded = false;
};

int run_simulate_discrete(const DiscreteOpts& opts) {
  const json cfg = load_config(opts.config);
  check_config_keys(cfg, {"N", "gamma", "eta", "checkpoints", "init", "seed",
                          "unbounded", "out_dir"});
  DiscreteOpts v = opts;
  const CLI::App& cmd = *opts.cmd;
  merge_value(cmd, cfg, "--N", "N", v.num_agents);
  merge_value(cmd, cfg, "--gamma", "gamma", v.gamma);
  merge_value(cmd, cfg, "--eta", "eta", v.eta);
  merge_list(cmd, cfg, "--checkpoints", "checkpoints", v.checkpoints);
  merge_list(cmd, cfg, "--init", "init", v.init);
  merge_value(cmd, cfg, "--seed", "seed", v.seed);
  merge_value(cmd, cfg, "--unbounded", "unbounded", v.unbounded);
  merge_value(cmd, cfg, "--out-dir", "out_dir", v.out_dir);

  if (!provided(cmd, cfg, "--N", "N")) throw UsageError("--N is required");
  if (!provided(cmd, cfg, "--gamma", "gamma"))
    throw UsageError("--gamma is required");
  if (!provided(cmd, cfg, "--checkpoints", "checkpoints"))
    throw UsageError("--checkpoints is required");

  urnsim::SimConfig sim;
  sim.num_agents = v.num_agents;
  sim.feedback = urnsim::FeedbackFunction::power_law(v.eta, v.gamma);
  sim.checkpoints = parse_index_list(v.checkpoints);
  sim.seed = v.seed;
  if (!v.init.empty()) sim.initial_counts = parse_index_list(v.init);

  if (!v.unbounded && !sim.checkpoints.empty() &&
      sim.checkpoints.back() > 100'000'000ULL)
    throw UsageError(
        "runs past 1e8 iterations take minutes to hours; pass --unbounded to "
        "confirm");

  const std::string dir = prepare_out_dir(v.out_dir);
  OutputBatch batch("simulate-discrete", dir);
  batch.manifest.seed = v.seed;
  batch.manifest.parameters = {
      {"N", v.num_agents},          {"gamma", v.gamma},
      {"eta", v.eta},               {"checkpoints", sim.checkpoints},
      {"seed", v.seed},             {"unbounded", v.unbounded},
      {"out_dir", dir}};
  if (!sim.initial_counts.empty())
    batch.manifest.parameters["init"] = sim.initial_counts;

  const std::vector<urnsim::Snapshot> snapshots = urnsim::run(sim);

  {
    const std::string p = batch.path("counts.csv");
    std::ofstream out(p);
    if (!out) throw std::runtime_error("cannot open " + p + " for writing");
    out << "iteration,agent,count\n";
    for (const urnsim::Snapshot& s : snapshots)
      for (std::size_t i = 0; i < s.counts.size(); ++i)
        out << s.iteration << ',' << i << ',' << s.counts[i] << '\n';
    if (!out) throw std::runtime_error("failed writing " + p);
    batch.record(p);
  }
  for (const urnsim::Snapshot& s : snapshots) {
    const std::string p =
        batch.path("tail_" + std::to_string(s.iteration) + ".csv");
    urnsim::write_tail_csv(p, urnsim::empirical_tail(s.counts));
    batch.record(p);
  }
  batch.finish("discrete_manifest.json");
  return 0;
}

// ------------------------------------------------------------------ losers

struct LoserOpts {
  CLI::App* cmd = nullptr;
  std::string config, out_dir;
  double gamma = 0.0;
  double eta = 1.0;
  std::uint64_t omega0 = 1;
  std::uint64_t n_sims = 10000;
  std::uint64_t omega_max = 10000;
  std::string time_cap;
  std::uint64_t seed = 0;
  unsigned parallel = 1;
};

json loser_meta(double t_cap, std::uint64_t omega_max, std::uint64_t n_sims,
                std::size_t n_losers, std::uint64_t n_exploded,
                std::uint64_t seed) {
  return json{{"t_M", t_cap},           {"omega_M", omega_max},
              {"n_sims", n_sims},       {"n_losers", n_losers},
              {"n_exploded", n_exploded}, {"seed", seed}};
}

void write_count_csv(const std::string& path,
                     const std::vector<std::uint64_t>& counts) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  out << "final_count\n";
  for (std::uint64_t c : counts) out << c << '\n';
  if (!out) throw std::runtime_error("failed writing " + path);
}

int run_simulate_losers(const LoserOpts& opts) {
  const json cfg = load_config(opts.config);
  check_config_keys(cfg, {"gamma", "eta", "omega0", "n_sims", "omega_max",
                          "tM", "seed", "parallel", "out_dir"});
  LoserOpts v = opts;
  const CLI::App& cmd = *opts.cmd;
  merge_value(cmd, cfg, "--gamma", "gamma", v.gamma);
  merge_value(cmd, cfg, "--eta", "eta", v.eta);
  merge_value(cmd, cfg, "--omega0", "omega0", v.omega0);
  merge_value(cmd, cfg, "--n-sims", "n_sims", v.n_sims);
  merge_value(cmd, cfg, "--omega-max", "omega_max", v.omega_max);
  merge_list(cmd, cfg, "--tM", "tM", v.time_cap);
  merge_value(cmd, cfg, "--seed", "seed", v.seed);
  merge_value(cmd, cfg, "--parallel", "parallel", v.parallel);
  merge_value(cmd, cfg, "--out-dir", "out_dir", v.out_dir);

  if (!provided(cmd, cfg, "--gamma", "gamma"))
    throw UsageError("--gamma is required");
  if (!provided(cmd, cfg, "--tM", "tM")) throw UsageError("--tM is required");

  const urnsim::FeedbackFunction f =
      urnsim::FeedbackFunction::power_law(v.eta, v.gamma);

  std::vector<double> caps;
  if (v.time_cap == "auto") {
    if (!(v.gamma > 1.0))
      throw std::domain_error(
          "--tM auto uses the explosion-time lower bound, which needs "
          "gamma > 1");
    caps.push_back(urnsim::explosion_time_bounds(f, v.omega0).lower);
  } else {
    caps = parse_grid(v.time_cap);
  }

  const std::string dir = prepare_out_dir(v.out_dir);
  OutputBatch batch("simulate-losers", dir);
  batch.manifest.seed = v.seed;
  batch.manifest.parameters = {
      {"gamma", v.gamma},   {"eta", v.eta},
      {"omega0", v.omega0}, {"n_sims", v.n_sims},
      {"omega_max", v.omega_max}, {"tM", caps},
      {"seed", v.seed},     {"parallel", v.parallel},
      {"out_dir", dir}};
  if (v.time_cap == "auto")
    batch.manifest.notes.push_back("tM auto resolved to " +
                                   urnsim::format_double(caps.front()));

  if (caps.size() == 1) {
    const urnsim::LoserSample sample = urnsim::aggregate_losers(
        f, v.omega0, caps.front(), v.omega_max, v.n_sims, v.seed, v.parallel);

    const std::string losers_path = batch.path("losers.csv");
    write_count_csv(losers_path, sample.counts);
    batch.record(losers_path);

    const std::string meta_path = batch.path("losers_meta.json");
    write_json_file(meta_path,
                    loser_meta(sample.time_cap, sample.ball_cap, sample.n_sims,
                               sample.counts.size(), sample.n_exploded,
                               sample.seed));
    batch.record(meta_path);

    if (!sample.counts.empty()) {
      const std::string tail_path = batch.path("loser_tail.csv");
      urnsim::write_tail_csv(tail_path, urnsim::empirical_tail(sample.counts));
      batch.record(tail_path);
    } else {
      batch.manifest.notes.push_back("no losers at this time cap");
    }
  } else {
    const std::vector<urnsim::CapSweepPoint> sweep = urnsim::sweep_time_caps(
        f, v.omega0, caps, v.omega_max, v.n_sims, v.seed, v.parallel);
    for (const urnsim::CapSweepPoint& point : sweep) {
      const std::string suffix = "_tM" + urnsim::format_double(point.time_cap);

      const std::string losers_path = batch.path("losers" + suffix + ".csv");
      write_count_csv(losers_path, point.loser_counts);
      batch.record(losers_path);

      const std::string meta_path =
          batch.path("losers_meta" + suffix + ".json");
      write_json_file(meta_path, loser_meta(point.time_cap, v.omega_max,
                                            v.n_sims, point.loser_counts.size(),
                                            point.n_exploded, v.seed));
      batch.record(meta_path);

      if (!point.loser_counts.empty()) {
        const std::string tail_path =
            batch.path("loser_tail" + suffix + ".csv");
        urnsim::write_tail_csv(tail_path,
                               urnsim::empirical_tail(point.loser_counts));
        batch.record(tail_path);
      } else {
        batch.manifest.notes.push_back(
            "no losers at tM=" + urnsim::format_double(point.time_cap));
      }

      const std::string all_path = batch.path("all_tail" + suffix + ".csv");
      urnsim::write_tail_csv(all_path,
                             urnsim::empirical_tail(point.all_counts));
      batch.record(all_path);
    }
  }
  batch.finish("losers_manifest.json");
  return 0;
}

// ------------------------------------------------------------------ master

struct MasterOpts {
  CLI::App* cmd = nullptr;
  std::string config, out_dir;
  double gamma = 0.0;
  double eta = 1.0;
  std::uint64_t omega0 = 1;
  std::uint64_t omega_max = 0;
  std::string t_grid;
  bool approx = false;
  bool tail = false;
  bool dump_coeffs = false;
};

int run_solve_master(const MasterOpts& opts) {
  const json cfg = load_config(opts.config);
  check_config_keys(cfg, {"gamma", "eta", "omega0", "omega_max", "t", "approx",
                          "tail", "dump_coeffs", "out_dir"});
  MasterOpts v = opts;
  const CLI::App& cmd = *opts.cmd;
  merge_value(cmd, cfg, "--gamma", "gamma", v.gamma);
  merge_value(cmd, cfg, "--eta", "eta", v.eta);
  merge_value(cmd, cfg, "--omega0", "omega0", v.omega0);
  merge_value(cmd, cfg, "--omega-max", "omega_max", v.omega_max);
  merge_list(cmd, cfg, "--t", "t", v.t_grid);
  merge_value(cmd, cfg, "--approx", "approx", v.approx);
  merge_value(cmd, cfg, "--tail", "tail", v.tail);
  merge_value(cmd, cfg, "--dump-coeffs", "dump_coeffs", v.dump_coeffs);
  merge_value(cmd, cfg, "--out-dir", "out_dir", v.out_dir);

  if (!provided(cmd, cfg, "--gamma", "gamma"))
    throw UsageError("--gamma is required");
  if (!provided(cmd, cfg, "--omega-max", "omega_max"))
    throw UsageError("--omega-max is required");
  if (!provided(cmd, cfg, "--t", "t")) throw UsageError("--t is required");

  if (v.tail && (v.approx || v.dump_coeffs))
    throw UsageError(
        "--tail is a standalone output mode and cannot be combined with "
        "--approx or --dump-coeffs");

  const urnsim::FeedbackFunction f =
      urnsim::FeedbackFunction::power_law(v.eta, v.gamma);
  const std::vector<double> ts = parse_grid(v.t_grid);

  // tail mode never touches the recursion: the predicted tail is a closed
  // product, cheap at omega ranges where the coefficient table would be
  // enormous and its rows all flagged anyway
  std::optional<urnsim::PmfSolver> solver;
  if (!v.tail) solver.emplace(f, v.omega0, v.omega_max);
  std::optional<urnsim::FirstTermApprox> approx;
  if (v.approx || v.tail) approx.emplace(f, v.omega0, v.omega_max);

  const std::string dir = prepare_out_dir(v.out_dir);
  OutputBatch batch("solve-master", dir);
  batch.manifest.parameters = {
      {"gamma", v.gamma},         {"eta", v.eta},
      {"omega0", v.omega0},       {"omega_max", v.omega_max},
      {"t", ts},                  {"approx", v.approx},
      {"tail", v.tail},           {"dump_coeffs", v.dump_coeffs},
      {"out_dir", dir}};
  if (solver && solver->solution() == nullptr)
    batch.manifest.notes.push_back(
        "gamma = 0: exact Poisson closed form used in place of the "
        "recursion");

  if (!v.tail) {
    const std::string p = batch.path("pmf.csv");
    std::ofstream out(p);
    if (!out) throw std::runtime_error("cannot open " + p + " for writing");
    out << (v.approx ? "omega,t,p,flag,p_approx,approx_flag\n"
                     : "omega,t,p,flag\n");
    for (double t : ts) {
      for (std::uint64_t omega = v.omega0; omega <= v.omega_max; ++omega) {
        const urnsim::MassValue m = solver->evaluate(t, omega);
        out << omega << ',' << urnsim::format_double(t) << ','
            << urnsim::format_double(m.value) << ','
            << (m.suspect ? "suspect" : "ok");
        if (v.approx) {
          out << ',' << urnsim::format_double(approx->value(t, omega)) << ','
              << (approx->reliable() ? "ok" : "unreliable");
        }
        out << '\n';
      }
    }
    if (!out) throw std::runtime_error("failed writing " + p);
    batch.record(p);
  }

  if (v.tail) {
    for (double t : ts) {
      std::vector<urnsim::TailPoint> points;
      points.reserve(static_cast<std::size_t>(v.omega_max - v.omega0 + 1));
      // running form of predicted_tail: same accumulator, same add order,
      // so the values match the per-point function bitwise at O(1) each
      urnsim::StableSum acc;
      for (std::uint64_t omega = v.omega0; omega <= v.omega_max; ++omega) {
        points.push_back({static_cast<double>(omega), 1.0 - acc.get()});
        acc.add(approx->value(t, omega));
      }
      const urnsim::TailCurve curve(std::move(points),
                                    urnsim::CurveSource::Predicted);
      const std::string p =
          batch.path("predicted_tail_t" + urnsim::format_double(t) + ".csv");
      urnsim::write_tail_csv(p, curve);
      batch.record(p);
    }
  }

  if (v.dump_coeffs) {
    const urnsim::MasterSolution* sol = solver->solution();
    if (sol == nullptr)
      throw std::domain_error(
          "gamma = 0 takes the closed-form route; there is no coefficient "
          "table to dump");
    const std::string p = batch.path("coeffs.csv");
    std::ofstream out(p);
    if (!out) throw std::runtime_error("cannot open " + p + " for writing");
    out << "omega,i,sign,log_abs\n";
    for (std::uint64_t omega = v.omega0; omega <= v.omega_max; ++omega)
      for (std::uint64_t i = v.omega0; i <= omega; ++i) {
        const urnsim::SignedLog c = sol->coeff(omega, i);
        out << omega << ',' << i << ',' << c.sign << ','
            << urnsim::format_double(c.log_abs) << '\n';
      }
    if (!out) throw std::runtime_error("failed writing " + p);
    batch.record(p);
  }

  batch.finish("master_manifest.json");
  return 0;
}

// --------------------------------------------------------------------- fit

struct FitOpts {
  CLI::App* cmd = nullptr;
  std::string config, out_dir;
  std::string input, mode;
  double x_min = 0.0;
};

int run_fit(const FitOpts& opts) {
  const json cfg = load_config(opts.config);
  check_config_keys(cfg, {"input", "mode", "xmin", "out_dir"});
  FitOpts v = opts;
  const CLI::App& cmd = *opts.cmd;
  merge_value(cmd, cfg, "--input", "input", v.input);
  merge_value(cmd, cfg, "--mode", "mode", v.mode);
  merge_value(cmd, cfg, "--xmin", "xmin", v.x_min);
  merge_value(cmd, cfg, "--out-dir", "out_dir", v.out_dir);

  if (!provided(cmd, cfg, "--input", "input"))
    throw UsageError("--input is required");
  if (!provided(cmd, cfg, "--mode", "mode"))
    throw UsageError("--mode is required (power or exponential)");
  if (v.mode != "power" && v.mode != "exponential")
    throw UsageError("--mode must be power or exponential");
  if (v.mode == "power" && !provided(cmd, cfg, "--xmin", "xmin"))
    throw UsageError("--xmin is required in power mode");

  const std::vector<double> samples = urnsim::read_numeric_column(v.input);

  json report;
  if (v.mode == "power") {
    const urnsim::PowerLawFit fit =
        urnsim::fit_power_law_mle(samples, v.x_min);
    report = {{"beta", fit.beta},
              {"x_min", fit.x_min},
              {"n_tail", fit.n_tail},
              {"std_err", fit.std_err}};
  } else {
    const urnsim::ExponentialFit fit = urnsim::fit_exponential(samples);
    report = {{"rate", fit.rate}, {"n", fit.n}};
  }

  const std::string dir = prepare_out_dir(v.out_dir);
  OutputBatch batch("fit", dir);
  batch.manifest.parameters = {{"input", v.input},
                               {"mode", v.mode},
                               {"out_dir", dir}};
  if (v.mode == "power") batch.manifest.parameters["xmin"] = v.x_min;

  const std::string p = batch.path("fit.json");
  write_json_file(p, report);
  batch.record(p);
  batch.finish("fit_manifest.json");

  std::cout << report.dump(2) << '\n';
  return 0;
}

// ------------------------------------------------------------------ regvar

struct RegVarOpts {
  CLI::App* cmd = nullptr;
  std::string config, out_dir;
  double gamma = 0.0;
  std::uint64_t omega0 = 1;
  std::string omega_grid;
};

int run_regvar(const RegVarOpts& opts) {
  const json cfg = load_config(opts.config);
  check_config_keys(cfg, {"gamma", "omega0", "omega_grid", "out_dir"});
  RegVarOpts v = opts;
  const CLI::App& cmd = *opts.cmd;
  merge_value(cmd, cfg, "--gamma", "gamma", v.gamma);
  merge_value(cmd, cfg, "--omega0", "omega0", v.omega0);
  merge_list(cmd, cfg, "--omega-grid", "omega_grid", v.omega_grid);
  merge_value(cmd, cfg, "--out-dir", "out_dir", v.out_dir);

  if (!provided(cmd, cfg, "--gamma", "gamma"))
    throw UsageError("--gamma is required");
  if (!provided(cmd, cfg, "--omega-grid", "omega_grid"))
    throw UsageError("--omega-grid is required");

  const std::vector<std::uint64_t> omegas = parse_index_list(v.omega_grid);
  const urnsim::RegVarDiag diag =
      urnsim::regvar_diagnostic(v.gamma, v.omega0, omegas);

  const std::string dir = prepare_out_dir(v.out_dir);
  OutputBatch batch("regvar", dir);
  batch.manifest.parameters = {{"gamma", v.gamma},
                               {"omega0", v.omega0},
                               {"omega_grid", omegas},
                               {"out_dir", dir}};

  const std::string p = batch.path("regvar.csv");
  {
    std::ofstream out(p);
    if (!out) throw std::runtime_error("cannot open " + p + " for writing");
    out << "omega,d_omega\n";
    for (const urnsim::RegVarPoint& point : diag.points)
      out << point.omega << ',' << urnsim::format_double(point.d) << '\n';
    if (!out) throw std::runtime_error("failed writing " + p);
  }
  batch.record(p);
  batch.finish("regvar_manifest.json");
  return 0;
}

// ----------------------------------------------------------- compare-tails

struct CompareOpts {
  CLI::App* cmd = nullptr;
  std::string config;
  std::string path_a, path_b;
  double lo = 0.0;
  double hi = 0.0;
};

int run_compare_tails(const CompareOpts& opts) {
  const json cfg = load_config(opts.config);
  check_config_keys(cfg, {"a", "b", "lo", "hi"});
  CompareOpts v = opts;
  const CLI::App& cmd = *opts.cmd;
  merge_value(cmd, cfg, "a", "a", v.path_a);
  merge_value(cmd, cfg, "b", "b", v.path_b);
  merge_value(cmd, cfg, "--lo", "lo", v.lo);
  merge_value(cmd, cfg, "--hi", "hi", v.hi);

  if (!provided(cmd, cfg, "a", "a") || !provided(cmd, cfg, "b", "b"))
    throw UsageError("two tail CSV paths are required");

  // read both leniently: a predicted curve is allowed nonpositive values
  const urnsim::TailCurve a =
      urnsim::read_tail_csv(v.path_a, urnsim::CurveSource::Predicted);
  const urnsim::TailCurve b =
      urnsim::read_tail_csv(v.path_b, urnsim::CurveSource::Predicted);

  double lo = v.lo, hi = v.hi;
  if (cmd.count("--lo") == 0 && !cfg.contains("lo"))
    lo = std::max(a.first_omega(), b.first_omega());
  if (cmd.count("--hi") == 0 && !cfg.contains("hi"))
    hi = std::max({lo, a.last_omega(), b.last_omega()});

  const double gap = urnsim::tail_compare(a, b, lo, hi);
  const json report{{"sup_abs_gap", gap}, {"omega_lo", lo}, {"omega_hi", hi}};
  std::cout << report.dump(2) << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "feedback urn toolkit: simulate ball allocation with power-law "
      "feedback, solve the transient distribution, and analyse tails"};
  app.set_version_flag("--version", std::string(urnsim::kVersion));
  app.require_subcommand(1);

  DiscreteOpts discrete;
  discrete.cmd = app.add_subcommand(
      "simulate-discrete",
      "run the one-ball-per-iteration allocation model; dump per-checkpoint "
      "counts and empirical tails");
  discrete.cmd->add_option("--config", discrete.config,
                           "JSON config file; flags given here override it");
  discrete.cmd->add_option("--out-dir", discrete.out_dir,
                           "output directory (default $URNSIM_OUT_DIR or .)");
  discrete.cmd->add_option("--N", discrete.num_agents, "number of agents");
  discrete.cmd->add_option("--gamma", discrete.gamma, "feedback exponent");
  discrete.cmd->add_option("--eta", discrete.eta, "feedback scale (default 1)");
  discrete.cmd->add_option(
      "--checkpoints", discrete.checkpoints,
      "iterations to snapshot, comma list; the last is the run length");
  discrete.cmd->add_option("--init", discrete.init,
                           "initial counts, comma list (default: one each)");
  discrete.cmd->add_option("--seed", discrete.seed, "RNG seed (default 0)");
  discrete.cmd->add_flag("--unbounded", discrete.unbounded,
                         "allow runs past 1e8 iterations");

  LoserOpts losers;
  losers.cmd = app.add_subcommand(
      "simulate-losers",
      "aggregate independent single-agent clocks under time and ball caps; "
      "dump loser counts and tails");
  losers.cmd->add_option("--config", losers.config,
                         "JSON config file; flags given here override it");
  losers.cmd->add_option("--out-dir", losers.out_dir,
                         "output directory (default $URNSIM_OUT_DIR or .)");
  losers.cmd->add_option("--gamma", losers.gamma, "feedback exponent");
  losers.cmd->add_option("--eta", losers.eta, "feedback scale (default 1)");
  losers.cmd->add_option("--omega0", losers.omega0,
                         "initial count (default 1)");
  losers.cmd->add_option("--n-sims", losers.n_sims,
                         "number of independent agents (default 10000)");
  losers.cmd->add_option("--omega-max", losers.omega_max,
                         "ball cap marking explosion (default 10000)");
  losers.cmd->add_option(
      "--tM", losers.time_cap,
      "time cap: a value, a value list or start:stop:step grid, or 'auto' "
      "for the explosion-time lower bound (needs gamma > 1)");
  losers.cmd->add_option("--seed", losers.seed, "RNG seed (default 0)");
  losers.cmd->add_option("--parallel", losers.parallel,
                         "worker threads for replica fan-out (default 1)");

  MasterOpts master;
  master.cmd = app.add_subcommand(
      "solve-master",
      "solve the transient count distribution on a time grid; optional "
      "leading-term approximation, predicted tails, coefficient dump");
  master.cmd->add_option("--config", master.config,
                         "JSON config file; flags given here override it");
  master.cmd->add_option("--out-dir", master.out_dir,
                         "output directory (default $URNSIM_OUT_DIR or .)");
  master.cmd->add_option("--gamma", master.gamma, "feedback exponent");
  master.cmd->add_option("--eta", master.eta, "feedback scale (default 1)");
  master.cmd->add_option("--omega0", master.omega0,
                         "initial count (default 1)");
  master.cmd->add_option("--omega-max", master.omega_max,
                         "largest count to solve for");
  master.cmd->add_option(
      "--t", master.t_grid,
      "time grid: comma list or start:stop:step (inclusive)");
  master.cmd->add_flag("--approx", master.approx,
                       "add leading-term approximation columns (gamma > 1)");
  master.cmd->add_flag(
      "--tail", master.tail,
      "emit predicted tail curves from the approximation, one CSV per t");
  master.cmd->add_flag("--dump-coeffs", master.dump_coeffs,
                       "emit the exponential-sum coefficient table");

  FitOpts fit;
  fit.cmd = app.add_subcommand(
      "fit", "fit a power-law or exponential tail to a sample column");
  fit.cmd->add_option("--config", fit.config,
                      "JSON config file; flags given here override it");
  fit.cmd->add_option("--out-dir", fit.out_dir,
                      "output directory (default $URNSIM_OUT_DIR or .)");
  fit.cmd->add_option("--input", fit.input, "CSV with one numeric column");
  fit.cmd->add_option("--mode", fit.mode, "power or exponential");
  fit.cmd->add_option("--xmin", fit.x_min,
                      "tail threshold (required in power mode)");

  RegVarOpts regvar;
  regvar.cmd = app.add_subcommand(
      "regvar",
      "tabulate the regular-variation index diagnostic of the leading term");
  regvar.cmd->add_option("--config", regvar.config,
                         "JSON config file; flags given here override it");
  regvar.cmd->add_option("--out-dir", regvar.out_dir,
                         "output directory (default $URNSIM_OUT_DIR or .)");
  regvar.cmd->add_option("--gamma", regvar.gamma,
                         "feedback exponent (must be > 1)");
  regvar.cmd->add_option("--omega0", regvar.omega0,
                         "initial count (default 1)");
  regvar.cmd->add_option("--omega-grid", regvar.omega_grid,
                         "counts to evaluate at, comma list (1e2,1e3,... ok)");

  CompareOpts compare;
  compare.cmd = app.add_subcommand(
      "compare-tails",
      "largest absolute gap between two tail CSVs over a count window");
  compare.cmd->add_option("--config", compare.config,
                          "JSON config file; flags given here override it");
  compare.cmd->add_option("a", compare.path_a, "first tail CSV");
  compare.cmd->add_option("b", compare.path_b, "second tail CSV");
  compare.cmd->add_option("--lo", compare.lo,
                          "window start (default: both curves defined)");
  compare.cmd->add_option("--hi", compare.hi,
                          "window end (default: last point of either curve)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (discrete.cmd->parsed()) return run_simulate_discrete(discrete);
    if (losers.cmd->parsed()) return run_simulate_losers(losers);
    if (master.cmd->parsed()) return run_solve_master(master);
    if (fit.cmd->parsed()) return run_fit(fit);
    if (regvar.cmd->parsed()) return run_regvar(regvar);
    if (compare.cmd->parsed()) return run_compare_tails(compare);
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
