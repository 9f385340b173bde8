#pragma once

// Command-line driver: flag parsing, sweep/preset expansion, a bounded
// worker pool, CSV output and a JSON metadata sidecar.

#include <algorithm>
#include <atomic>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "clash/config.hpp"

namespace clash {

inline constexpr const char* kVersion = "1.0.0";
inline constexpr const char* kDefaultConfigFile = "clashsim.conf";

class UsageError : public std::runtime_error {
 public:
  UsageError(const std::string& what, std::string help)
      : std::runtime_error(what), help_(std::move(help)) {}
  const std::string& help() const { return help_; }

 private:
  std::string help_;
};

struct SweepSpec {
  SweepAxis axis = SweepAxis::SeqRate;
  std::string label;  // CSV axis column
  std::vector<double> values;
  Settings overrides;  // fixed context for this sweep
};

struct CliConfig {
  Settings settings;  // defaults <- config file <- preset <- flags
  std::vector<SchemeKind> schemes{SchemeKind::Clash};
  std::vector<SweepSpec> sweeps;  // empty: one run per scheme and seed
  std::string preset;
  std::string out = "results.csv";
  unsigned jobs = 1;
  std::uint64_t seeds = 1;
};

inline SweepSpec parse_sweep(const std::string& spec) {
  const auto eq = spec.find('=');
  if (eq == std::string::npos)
    throw InvalidParams("sweep must look like axis=start:end:step or axis=v1,v2");
  SweepSpec s;
  const std::string name = spec.substr(0, eq);
  s.axis = parse_axis(name);
  s.label = to_string(s.axis);
  const std::string body = spec.substr(eq + 1);
  auto number = [](const std::string& t) {
    std::size_t used = 0;
    double v = 0;
    try {
      v = std::stod(t, &used);
    } catch (...) {
      used = 0;
    }
    if (used == 0 || used != t.size())
      throw InvalidParams("bad sweep value '" + t + "'");
    return v;
  };
  if (body.find(':') != std::string::npos) {
    std::vector<double> parts;
    std::stringstream ss(body);
    std::string tok;
    while (std::getline(ss, tok, ':')) parts.push_back(number(tok));
    if (parts.size() != 3)
      throw InvalidParams("range sweep needs start:end:step");
    s.values = range_values(parts[0], parts[1], parts[2]);
  } else {
    std::stringstream ss(body);
    std::string tok;
    while (std::getline(ss, tok, ',')) s.values.push_back(number(tok));
    if (s.values.empty()) throw InvalidParams("empty sweep value list");
  }
  return s;
}

// Experiment presets reproducing the four figure setups.
inline std::vector<SweepSpec> preset_sweeps(const std::string& name) {
  if (name == "fig3-seq") {
    return {{SweepAxis::SeqRate, "seq", range_values(0, 100, 5), {}}};
  }
  if (name == "fig3-local") {
    return {{SweepAxis::LocalityRate, "local", range_values(0, 100, 10), {}}};
  }
  if (name == "fig3-size") {
    return {{SweepAxis::MeanReqSize, "size", {1, 2, 4, 8, 16, 32, 64, 128},
             {{"seq_rate", "0"}, {"locality_rate", "0.2"}}}};
  }
  if (name == "fig4-reqnum") {
    const auto counts = range_values(10000, 100000, 10000);
    return {{SweepAxis::RequestCount, "reqnum-random", counts,
             {{"mean_req_size", "6"}, {"seq_rate", "0"}, {"locality_rate", "0"}}},
            {SweepAxis::RequestCount, "reqnum-seq", counts,
             {{"mean_req_size", "6"}, {"seq_rate", "1"}, {"locality_rate", "0"}}}};
  }
  throw InvalidParams("unknown preset '" + name + "'");
}

inline std::vector<SchemeKind> parse_scheme_list(const std::string& s) {
  if (s == "all") return {std::begin(kAllSchemes), std::end(kAllSchemes)};
  std::vector<SchemeKind> out;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ',')) out.push_back(parse_scheme(trim(tok)));
  if (out.empty()) throw std::invalid_argument("empty scheme list");
  return out;
}

struct PlannedRun {
  RunConfig config;
  std::string axis = "none";
  double axis_value = 0;
};

inline std::vector<PlannedRun> plan_runs(const CliConfig& cli) {
  std::vector<PlannedRun> plan;
  for (SchemeKind scheme : cli.schemes) {
    for (std::uint64_t k = 0; k < cli.seeds; ++k) {
      Settings s = cli.settings;
      s["scheme"] = to_string(scheme);
      const RunConfig base0 = run_config_from(s);
      const std::uint64_t seed = base0.workload.seed + k;
      if (cli.sweeps.empty()) {
        PlannedRun p{base0};
        p.config.workload.seed = seed;
        plan.push_back(std::move(p));
        continue;
      }
      for (const SweepSpec& sw : cli.sweeps) {
        Settings ctx = s;
        for (const auto& [key, v] : sw.overrides) ctx[key] = v;
        RunConfig base = run_config_from(ctx);
        base.workload.seed = seed;
        const auto points = sweep(base.workload, sw.axis, sw.values);
        for (std::size_t i = 0; i < points.size(); ++i) {
          PlannedRun p{base, sw.label, sw.values[i]};
          p.config.workload = points[i];
          p.config.validate();
          plan.push_back(std::move(p));
        }
      }
    }
  }
  return plan;
}

inline CliConfig parse_args(const std::vector<std::string>& args) {
  CLI::App app{"Discrete-event simulator for a dual-space flash cache and "
               "baseline FTLs"};
  app.name("clashsim");
  std::string config_path, scheme, sweep, trace, out, preset;
  std::vector<std::string> sets;
  std::uint64_t seed = 0, seeds = 1;
  unsigned jobs = 1;
  bool final_flush = false;
  app.add_option("--config", config_path, "key = value config file");
  app.add_option("--scheme", scheme, "clash, pagemap, dftl, fast, a comma list or all");
  app.add_option("--sweep", sweep, "axis=start:end:step or axis=v1,v2,... "
                                   "(axes: seq, local [percent], size [pages], reqnum)");
  app.add_option("--preset", preset, "fig3-seq, fig3-local, fig3-size, fig4-reqnum");
  app.add_option("--trace", trace, "replay a trace file instead of generating");
  app.add_option("--out", out, "CSV output path ('-' for stdout)");
  auto* seed_opt = app.add_option("--seed", seed, "base random seed");
  app.add_option("--seeds", seeds, "number of seeds per point (base, base+1, ...)")
      ->check(CLI::PositiveNumber);
  app.add_option("--jobs", jobs, "parallel runs")->check(CLI::PositiveNumber);
  app.add_option("--set", sets, "override a config key: key=value")->take_all();
  app.add_flag("--final-flush", final_flush, "flush residual cache contents at the end");

  std::vector<std::string> argv_rev(args.rbegin(), args.rend());
  try {
    app.parse(argv_rev);
  } catch (const CLI::CallForHelp&) {
    throw UsageError("help requested", app.help());
  } catch (const CLI::ParseError& e) {
    throw UsageError(e.what(), app.help());
  }

  CliConfig cfg;
  try {
    if (!config_path.empty()) {
      cfg.settings = load_settings(config_path);
    } else if (std::filesystem::exists(kDefaultConfigFile)) {
      cfg.settings = load_settings(kDefaultConfigFile);
    }
    // Driver keys may live in the config file too.
    auto take = [&](const char* key) -> std::string {
      auto it = cfg.settings.find(key);
      if (it == cfg.settings.end()) return "";
      std::string v = it->second;
      cfg.settings.erase(it);
      return v;
    };
    std::string file_scheme = take("scheme");
    std::string file_sweep = take("sweep");
    std::string file_preset = take("preset");
    std::string file_out = take("out");
    std::string file_jobs = take("jobs");
    std::string file_seeds = take("seeds");

    if (preset.empty()) preset = file_preset;
    if (!preset.empty()) {
      cfg.preset = preset;
      cfg.sweeps = preset_sweeps(preset);
      cfg.schemes = {std::begin(kAllSchemes), std::end(kAllSchemes)};
    }
    if (!file_scheme.empty()) cfg.schemes = parse_scheme_list(file_scheme);
    if (!scheme.empty()) cfg.schemes = parse_scheme_list(scheme);
    if (sweep.empty()) sweep = file_sweep;
    if (!sweep.empty()) cfg.sweeps = {parse_sweep(sweep)};
    if (!file_out.empty()) cfg.out = file_out;
    if (!out.empty()) cfg.out = out;
    if (!file_jobs.empty()) cfg.jobs = detail::parse_number<unsigned>("jobs", file_jobs);
    if (app.count("--jobs")) cfg.jobs = jobs;
    if (!file_seeds.empty()) cfg.seeds = detail::parse_number<std::uint64_t>("seeds", file_seeds);
    if (app.count("--seeds")) cfg.seeds = seeds;
    if (cfg.jobs == 0 || cfg.seeds == 0)
      throw InvalidParams("jobs and seeds must be positive");

    for (const std::string& kv : sets) {
      const auto eq = kv.find('=');
      if (eq == std::string::npos) throw ConfigError("--set expects key=value");
      const std::string key = trim(kv.substr(0, eq));
      if (!is_run_key(key) || key == "scheme")
        throw ConfigError("--set: unknown key '" + key + "'");
      cfg.settings[key] = trim(kv.substr(eq + 1));
    }
    if (seed_opt->count()) cfg.settings["seed"] = std::to_string(seed);
    if (!trace.empty()) cfg.settings["trace"] = trace;
    if (final_flush) cfg.settings["final_flush"] = "true";
    if (cfg.settings.count("trace") && !cfg.settings["trace"].empty() &&
        !cfg.sweeps.empty())
      throw InvalidParams("--trace cannot be combined with a sweep");

    // Surface bad keys and values now rather than per run.
    Settings probe = cfg.settings;
    probe.erase("scheme");
    (void)run_config_from(probe);
    (void)plan_runs(cfg);
  } catch (const UsageError&) {
    throw;
  } catch (const std::exception& e) {
    throw UsageError(e.what(), app.help());
  }
  return cfg;
}

inline CliConfig parse_args(int argc, const char* const* argv) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return parse_args(args);
}

struct RunOutcome {
  PlannedRun plan;
  bool ok = false;
  std::string error;
  RunMetrics metrics;
  SummaryRow row;
};

inline SummaryRow summarize(const PlannedRun& p, const RunMetrics& m) {
  SummaryRow r;
  r.scheme = to_string(p.config.scheme);
  r.axis = p.axis;
  r.axis_value = p.axis_value;
  r.seed = p.config.workload.seed;
  r.mean_response_ms = m.mean_response_ms;
  r.reads = m.reads;
  r.writes = m.writes;
  r.erases = m.erases;
  r.wsd = m.wsd;
  r.read_hit_rate = m.read_hit_rate();
  r.write_hit_rate = m.write_hit_rate();
  r.unwritten_reads = m.unwritten_reads;
  r.blocks_counted = m.blocks_counted;
  return r;
}

// Runs every planned configuration on `jobs` workers. Each worker owns its
// simulator; results land in plan order and are then sorted.
inline std::vector<RunOutcome> execute_plan(const std::vector<PlannedRun>& plan,
                                            unsigned jobs) {
  std::vector<RunOutcome> results(plan.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < plan.size(); i = next++) {
      RunOutcome& o = results[i];
      o.plan = plan[i];
      try {
        o.metrics = run(plan[i].config);
        o.ok = o.metrics.valid;
        o.error = o.metrics.error;
      } catch (const std::exception& e) {
        o.ok = false;
        o.error = e.what();
      }
      o.row = summarize(o.plan, o.metrics);
    }
  };
  const unsigned n = std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(plan.size())));
  std::vector<std::thread> pool;
  for (unsigned t = 1; t < n; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  std::stable_sort(results.begin(), results.end(),
                   [](const RunOutcome& a, const RunOutcome& b) {
                     return std::tie(a.row.scheme, a.row.axis, a.row.axis_value,
                                     a.row.seed) <
                            std::tie(b.row.scheme, b.row.axis, b.row.axis_value,
                                     b.row.seed);
                   });
  return results;
}

inline nlohmann::json sidecar_json(const CliConfig& cli,
                                   const std::vector<RunOutcome>& results) {
  nlohmann::json j;
  j["tool"] = "clashsim";
  j["version"] = kVersion;
  j["preset"] = cli.preset;
  j["formulas"] = {
      {"wsd", kWsdFormula},
      {"mean_response_ms",
       "mean over requests of completion - arrival; one FIFO device, "
       "service = sum of flash op latencies"},
      {"hit_rate", "pages served by the cache / pages requested"},
      {"blocks_counted",
       "clash: logical blocks (over-provision unreachable); FTLs: all "
       "physical blocks"}};
  nlohmann::json runs = nlohmann::json::array();
  std::size_t row = 0;
  for (const RunOutcome& o : results) {
    nlohmann::json r;
    r["scheme"] = o.row.scheme;
    r["axis"] = o.plan.axis;
    r["axis_value"] = o.plan.axis_value;
    r["status"] = o.ok ? "ok" : "error";
    if (o.ok) r["csv_row"] = row++;
    if (!o.ok) r["error"] = o.error;
    r["config"] = to_settings(o.plan.config);
    if (o.ok) r["final_flush_erases"] = o.metrics.final_flush.flash_erases;
    runs.push_back(std::move(r));
  }
  j["runs"] = std::move(runs);
  return j;
}

// Returns the process exit status: 0 success, 1 any failed run or I/O error.
inline int execute(const CliConfig& cli, std::ostream& diag = std::cerr) {
  std::vector<PlannedRun> plan;
  try {
    plan = plan_runs(cli);
  } catch (const std::exception& e) {
    diag << "clashsim: " << e.what() << '\n';
    return 1;
  }
  const auto results = execute_plan(plan, cli.jobs);

  int status = 0;
  std::vector<SummaryRow> rows;
  for (const RunOutcome& o : results) {
    if (o.ok) {
      rows.push_back(o.row);
    } else {
      status = 1;
      diag << "clashsim: run failed (" << o.row.scheme << ", " << o.plan.axis
           << "=" << format_axis_value(o.plan.axis_value) << "): " << o.error
           << '\n';
    }
  }
  if (rows.empty()) {
    diag << "clashsim: no successful runs\n";
    return 1;
  }
  try {
    if (cli.out == "-") {
      write_csv(rows, std::cout);
    } else {
      std::ofstream out(cli.out);
      if (!out) throw std::runtime_error("cannot open " + cli.out + " for writing");
      write_csv(rows, out);
      std::ofstream meta(cli.out + ".meta.json");
      if (!meta) throw std::runtime_error("cannot write " + cli.out + ".meta.json");
      meta << sidecar_json(cli, results).dump(2) << '\n';
    }
  } catch (const std::exception& e) {
    diag << "clashsim: " << e.what() << '\n';
    return 1;
  }
  return status;
}

}  // namespace clash
