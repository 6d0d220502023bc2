// ipevo command line: condition checks, sampling, runs, skewer slices, d'_H, experiments
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

#include <CLI11.hpp>

#include "ipevo/conditions.hpp"
#include "ipevo/config.hpp"
#include "ipevo/excursions.hpp"
#include "ipevo/experiments.hpp"
#include "ipevo/io.hpp"
#include "ipevo/partition.hpp"
#include "ipevo/scaffold.hpp"

namespace fs = std::filesystem;
using namespace ipevo;
using nlohmann::json;

namespace {

std::optional<std::uint64_t> g_seed;

RunConfig config_from(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open config " + path);
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw UsageError("config " + path + ": " + e.what());
  }
  if (g_seed) j["seed"] = *g_seed;
  return parse_config(j);
}

int cmd_check(const std::string& path, bool as_json) {
  RunConfig c = config_from(path);
  ConditionReport r = run_check(c);
  std::cout << (as_json ? r.to_json() : r.to_text()) << "\n";
  return 0;
}

int cmd_sample(const std::string& path) {
  RunConfig c = config_from(path);
  Model m = make_model(c);
  ExcursionLaw law = make_law(c, m);
  std::string dir = resolve_output_dir(c, "sample");
  fs::create_directories(dir);
  SpindleMeasure N;  // atoms only used as a container for the path table
  Table s{{"spindle_id", "amplitude", "zeta", "at_c", "truncated"}, {}};
  std::vector<Spindle> sp(c.paths);
  RngStream rs{c.seed, 0x5A};
  parallel_for(c.paths, [&](std::size_t i) {
    Engine e = rs.child(i).engine();
    sp[i] = sample_spindle(law, e, true);
  });
  for (std::size_t i = 0; i < sp.size(); ++i) {
    s.add({static_cast<double>(i), sp[i].amplitude, sp[i].zeta, sp[i].at_c ? 1.0 : 0.0, sp[i].truncated ? 1.0 : 0.0});
    Atom a;
    a.zeta = sp[i].zeta;
    a.amplitude = sp[i].amplitude;
    a.f = std::make_shared<Spindle>(sp[i]);
    N.atoms.push_back(a);
  }
  write_csv((fs::path(dir) / "spindle_summary.csv").string(), s);
  write_csv((fs::path(dir) / "spindles.csv").string(), spindles_table(N));
  write_text((fs::path(dir) / "config.json").string(), to_json(c).dump(2) + "\n");
  std::cout << "sampled " << sp.size() << " spindles (cutoff " << law.cutoff << ") -> " << dir << "\n";
  return 0;
}

int cmd_simulate(const std::string& path) {
  RunConfig c = config_from(path);
  Model m = make_model(c);
  ExcursionLaw law = make_law(c, m);
  SpindleMeasure N;
  if (!c.start.empty()) {
    if (!check_start_ip(m.Y)) std::cerr << "note: start IP condition fails for this model; finite start used as given\n";
    StartOptions o;
    o.cap = c.cap;
    o.store_levels = c.levels;
    o.store_levels.push_back(0.0);
    N = start_from_partition(IntervalPartition(c.start), law, RngStream{c.seed, 0x51}, o);
  } else {
    PrmOptions o;
    o.x0 = c.x0;
    o.cap = c.cap;
    o.store_levels = c.levels;
    N = build_prm(law, make_horizon(c), RngStream{c.seed, 0x51}, o);
  }
  std::vector<LevelSlice> slices;
  for (double y : c.levels) slices.push_back(level_slice(y, N, m.g));
  std::string dir = resolve_output_dir(c, "run");
  write_run(dir, to_json(c), N, slices);
  std::cout << "atoms " << N.atoms.size() << ", scaffold length " << N.end_time << (N.truncated ? " (truncated)" : "")
            << " -> " << dir << "\n";
  for (const auto& s : slices)
    std::cout << "  level " << s.level << ": " << s.partition.size() << " blocks, mass " << s.partition.total() << "\n";
  return 0;
}

int cmd_skewer(const std::string& dir, double y, const std::string& out) {
  json cfg;
  SpindleMeasure N = read_run(dir, &cfg);
  if (g_seed) cfg["seed"] = *g_seed;
  if (!cfg.contains("seed")) cfg["seed"] = 0;
  Model m = make_model(parse_config(cfg));
  LevelSlice s = level_slice(y, N, m.g);
  Table t = partition_table(s.partition);
  t.header.push_back("spindle_id");
  for (std::size_t k = 0; k < t.rows.size(); ++k) t.rows[k].push_back(static_cast<double>(s.crossings[k].atom));
  if (out.empty()) write_csv(std::cout, t);
  else write_csv(out, t);
  std::cerr << "level " << y << ": " << s.partition.size() << " blocks, mass " << fmt(s.partition.total()) << "\n";
  return 0;
}

int cmd_metric(const std::string& a, const std::string& b, double eps) {
  IntervalPartition pa = read_partition_csv(a), pb = read_partition_csv(b);
  if (eps > 0) {
    auto r = dprime_truncated(pa, pb, eps);
    std::cout << fmt(r.value) << " +- " << fmt(r.slack) << "\n";
  } else {
    auto r = dprime_full(pa, pb);
    std::cout << fmt(r.value) << (r.exact ? "" : " (frontier capped: upper bound)") << "\n";
  }
  return 0;
}

int cmd_experiment(const std::string& name, const std::string& path) {
  RunConfig c = config_from(path);
  ExperimentOutput out = run_experiment(name, c);
  std::string dir = resolve_output_dir(c, name);
  write_experiment(dir, out, c);
  for (const auto& r : out.results) std::cout << r.line() << "\n";
  std::cout << (out.pass() ? "PASS " : "FAIL ") << name << " (" << out.seconds << " s) -> " << dir << "\n";
  return out.pass() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"interval-partition evolutions from spindles: checks, simulation, experiments"};
  app.require_subcommand(1);
  app.fallthrough();
  std::uint64_t seed = 0;
  auto* seed_opt = app.add_option("--seed", seed, "override the config seed");

  std::string cfg, dir, out, a, b, name;
  bool as_json = false;
  double level = 0, eps = 0;

  auto* check = app.add_subcommand("check", "condition report for the configured model");
  check->add_option("config", cfg)->required();
  check->add_flag("--json", as_json, "machine-readable report");

  auto* sample = app.add_subcommand("sample", "sample spindles from the truncated excursion measure");
  sample->add_option("config", cfg)->required();

  auto* simulate = app.add_subcommand("simulate", "build a spindle measure and scaffold, write a run directory");
  simulate->add_option("config", cfg)->required();

  auto* sk = app.add_subcommand("skewer", "interval partition at a level of a stored run");
  sk->add_option("run-dir", dir)->required();
  sk->add_option("--level", level, "level y")->required();
  sk->add_option("--out", out, "write CSV here instead of stdout");

  auto* metric = app.add_subcommand("metric", "d'_H distance between two partition CSVs (ordinal,width)");
  metric->add_option("a", a)->required();
  metric->add_option("b", b)->required();
  metric->add_option("--eps", eps, "drop blocks narrower than eps and report the slack");

  auto* exp = app.add_subcommand("experiment", "run a named experiment");
  exp->add_option("name", name)->required();
  exp->add_option("config", cfg)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }
  if (*seed_opt) g_seed = seed;

  try {
    if (*check) return cmd_check(cfg, as_json);
    if (*sample) return cmd_sample(cfg);
    if (*simulate) return cmd_simulate(cfg);
    if (*sk) return cmd_skewer(dir, level, out);
    if (*metric) return cmd_metric(a, b, eps);
    if (*exp) return cmd_experiment(name, cfg);
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const InadmissibleSpec& e) {
    std::cerr << "inadmissible: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return 2;
}
