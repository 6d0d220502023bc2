// acceptance gate: one PASS/FAIL line per criterion, nonzero exit on any failure
#include <algorithm>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include "ipevo/config.hpp"
#include "ipevo/experiments.hpp"

#ifndef IPEVO_SOURCE_DIR
#define IPEVO_SOURCE_DIR "."
#endif
#ifndef IPEVO_BINARY_DIR
#define IPEVO_BINARY_DIR "."
#endif

using namespace ipevo;
namespace fs = std::filesystem;

struct Criterion {
  int id;
  const char* title;
  const char* experiment;
  double limit_s;
};

int main(int argc, char** argv) {
  const std::vector<Criterion> all{
      {1, "hitting probability", "hitting-prob", 60},
      {2, "BESQ lifetime law", "besq-lifetime", 120},
      {3, "amplitude law", "amplitude-law", 60},
      {4, "up-diffusion moments", "up-moments", 180},
      {5, "crossing-width law", "crossing-width", 300},
      {6, "overshoot tail", "overshoot-tail", 300},
      {7, "diversity = local time", "diversity-localtime", 300},
      {8, "d'_H correctness", "metric-oracle", 30},
      {9, "condition checker known answers", "condition-table", 30},
      {10, "cutoff convergence", "cutoff-convergence", 300},
      {11, "markov restart", "markov-restart", 600},
  };
  // optional subset: acceptance 1 5 8
  std::vector<int> only;
  for (int i = 1; i < argc; ++i) only.push_back(std::stoi(argv[i]));

  const fs::path cfg_dir = fs::path(IPEVO_SOURCE_DIR) / "configs";
  const fs::path out_root = fs::path(IPEVO_BINARY_DIR) / "acceptance-out";
  int failed = 0;
  for (const auto& c : all) {
    if (!only.empty() && std::find(only.begin(), only.end(), c.id) == only.end()) continue;
    bool ok = false;
    std::string detail;
    double secs = 0;
    try {
      RunConfig cfg = load_config((cfg_dir / (std::string(c.experiment) + ".json")).string());
      ExperimentOutput out = run_experiment(c.experiment, cfg);
      secs = out.seconds;
      write_experiment((out_root / c.experiment).string(), out, cfg);
      for (const auto& r : out.results) {
        std::cout << "    " << r.line() << "\n";
        for (const auto& [k, v] : r.diagnostics) std::cout << "        " << k << " = " << v << "\n";
      }
      ok = out.pass() && secs < c.limit_s;
      if (secs >= c.limit_s) detail = " over time limit";
    } catch (const std::exception& e) {
      detail = std::string(" error: ") + e.what();
    }
    char buf[64];
    std::snprintf(buf, sizeof buf, " (%.1f s, limit %.0f s)", secs, c.limit_s);
    std::cout << (ok ? "PASS" : "FAIL") << " criterion " << c.id << ": " << c.title << buf << detail << std::endl;
    failed += !ok;
  }
  std::cout << (failed ? "acceptance: " + std::to_string(failed) + " criterion(s) failed" : std::string("acceptance: all passed"))
            << std::endl;
  return failed ? 1 : 0;
}
