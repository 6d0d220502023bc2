#pragma once
#include <map>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "ipevo/conditions.hpp"
#include "ipevo/config.hpp"
#include "ipevo/io.hpp"

namespace ipevo {

struct TestResult {
  std::string name;
  std::string statistic_name;
  double statistic = 0;
  double p_value = kNaN;            // NaN when the test is an interval / tolerance check
  double ci_lo = kNaN, ci_hi = kNaN;
  double threshold = 0;
  std::string rule;                 // how the verdict follows from statistic and threshold
  bool pass = false;
  std::vector<std::pair<std::string, double>> sizes;
  std::vector<std::pair<std::string, double>> diagnostics;
  std::string anchor;               // law the test is about

  std::string line() const;
  nlohmann::json to_json() const;
};

struct ExperimentOutput {
  std::string name;
  std::vector<TestResult> results;
  std::map<std::string, Table> tables;  // file stem -> table
  double seconds = 0;
  bool pass() const;
};

const std::vector<std::string>& experiment_names();

// defaults are the calibrated acceptance settings; config keys override them
ExperimentOutput run_experiment(const std::string& name, const RunConfig& cfg);

// CSVs, summary.json and plot.py into dir
void write_experiment(const std::string& dir, const ExperimentOutput& out, const RunConfig& cfg);

// known-answer rows for the condition checker
struct ConditionRow {
  std::string label;
  ConditionReport report;
  std::vector<std::pair<std::string, std::pair<std::string, std::string>>> checks;  // field -> (expected, got)
  bool match = true;
};
std::vector<ConditionRow> condition_table();

ConditionReport run_check(const RunConfig& cfg);

}  // namespace ipevo
