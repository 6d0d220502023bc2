#pragma once
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "ipevo/models.hpp"
#include "ipevo/scaffold.hpp"

namespace ipevo {

// bad config or command line; the CLI maps it to exit code 2
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Flat key-value document. Model parameters sit next to the run settings
// ("model": "besq", "alpha": 0.5, ...). Keys not listed here stay in `raw`
// and are read by the experiment that needs them.
struct RunConfig {
  std::string model = "besq";
  double cutoff = 0.1;
  double dt = 1e-3;
  double dt_rel = 0.01;
  std::string horizon = "returns";  // time | atoms | hit | returns | pass
  double horizon_value = 1;
  double x0 = 0;
  double cap = kInf;
  std::vector<double> levels;
  std::vector<double> start;        // starting partition widths (simulate)
  std::size_t paths = 1000;
  std::uint64_t seed = 0;
  std::string experiment;
  std::string output_dir;
  nlohmann::json raw = nlohmann::json::object();

  double num(const std::string& key, double fallback) const;
  std::size_t count(const std::string& key, std::size_t fallback) const;
  std::vector<double> list(const std::string& key, std::vector<double> fallback) const;
};

RunConfig parse_config(const nlohmann::json& j);
RunConfig load_config(const std::string& path);
nlohmann::json to_json(const RunConfig& c);

Model make_model(const RunConfig& c);
Horizon make_horizon(const RunConfig& c);
ExcursionLaw make_law(const RunConfig& c, const Model& m);

// directory for outputs: config output_dir, else $IPEVO_OUTPUT_ROOT/<name>, else ./ipevo-out/<name>
std::string resolve_output_dir(const RunConfig& c, const std::string& name);

}  // namespace ipevo
