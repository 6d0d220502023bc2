#include "ipevo/config.hpp"

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>

namespace ipevo {

using nlohmann::json;

namespace {

double need_num(const json& j, const char* key) {
  if (!j.contains(key)) throw UsageError(std::string("config: missing '") + key + "'");
  if (!j[key].is_number()) throw UsageError(std::string("config: '") + key + "' must be a number");
  return j[key].get<double>();
}

std::vector<double> num_list(const json& j, const char* key) {
  std::vector<double> out;
  if (!j.contains(key)) return out;
  if (!j[key].is_array()) throw UsageError(std::string("config: '") + key + "' must be a list of numbers");
  for (const auto& v : j[key]) {
    if (!v.is_number()) throw UsageError(std::string("config: '") + key + "' must be a list of numbers");
    out.push_back(v.get<double>());
  }
  return out;
}

std::vector<std::pair<double, double>> table(const json& j, const char* key) {
  if (!j.contains(key) || !j[key].is_array()) throw UsageError(std::string("config: custom model needs '") + key + "' as [[x, value], ...]");
  std::vector<std::pair<double, double>> out;
  for (const auto& row : j[key]) {
    if (!row.is_array() || row.size() != 2) throw UsageError(std::string("config: bad row in '") + key + "'");
    out.emplace_back(row[0].get<double>(), row[1].get<double>());
  }
  return out;
}

std::string canon(std::string id) {
  for (auto& ch : id)
    if (ch == '-') ch = '_';
  return id;
}

}  // namespace

double RunConfig::num(const std::string& key, double fallback) const {
  if (!raw.contains(key)) return fallback;
  if (!raw[key].is_number()) throw UsageError("config: '" + key + "' must be a number");
  return raw[key].get<double>();
}

std::size_t RunConfig::count(const std::string& key, std::size_t fallback) const {
  double v = num(key, static_cast<double>(fallback));
  if (v < 0) throw UsageError("config: '" + key + "' must be >= 0");
  return static_cast<std::size_t>(v);
}

std::vector<double> RunConfig::list(const std::string& key, std::vector<double> fallback) const {
  if (!raw.contains(key)) return fallback;
  return num_list(raw, key.c_str());
}

RunConfig parse_config(const json& j) {
  if (!j.is_object()) throw UsageError("config: top level must be an object");
  RunConfig c;
  c.raw = j;
  if (!j.contains("seed")) throw UsageError("config: 'seed' is mandatory");
  if (!j["seed"].is_number_integer() && !j["seed"].is_number_unsigned()) throw UsageError("config: 'seed' must be an integer");
  c.seed = j["seed"].get<std::uint64_t>();
  if (j.contains("model")) c.model = j["model"].get<std::string>();
  if (j.contains("cutoff")) c.cutoff = need_num(j, "cutoff");
  if (j.contains("dt")) c.dt = need_num(j, "dt");
  if (j.contains("dt_rel")) c.dt_rel = need_num(j, "dt_rel");
  if (j.contains("horizon")) c.horizon = j["horizon"].get<std::string>();
  if (j.contains("horizon_value")) c.horizon_value = need_num(j, "horizon_value");
  if (j.contains("x0")) c.x0 = need_num(j, "x0");
  if (j.contains("cap")) c.cap = need_num(j, "cap");
  c.levels = num_list(j, "levels");
  c.start = num_list(j, "start");
  if (j.contains("paths")) {
    double p = need_num(j, "paths");
    if (p < 1) throw UsageError("config: 'paths' must be >= 1");
    c.paths = static_cast<std::size_t>(p);
  }
  if (j.contains("experiment")) c.experiment = j["experiment"].get<std::string>();
  if (j.contains("output_dir")) c.output_dir = j["output_dir"].get<std::string>();
  if (!(c.cutoff > 0)) throw UsageError("config: 'cutoff' must be > 0");
  if (!(c.dt > 0)) throw UsageError("config: 'dt' must be > 0");
  if (c.dt_rel < 0) throw UsageError("config: 'dt_rel' must be >= 0");
  if (!(c.cap > 0)) throw UsageError("config: 'cap' must be > 0");
  return c;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open config " + path);
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw UsageError("config " + path + ": " + e.what());
  }
  return parse_config(j);
}

json to_json(const RunConfig& c) {
  json j = c.raw;
  j["model"] = c.model;
  j["cutoff"] = c.cutoff;
  j["dt"] = c.dt;
  j["dt_rel"] = c.dt_rel;
  j["horizon"] = c.horizon;
  j["horizon_value"] = c.horizon_value;
  j["x0"] = c.x0;
  if (std::isfinite(c.cap)) j["cap"] = c.cap;
  else j.erase("cap");
  j["levels"] = c.levels;
  if (!c.start.empty()) j["start"] = c.start;
  j["paths"] = c.paths;
  j["seed"] = c.seed;
  if (!c.experiment.empty()) j["experiment"] = c.experiment;
  return j;
}

Model make_model(const RunConfig& c) {
  const json& j = c.raw;
  const std::string id = canon(c.model);
  Model m;
  try {
    if (id == "besq") m = besq(c.num("alpha", 0.5));
    else if (id == "besq_dim0") m = besq_dim0(c.num("eps2", 1.0));
    else if (id == "self_similar") m = self_similar(c.num("alpha", 0.5), c.num("k", 1.0), c.num("q", 0.7));
    else if (id == "wright_fisher") m = wright_fisher(c.num("gamma1", 1.0), c.num("gamma2", 0.25));
    else if (id == "cir") m = cir(c.num("a", 1.0), c.num("b", -1.0), c.num("c", 0.25));
    else if (id == "custom") {
      TransformSpec g = TransformSpec::identity();
      if (j.contains("g_k") || j.contains("g_q")) g = TransformSpec::power(c.num("g_k", 1.0), c.num("g_q", 1.0));
      bool closed = j.contains("closed_at_c") && j["closed_at_c"].get<bool>();
      m = custom(table(j, "mu"), table(j, "sigma2"), need_num(j, "c"), closed, c.num("b", 1.0), g);
    } else {
      throw UsageError("unknown model '" + c.model + "' (besq, besq_dim0, self_similar, wright_fisher, cir, custom)");
    }
  } catch (const std::invalid_argument& e) {
    throw UsageError(std::string("model parameters: ") + e.what());
  }
  return m;
}

Horizon make_horizon(const RunConfig& c) {
  const double v = c.horizon_value;
  if (c.horizon == "time") return Horizon::time(v);
  if (c.horizon == "atoms") return Horizon::atoms(static_cast<std::size_t>(v));
  if (c.horizon == "hit") return Horizon::hit(v);
  if (c.horizon == "returns") return Horizon::returns(std::max(1, static_cast<int>(v)));
  if (c.horizon == "pass") return Horizon::pass(v);
  throw UsageError("unknown horizon '" + c.horizon + "' (time, atoms, hit, returns, pass)");
}

ExcursionLaw make_law(const RunConfig& c, const Model& m) {
  ExcursionLaw law{m.Y};
  law.g = m.g;
  law.cutoff = c.cutoff;
  law.dt = c.dt;
  law.dt_rel = c.dt_rel;
  return law;
}

std::string resolve_output_dir(const RunConfig& c, const std::string& name) {
  if (!c.output_dir.empty()) return c.output_dir;
  const char* root = std::getenv("IPEVO_OUTPUT_ROOT");
  std::filesystem::path base = root && *root ? root : "ipevo-out";
  return (base / name).string();
}

}  // namespace ipevo
