// python bindings; configs cross the boundary as JSON text
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "ipevo/conditions.hpp"
#include "ipevo/config.hpp"
#include "ipevo/excursions.hpp"
#include "ipevo/experiments.hpp"
#include "ipevo/partition.hpp"
#include "ipevo/scaffold.hpp"

namespace py = pybind11;
using namespace ipevo;
using nlohmann::json;

namespace {

RunConfig cfg_from(const std::string& text) { return parse_config(json::parse(text)); }

std::string check(const std::string& cfg) { return run_check(cfg_from(cfg)).to_json(); }

std::string experiment(const std::string& name, const std::string& cfg, const std::string& out_dir) {
  RunConfig c = cfg_from(cfg);
  ExperimentOutput out = run_experiment(name, c);
  if (!out_dir.empty()) write_experiment(out_dir, out, c);
  json j;
  j["name"] = out.name;
  j["pass"] = out.pass();
  j["seconds"] = out.seconds;
  j["results"] = json::array();
  for (const auto& r : out.results) j["results"].push_back(r.to_json());
  return j.dump();
}

// spindle: (times, values, amplitude, lifetime)
py::tuple spindle(const std::string& cfg, std::uint64_t index) {
  RunConfig c = cfg_from(cfg);
  Model m = make_model(c);
  ExcursionLaw law = make_law(c, m);
  Engine e = RngStream{c.seed, 0x5A}.child(index).engine();
  Spindle f = sample_spindle(law, e, true);
  return py::make_tuple(f.path.times(), f.path.values, f.amplitude, f.zeta);
}

// {level: widths} for a simulated run
std::map<double, std::vector<double>> simulate_levels(const std::string& cfg) {
  RunConfig c = cfg_from(cfg);
  Model m = make_model(c);
  ExcursionLaw law = make_law(c, m);
  SpindleMeasure N;
  if (!c.start.empty()) {
    StartOptions o;
    o.cap = c.cap;
    o.store_levels = c.levels;
    N = start_from_partition(IntervalPartition(c.start), law, RngStream{c.seed, 0x51}, o);
  } else {
    PrmOptions o;
    o.x0 = c.x0;
    o.cap = c.cap;
    o.store_levels = c.levels;
    N = build_prm(law, make_horizon(c), RngStream{c.seed, 0x51}, o);
  }
  std::map<double, std::vector<double>> out;
  for (double y : c.levels) out[y] = skewer(y, N, m.g).widths();
  return out;
}

}  // namespace

PYBIND11_MODULE(_ipevo, mod) {
  py::register_exception<UsageError>(mod, "UsageError", PyExc_ValueError);
  py::register_exception<InadmissibleSpec>(mod, "InadmissibleSpec", PyExc_ValueError);

  mod.def("check", &check, py::arg("config"));
  mod.def("experiment", &experiment, py::arg("name"), py::arg("config"), py::arg("out_dir") = "");
  mod.def("experiment_names", &experiment_names);
  mod.def("spindle", &spindle, py::arg("config"), py::arg("index") = 0);
  mod.def("simulate_levels", &simulate_levels, py::arg("config"));

  mod.def("dprime", [](const std::vector<double>& a, const std::vector<double>& b) {
    auto r = dprime_full(IntervalPartition(a), IntervalPartition(b));
    return py::make_tuple(r.value, r.exact);
  });
  mod.def("dprime_bruteforce", [](const std::vector<double>& a, const std::vector<double>& b) {
    return dprime_bruteforce(IntervalPartition(a), IntervalPartition(b));
  });
  mod.def("dprime_truncated", [](const std::vector<double>& a, const std::vector<double>& b, double eps) {
    auto r = dprime_truncated(IntervalPartition(a), IntervalPartition(b), eps);
    return py::make_tuple(r.value, r.slack);
  });

  mod.def("scale", [](const std::string& cfg, double x) { return make_model(cfg_from(cfg)).Y.scale(x); });
  mod.def("speed_mass", [](const std::string& cfg, double x, double y) {
    return make_model(cfg_from(cfg)).Y.speed_mass(x, y);
  });
  mod.def("amplitude_tail", [](const std::string& cfg, double a, double w) {
    return amplitude_tail(make_model(cfg_from(cfg)).Y, a, w);
  });
  mod.def("lifetime_tail", [](const std::string& cfg, double z) {
    return lifetime_tail_closed(make_model(cfg_from(cfg)).Y, z);
  });
}
