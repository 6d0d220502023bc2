#include "ipevo/io.hpp"

#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

namespace ipevo {

namespace fs = std::filesystem;
using nlohmann::json;

std::string fmt(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  auto r = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, r.ptr);
}

void write_csv(std::ostream& os, const Table& t) {
  for (std::size_t i = 0; i < t.header.size(); ++i) os << (i ? "," : "") << t.header[i];
  os << '\n';
  for (const auto& r : t.rows) {
    for (std::size_t i = 0; i < r.size(); ++i) os << (i ? "," : "") << fmt(r[i]);
    os << '\n';
  }
}

void write_csv(const std::string& path, const Table& t) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot write " + path);
  write_csv(os, t);
}

Table read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  Table t;
  std::string line;
  if (!std::getline(in, line)) return t;
  {
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) t.header.push_back(cell);
  }
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string cell;
    std::vector<double> r;
    while (std::getline(ss, cell, ',')) {
      try {
        r.push_back(std::stod(cell));
      } catch (const std::exception&) {
        throw std::runtime_error(path + ":" + std::to_string(lineno) + ": not a number '" + cell + "'");
      }
    }
    if (r.size() != t.header.size()) throw std::runtime_error(path + ":" + std::to_string(lineno) + ": wrong column count");
    t.rows.push_back(std::move(r));
  }
  return t;
}

Table partition_table(const IntervalPartition& p) {
  Table t{{"ordinal", "width"}, {}};
  for (std::size_t i = 0; i < p.size(); ++i) t.add({static_cast<double>(i), p[i]});
  return t;
}

IntervalPartition read_partition_csv(const std::string& path) {
  Table t = read_csv(path);
  std::size_t col = t.header.size();
  for (std::size_t i = 0; i < t.header.size(); ++i)
    if (t.header[i] == "width") col = i;
  if (col == t.header.size()) throw std::runtime_error(path + ": no 'width' column");
  std::vector<double> w;
  for (const auto& r : t.rows) w.push_back(r[col]);
  return IntervalPartition(std::move(w));
}

Table atoms_table(const SpindleMeasure& N) {
  Table t{{"spindle_id", "t", "pre", "zeta", "amplitude", "initial", "stored"}, {}};
  for (std::size_t i = 0; i < N.atoms.size(); ++i) {
    const Atom& a = N.atoms[i];
    t.add({static_cast<double>(i), a.t, a.pre, a.zeta, a.amplitude, a.initial ? 1.0 : 0.0, a.f ? 1.0 : 0.0});
  }
  return t;
}

Table segments_table(const ScaffoldPath& X) {
  Table t{{"t0", "t1", "v0", "v1"}, {}};
  for (const auto& s : X.segments()) t.add({s.t0, s.t1, s.v0, s.v0 + X.drift() * (s.t1 - s.t0)});
  return t;
}

Table slices_table(const std::vector<LevelSlice>& slices) {
  Table t{{"level", "ordinal", "width", "spindle_id"}, {}};
  for (const auto& s : slices)
    for (std::size_t k = 0; k < s.crossings.size(); ++k)
      t.add({s.level, static_cast<double>(k), s.crossings[k].width, static_cast<double>(s.crossings[k].atom)});
  return t;
}

Table spindles_table(const SpindleMeasure& N) {
  Table t{{"spindle_id", "index", "step", "value"}, {}};
  for (std::size_t i = 0; i < N.atoms.size(); ++i) {
    if (!N.atoms[i].f) continue;
    const PathGrid& p = N.atoms[i].f->path;
    std::size_t k = 0;
    t.add({static_cast<double>(i), 0.0, 0.0, p.values[0]});
    for (const auto& [n, h] : p.runs)
      for (std::size_t r = 0; r < n; ++r) {
        ++k;
        t.add({static_cast<double>(i), static_cast<double>(k), h, p.values[k]});
      }
  }
  return t;
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot write " + path);
  os << text;
}

void write_run(const std::string& dir, const json& config, const SpindleMeasure& N,
               const std::vector<LevelSlice>& slices) {
  fs::create_directories(dir);
  json meta;
  meta["config"] = config;
  meta["cutoff"] = N.cutoff;
  meta["drift"] = N.drift;
  meta["x0"] = N.x0;
  meta["cap"] = std::isfinite(N.cap) ? json(N.cap) : json("inf");
  meta["end_time"] = N.end_time;
  meta["horizon"] = N.horizon.describe();
  meta["truncated"] = N.truncated;
  meta["killed"] = N.killed;
  meta["dropped_mass"] = N.dropped_mass;
  meta["atoms"] = N.atoms.size();
  write_text((fs::path(dir) / "run.json").string(), meta.dump(2) + "\n");
  write_csv((fs::path(dir) / "atoms.csv").string(), atoms_table(N));
  write_csv((fs::path(dir) / "segments.csv").string(), segments_table(ScaffoldPath(N)));
  write_csv((fs::path(dir) / "slices.csv").string(), slices_table(slices));
  write_csv((fs::path(dir) / "spindles.csv").string(), spindles_table(N));
}

SpindleMeasure read_run(const std::string& dir, json* config) {
  std::ifstream in(fs::path(dir) / "run.json");
  if (!in) throw std::runtime_error("no run.json in " + dir);
  json meta;
  in >> meta;
  if (config) *config = meta.value("config", json::object());
  SpindleMeasure N;
  N.cutoff = meta.at("cutoff").get<double>();
  N.drift = meta.at("drift").get<double>();
  N.x0 = meta.at("x0").get<double>();
  N.cap = meta.at("cap").is_number() ? meta.at("cap").get<double>() : kInf;
  N.end_time = meta.at("end_time").get<double>();
  N.truncated = meta.value("truncated", false);
  N.killed = meta.value("killed", false);
  N.dropped_mass = meta.value("dropped_mass", 0.0);

  Table at = read_csv((fs::path(dir) / "atoms.csv").string());
  std::map<std::size_t, std::shared_ptr<Spindle>> paths;
  Table sp = read_csv((fs::path(dir) / "spindles.csv").string());
  for (const auto& r : sp.rows) {
    auto id = static_cast<std::size_t>(r[0]);
    auto& f = paths[id];
    if (!f) f = std::make_shared<Spindle>();
    if (r[1] == 0) {
      f->path.values.push_back(r[3]);
    } else {
      f->path.push(r[3], r[2]);
    }
  }
  for (const auto& r : at.rows) {
    Atom a;
    a.t = r[1];
    a.pre = r[2];
    a.zeta = r[3];
    a.amplitude = r[4];
    a.initial = r[5] != 0;
    auto id = static_cast<std::size_t>(r[0]);
    if (r[6] != 0) {
      auto it = paths.find(id);
      if (it == paths.end()) throw std::runtime_error(dir + ": spindle " + std::to_string(id) + " has no path");
      auto& f = it->second;
      f->path.absorbed = true;
      f->path.lifetime = f->path.time(f->path.size() - 1);
      f->path.dt = f->path.runs.empty() ? 0 : f->path.runs.front().second;
      f->zeta = a.zeta;
      f->amplitude = a.amplitude;
      f->grid_max = f->path.max();
      a.f = f;
    }
    N.atoms.push_back(a);
  }
  return N;
}

}  // namespace ipevo
