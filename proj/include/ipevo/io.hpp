#pragma once
#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "ipevo/partition.hpp"
#include "ipevo/scaffold.hpp"

namespace ipevo {

// shortest text that reads back to the same double
std::string fmt(double x);

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
  void add(std::vector<double> r) { rows.push_back(std::move(r)); }
};
void write_csv(std::ostream& os, const Table& t);
void write_csv(const std::string& path, const Table& t);
Table read_csv(const std::string& path);

// ordinal,width
Table partition_table(const IntervalPartition& p);
IntervalPartition read_partition_csv(const std::string& path);
// spindle_id,t,pre,zeta,amplitude,initial,stored
Table atoms_table(const SpindleMeasure& N);
// t0,t1,v0,v1
Table segments_table(const ScaffoldPath& X);
// level,ordinal,width,spindle_id
Table slices_table(const std::vector<LevelSlice>& slices);
// spindle_id,index,step,value; step is the length of the step ending at that grid point
Table spindles_table(const SpindleMeasure& N);

void write_text(const std::string& path, const std::string& text);

// run directory: run.json (config echo + scaffold metadata), atoms.csv,
// segments.csv, slices.csv, spindles.csv
void write_run(const std::string& dir, const nlohmann::json& config, const SpindleMeasure& N,
               const std::vector<LevelSlice>& slices);
SpindleMeasure read_run(const std::string& dir, nlohmann::json* config = nullptr);

}  // namespace ipevo
