#pragma once
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "ipevo/excursions.hpp"
#include "ipevo/partition.hpp"

namespace ipevo {

struct Atom {
  double t = 0;        // scaffold time (compressed above the level cap)
  double pre = 0;      // X(t-)
  double zeta = 0;     // jump height
  double amplitude = 0;
  bool initial = false;  // incomplete spindle of a starting partition: counts at level pre itself
  std::shared_ptr<const Spindle> f;  // null when the path was not kept
  double post() const { return pre + zeta; }
};

struct Horizon {
  enum class Kind { fixed_time, fixed_count, hit_level, nth_return, pass_above };
  Kind kind = Kind::fixed_time;
  double T = 0;            // fixed_time
  std::size_t count = 0;   // fixed_count
  double level = 0;        // hit_level / pass_above
  int n = 1;               // nth_return (downward passages through 0)

  static Horizon time(double T);
  static Horizon atoms(std::size_t count);
  static Horizon hit(double level);
  static Horizon returns(int n);
  static Horizon pass(double level);
  std::string describe() const;
};

struct PrmOptions {
  double x0 = 0;                    // X(0)
  double cap = kInf;                // scaffold time spent above this level is skipped
  double kill_rate = 0;             // independent Exp(q) killing, 0 = none
  bool store_all = false;           // keep every spindle path
  std::vector<double> store_levels; // keep paths of spindles crossing one of these levels
  std::size_t max_atoms = 20'000'000;
  std::optional<double> drift;      // overrides the compensator
};

struct SpindleMeasure {
  std::vector<Atom> atoms;
  double cutoff = 0;
  Horizon horizon;
  double x0 = 0;
  double cap = kInf;
  double drift = 0;
  double end_time = 0;
  bool truncated = false;  // atom cap fired before the horizon
  bool killed = false;     // Exp(q) clock rang first
  double dropped_mass = 0; // bounded variation: int zeta over spindles below the cutoff
};

// compensator slope: -int zeta 1{A > a} dnu for unbounded variation;
// bounded variation uses the full -int zeta dnu (extrapolated) and reports
// the part carried by dropped spindles
double compensator_drift(const ExcursionLaw& law, double* dropped = nullptr, bool* bounded_variation = nullptr);

SpindleMeasure build_prm(const ExcursionLaw& law, const Horizon& h, RngStream rs, const PrmOptions& o = {});

class ScaffoldPath {
 public:
  ScaffoldPath() = default;
  explicit ScaffoldPath(const SpindleMeasure& N);

  double X(double t) const;        // cadlag value
  double X_minus(double t) const;  // left limit
  double drift() const { return d_; }
  double end_time() const { return T_; }
  double start() const { return x0_; }
  double cap() const { return cap_; }
  // affine pieces (t0, t1, value at t0) with slope drift()
  struct Segment {
    double t0, t1, v0;
  };
  std::vector<Segment> segments() const;

 private:
  std::vector<double> t_, pre_, start_;  // atom times, X(t-), value right after each atom
  double d_ = 0, T_ = 0, x0_ = 0, cap_ = kInf;
};

ScaffoldPath build_scaffold(const SpindleMeasure& N);

struct Crossing {
  std::size_t atom = 0;
  double t = 0;
  double width = 0;
};
struct LevelSlice {
  double level = 0;
  std::vector<Crossing> crossings;
  IntervalPartition partition;
  std::size_t dropped = 0;  // widths below the 1e-12 floor
};
// widths g(f(y - X(t-))) over atoms with X(t-) < y < X(t), in atom order
LevelSlice level_slice(double y, const SpindleMeasure& N, const TransformSpec& g);
IntervalPartition skewer(double y, const SpindleMeasure& N, const TransformSpec& g);
std::vector<double> crossing_widths(double y, const SpindleMeasure& N, const TransformSpec& g);

// (1/2h) Leb{s <= t : |X(s) - y| <= h}, exact on the affine pieces
double local_time_estimate(const ScaffoldPath& X, double y, double t, double h);

struct DiversityEstimate {
  bool applicable = true;  // false for finite total speed mass
  std::vector<double> thresholds, ratios;
  double estimate = 0;
  bool converged = true;  // last three ratios within 20%
};
DiversityEstimate diversity(const IntervalPartition& beta, const DiffusionSpec& Y, const TransformSpec& g,
                            const std::vector<double>& thresholds);

// excursion of the scaffold about 0 split at its crossing jump
struct BicladeSplit {
  SpindleMeasure anti_clade, clade;
  double width = 0;  // spindle value at the split
  std::size_t crossing_atom = 0;
};
BicladeSplit biclade_split(const SpindleMeasure& exc);
SpindleMeasure reverse_clade(const SpindleMeasure& N);

// N_beta: for each block, an initial 0-diffusion spindle started at g^-1(width)
// followed by the PRM until the scaffold returns to 0; blocks concatenated in order
struct StartOptions {
  double cap = kInf;
  std::vector<double> store_levels{0.0};
  bool store_all = false;
  std::size_t max_atoms = 20'000'000;
  std::optional<double> drift;
};
SpindleMeasure start_from_partition(const IntervalPartition& beta, const ExcursionLaw& law, RngStream rs,
                                    const StartOptions& o = {});

}  // namespace ipevo
