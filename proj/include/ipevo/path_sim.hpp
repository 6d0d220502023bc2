#pragma once
#include <cstddef>
#include <utility>
#include <vector>

#include "ipevo/diffusion.hpp"
#include "ipevo/rng.hpp"

namespace ipevo {

// Path on a grid. Steps are stored run-length encoded as (count, length) so
// that concatenation and reversal stay exact: reversing twice gives back the
// same runs bit for bit. Paths produced by the samplers have one run of
// regular steps plus possibly a shorter last step (interpolated crossing).
struct PathGrid {
  double dt = 0;                                    // nominal step
  std::vector<double> values;
  std::vector<std::pair<std::size_t, double>> runs;  // step lengths, sum of counts = values.size() - 1
  double lifetime = 0;                              // time of the last grid point
  bool absorbed = false;
  bool truncated = false;  // step cap fired before the stopping rule

  std::size_t size() const { return values.size(); }
  bool empty() const { return values.empty(); }
  double time(std::size_t i) const;
  std::vector<double> times() const;
  // linear interpolation; 0 outside [0, lifetime] for absorbed paths
  double at(double t) const;
  double max() const;
  std::size_t argmax() const;

  void push(double v, double h);  // append a value reached after a step of length h
};

struct SimOpts {
  std::size_t max_steps = 50'000'000;
  double stop_above = kInf;  // stop (not absorbed) at the first grid crossing of this level
  bool store = true;         // keep values; false keeps only the endpoints (lifetime studies)
};

// 0-diffusion from x0 until a step lands <= 0
PathGrid sample_zero_diffusion(const DiffusionSpec& spec, double x0, double dt, Engine& eng, const SimOpts& o = {});

// two Euler runs at dt and dt/2 driven by the same Brownian increments
std::pair<PathGrid, PathGrid> sample_zero_diffusion_pair(const DiffusionSpec& spec, double x0, double dt, Engine& eng,
                                                         const SimOpts& o = {});

// several specs driven by one noise stream (coupling SDE); each run stops at its own absorption
std::vector<PathGrid> sample_coupled(const std::vector<DiffusionSpec>& specs, double x0, double dt, Engine& eng,
                                     std::size_t max_steps = 10'000'000);

// up-diffusion from x0 until it reaches w. Reflected at 0; the crossing time
// is interpolated inside the step and a Brownian-bridge test catches
// crossings between grid points. The last value is exactly w.
PathGrid sample_up_diffusion(const DiffusionSpec& spec, double x0, double w, double dt, Engine& eng,
                             const SimOpts& o = {});

// start level used for an up-leg aimed at w: 0 when the up-drift has a finite limit at 0
double up_entrance(const DiffusionSpec& spec, double w);

PathGrid reverse_path(const PathGrid& p);  // requires p.absorbed
PathGrid reversed(const PathGrid& p);      // no check, used to assemble spindles
// b must start where a ends; the shared point is kept once
PathGrid concat(const PathGrid& a, const PathGrid& b);
// cut at time u in (0, lifetime): [0, u] and [u, lifetime] shifted to start at 0,
// both carrying the interpolated value at u
std::pair<PathGrid, PathGrid> split_path(const PathGrid& p, double u);

}  // namespace ipevo
