#pragma once
#include <vector>

#include "ipevo/diffusion.hpp"
#include "ipevo/path_sim.hpp"

namespace ipevo {

// Y-valued excursion; the Z-valued spindle is g applied pointwise
struct Spindle {
  PathGrid path;
  double zeta = 0;
  double amplitude = 0;     // the sampled W, not the grid maximum
  double argmax_time = 0;   // end of the first leg
  double grid_max = 0;      // diagnostic
  bool at_c = false;        // amplitude atom at c
  bool truncated = false;

  double eval(double u) const { return path.at(u); }
};

struct ExcursionLaw {
  DiffusionSpec Y;
  TransformSpec g = TransformSpec::identity();
  double cutoff = 0.1;        // amplitude truncation a
  double cap = kInf;          // optional upper amplitude bound (A in (a, cap])
  double dt = 1e-4;
  double dt_rel = 0;          // when > 0 each spindle uses min(dt, dt_rel * W)
  std::size_t max_steps = 50'000'000;

  double rate() const;        // nu(a < A <= cap), = 1/s(a) without a cap
  double step_for(double w) const { return dt_rel > 0 ? std::min(dt, dt_rel * w) : dt; }
  double width(const Spindle& f, double u) const { return g(f.eval(u)); }
};

double amplitude_rate(const DiffusionSpec& Y, double a);
// P(A > w | A > a) = s(a)/s(w), with the atom at c counted for w < c
double amplitude_tail(const DiffusionSpec& Y, double a, double w);
double sample_amplitude(const ExcursionLaw& law, Engine& eng);
// W given; store = false keeps only the endpoints (lifetime studies)
Spindle sample_spindle_given(const ExcursionLaw& law, double w, Engine& eng, bool store = true);
Spindle sample_spindle(const ExcursionLaw& law, Engine& eng, bool store = true);

struct TailEstimate {
  double z = 0;
  double value = 0;
  double stderr_ = 0;
  std::size_t n = 0;
  double cutoff = 0;
};
// nu(zeta > z) by Monte Carlo. For each z the amplitude cutoff is ratio * z:
// spindles below it are too short to reach z (checked by halving ratio).
std::vector<TailEstimate> lifetime_tail_mc(const ExcursionLaw& law, const std::vector<double>& zs, std::size_t n,
                                           RngStream rs, double ratio = 0.2, unsigned threads = 0);
// closed form when the spec carries one (BESQ family), NaN otherwise
double lifetime_tail_closed(const DiffusionSpec& Y, double z);
// int m(u) q(u; z) du with q the InverseGamma(1+alpha, u/2) density at z; proportional to nu(zeta > z)
double lifetime_tail_mixture(double alpha, double z);

// Monte Carlo check of int zeta 1{a < A <= cap} dnu: rate * mean lifetime.
// Without a cap the lifetime can have infinite variance (BESQ, alpha <= 1).
struct MassEstimate {
  double value = 0, stderr_ = 0;
  std::size_t n = 0;
};
MassEstimate truncated_lifetime_mass_mc(const ExcursionLaw& law, std::size_t n, RngStream rs, unsigned threads = 0);

}  // namespace ipevo
