#include "ipevo/scaffold.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "ipevo/conditions.hpp"

namespace ipevo {

Horizon Horizon::time(double T) {
  Horizon h;
  h.kind = Kind::fixed_time;
  h.T = T;
  return h;
}
Horizon Horizon::atoms(std::size_t count) {
  Horizon h;
  h.kind = Kind::fixed_count;
  h.count = count;
  return h;
}
Horizon Horizon::hit(double level) {
  Horizon h;
  h.kind = Kind::hit_level;
  h.level = level;
  return h;
}
Horizon Horizon::returns(int n) {
  Horizon h;
  h.kind = Kind::nth_return;
  h.n = n;
  return h;
}
Horizon Horizon::pass(double level) {
  Horizon h;
  h.kind = Kind::pass_above;
  h.level = level;
  return h;
}

std::string Horizon::describe() const {
  std::ostringstream os;
  switch (kind) {
    case Kind::fixed_time: os << "fixed_time T=" << T; break;
    case Kind::fixed_count: os << "fixed_count n=" << count; break;
    case Kind::hit_level: os << "hit_level " << level; break;
    case Kind::nth_return: os << "nth_return n=" << n; break;
    case Kind::pass_above: os << "pass_above " << level; break;
  }
  return os.str();
}

double compensator_drift(const ExcursionLaw& law, double* dropped, bool* bounded_variation) {
  const double a = law.cutoff;
  const double ta = truncated_lifetime_mass(law.Y, a);
  const bool bv = check_theorem_levy(law.Y) == LevyClass::bounded_variation;
  if (bounded_variation) *bounded_variation = bv;
  if (!bv) {
    if (dropped) *dropped = 0;
    return -ta;
  }
  // full int zeta dnu: push the cutoff down until the mass settles
  double prev = ta, full = ta;
  for (double b = a / 16; b > 1e-14 * a; b /= 16) {
    full = truncated_lifetime_mass(law.Y, b);
    if (std::abs(full - prev) <= 1e-9 * std::abs(full)) break;
    prev = full;
  }
  if (dropped) *dropped = full - ta;
  return -full;
}

namespace {

bool crosses(const Atom& a, double y) {
  return a.initial ? (a.pre <= y && y < a.post()) : (a.pre < y && y < a.post());
}

bool keep_path(const Atom& a, const PrmOptions& o) {
  if (o.store_all) return true;
  for (double y : o.store_levels)
    if (crosses(a, y)) return true;
  return false;
}

}  // namespace

SpindleMeasure build_prm(const ExcursionLaw& law, const Horizon& h, RngStream rs, const PrmOptions& o) {
  SpindleMeasure N;
  N.cutoff = law.cutoff;
  N.horizon = h;
  N.x0 = o.x0;
  N.cap = o.cap;
  N.drift = o.drift ? *o.drift : compensator_drift(law, &N.dropped_mass);
  const double d = N.drift;
  const double rate = law.rate();
  const bool need_paths = o.store_all || !o.store_levels.empty();

  Engine clock = rs.child(0xC10C).engine();
  std::exponential_distribution<double> gap(rate);
  double kill_at = kInf;
  if (o.kill_rate > 0) {
    Engine ke = rs.child(0x4B11).engine();
    kill_at = std::exponential_distribution<double>(o.kill_rate)(ke);
  }

  double t = 0, v = std::min(o.x0, o.cap);
  int returns = 0;
  using K = Horizon::Kind;
  if ((h.kind == K::fixed_time && h.T <= 0) || (h.kind == K::fixed_count && h.count == 0) ||
      (h.kind == K::hit_level && v <= h.level)) {
    N.end_time = 0;
    return N;
  }
  std::size_t i = 0;
  while (true) {
    const double tn = t + gap(clock);
    // continuous events strictly before the next jump
    double stop = kInf;
    bool kill = false;
    if (h.kind == K::fixed_time) stop = h.T;
    if (h.kind == K::hit_level && d < 0) stop = std::min(stop, t + (h.level - v) / d);
    if (h.kind == K::nth_return && d < 0 && v > 0) {
      double tr = t + (0.0 - v) / d;
      if (tr < tn && tr < kill_at && ++returns >= h.n) stop = std::min(stop, tr);
    }
    if (kill_at < stop) {
      stop = kill_at;
      kill = true;
    }
    if (stop <= tn) {
      N.end_time = stop;
      N.killed = kill;
      return N;
    }
    // jump at tn
    Engine e = rs.child(i + 1).engine();
    auto f = std::make_shared<Spindle>(sample_spindle(law, e, need_paths));
    Atom a;
    a.t = tn;
    a.pre = v + d * (tn - t);
    a.zeta = f->zeta;
    a.amplitude = f->amplitude;
    if (need_paths && keep_path(a, o)) a.f = f;
    N.truncated = N.truncated || f->truncated;
    N.atoms.push_back(a);
    ++i;
    v = std::min(a.post(), o.cap);
    t = tn;
    if (h.kind == K::pass_above && a.pre < h.level && h.level < a.post()) {
      N.end_time = tn;
      return N;
    }
    if (h.kind == K::fixed_count && N.atoms.size() >= h.count) {
      N.end_time = tn;
      return N;
    }
    if (N.atoms.size() >= o.max_atoms) {
      N.truncated = true;
      N.end_time = tn;
      return N;
    }
  }
}

ScaffoldPath::ScaffoldPath(const SpindleMeasure& N) : d_(N.drift), T_(N.end_time), x0_(std::min(N.x0, N.cap)), cap_(N.cap) {
  for (const auto& a : N.atoms) {
    t_.push_back(a.t);
    pre_.push_back(a.pre);
    start_.push_back(std::min(a.post(), N.cap));
  }
}

double ScaffoldPath::X(double t) const {
  auto it = std::upper_bound(t_.begin(), t_.end(), t);
  if (it == t_.begin()) return x0_ + d_ * t;
  std::size_t k = static_cast<std::size_t>(it - t_.begin()) - 1;
  return start_[k] + d_ * (t - t_[k]);
}

double ScaffoldPath::X_minus(double t) const {
  auto it = std::lower_bound(t_.begin(), t_.end(), t);
  if (it != t_.end() && *it == t) return pre_[static_cast<std::size_t>(it - t_.begin())];
  if (it == t_.begin()) return x0_ + d_ * t;
  std::size_t k = static_cast<std::size_t>(it - t_.begin()) - 1;
  return start_[k] + d_ * (t - t_[k]);
}

std::vector<ScaffoldPath::Segment> ScaffoldPath::segments() const {
  std::vector<Segment> out;
  double t0 = 0, v0 = x0_;
  for (std::size_t k = 0; k < t_.size(); ++k) {
    if (t_[k] > t0) out.push_back({t0, t_[k], v0});
    t0 = t_[k];
    v0 = start_[k];
  }
  if (T_ > t0) out.push_back({t0, T_, v0});
  return out;
}

ScaffoldPath build_scaffold(const SpindleMeasure& N) { return ScaffoldPath(N); }

LevelSlice level_slice(double y, const SpindleMeasure& N, const TransformSpec& g) {
  if (y > N.cap) throw std::invalid_argument("level above the scaffold cap");
  LevelSlice s;
  s.level = y;
  std::vector<double> w;
  for (std::size_t k = 0; k < N.atoms.size(); ++k) {
    const Atom& a = N.atoms[k];
    if (!crosses(a, y)) continue;
    if (!a.f) throw std::runtime_error("spindle path not kept for an atom crossing the level");
    double width = g(a.f->eval(y - a.pre));
    if (!(width >= 1e-12)) {
      ++s.dropped;
      continue;
    }
    s.crossings.push_back({k, a.t, width});
    w.push_back(width);
  }
  s.partition = IntervalPartition(std::move(w));
  return s;
}

IntervalPartition skewer(double y, const SpindleMeasure& N, const TransformSpec& g) {
  return level_slice(y, N, g).partition;
}

std::vector<double> crossing_widths(double y, const SpindleMeasure& N, const TransformSpec& g) {
  return level_slice(y, N, g).partition.widths();
}

double local_time_estimate(const ScaffoldPath& X, double y, double t, double h) {
  if (!(h > 0)) throw std::invalid_argument("bandwidth must be positive");
  const double d = X.drift();
  double occ = 0;
  for (const auto& s : X.segments()) {
    if (s.t0 >= t) break;
    double t1 = std::min(s.t1, t);
    double len = t1 - s.t0;
    if (d == 0) {
      if (std::abs(s.v0 - y) <= h) occ += len;
      continue;
    }
    double v1 = s.v0 + d * len;
    double lo = std::max(std::min(s.v0, v1), y - h), hi = std::min(std::max(s.v0, v1), y + h);
    if (hi > lo) occ += (hi - lo) / std::abs(d);
  }
  return occ / (2 * h);
}

DiversityEstimate diversity(const IntervalPartition& beta, const DiffusionSpec& Y, const TransformSpec& g,
                            const std::vector<double>& thresholds) {
  DiversityEstimate out;
  if (std::isfinite(Y.speed_mass(0.0, Y.b()))) {
    out.applicable = false;
    return out;
  }
  out.thresholds = thresholds;
  for (double x : thresholds) {
    std::size_t cnt = 0;
    for (double w : beta.widths()) cnt += w > x;
    double m = Y.speed_mass(g.g_inv(x), Y.c());
    out.ratios.push_back(static_cast<double>(cnt) / m);
  }
  const std::size_t n = out.ratios.size();
  if (n == 0) return out;
  const std::size_t k = std::min<std::size_t>(3, n);
  double s = 0, lo = kInf, hi = 0;
  for (std::size_t i = n - k; i < n; ++i) {
    s += out.ratios[i];
    lo = std::min(lo, out.ratios[i]);
    hi = std::max(hi, out.ratios[i]);
  }
  out.estimate = s / static_cast<double>(k);
  out.converged = hi == 0 || hi <= 1.2 * lo;
  return out;
}

BicladeSplit biclade_split(const SpindleMeasure& exc) {
  std::size_t k = exc.atoms.size();
  for (std::size_t i = 0; i < exc.atoms.size(); ++i) {
    const Atom& a = exc.atoms[i];
    if (a.pre < 0 && 0 < a.post()) {
      k = i;
      break;
    }
  }
  if (k == exc.atoms.size()) throw std::runtime_error("malformed excursion: no jump across 0");
  const Atom& c = exc.atoms[k];
  if (!c.f) throw std::runtime_error("crossing spindle path not kept");
  const double u = -c.pre;
  auto [lo, hi] = split_path(c.f->path, u);

  BicladeSplit out;
  out.crossing_atom = k;
  out.width = hi.values.front();

  SpindleMeasure& A = out.anti_clade;
  A.cutoff = exc.cutoff;
  A.horizon = exc.horizon;
  A.x0 = exc.x0;
  A.cap = exc.cap;
  A.drift = exc.drift;
  A.atoms.assign(exc.atoms.begin(), exc.atoms.begin() + static_cast<std::ptrdiff_t>(k));
  Atom la = c;
  auto lf = std::make_shared<Spindle>(*c.f);
  lf->path = lo;
  lf->zeta = u;
  lf->amplitude = lo.max();
  la.f = lf;
  la.zeta = u;
  la.amplitude = lf->amplitude;
  A.atoms.push_back(la);
  A.end_time = c.t;

  SpindleMeasure& C = out.clade;
  C.cutoff = exc.cutoff;
  C.horizon = exc.horizon;
  C.x0 = 0;
  C.cap = exc.cap;
  C.drift = exc.drift;
  Atom ua;
  auto uf = std::make_shared<Spindle>(*c.f);
  uf->path = hi;
  uf->zeta = c.post();
  uf->amplitude = hi.max();
  ua.f = uf;
  ua.t = 0;
  ua.pre = 0;
  ua.zeta = uf->zeta;
  ua.amplitude = uf->amplitude;
  ua.initial = true;
  C.atoms.push_back(ua);
  for (std::size_t i = k + 1; i < exc.atoms.size(); ++i) {
    Atom a = exc.atoms[i];
    a.t -= c.t;
    C.atoms.push_back(a);
  }
  C.end_time = exc.end_time - c.t;
  return out;
}

SpindleMeasure reverse_clade(const SpindleMeasure& N) {
  SpindleMeasure R = N;
  R.atoms.clear();
  const double len = N.end_time;
  double v = N.x0, tprev = 0;
  for (auto it = N.atoms.rbegin(); it != N.atoms.rend(); ++it) {
    Atom a = *it;
    a.t = len - it->t;
    if (it->f) {
      auto rf = std::make_shared<Spindle>(*it->f);
      rf->path = reversed(it->f->path);
      rf->argmax_time = rf->zeta - it->f->argmax_time;
      a.f = rf;
    }
    a.pre = v + N.drift * (a.t - tprev);
    v = a.post();
    tprev = a.t;
    R.atoms.push_back(a);
  }
  return R;
}

SpindleMeasure start_from_partition(const IntervalPartition& beta, const ExcursionLaw& law, RngStream rs,
                                    const StartOptions& o) {
  SpindleMeasure out;
  out.cutoff = law.cutoff;
  out.horizon = Horizon::hit(0.0);
  out.x0 = 0;
  out.cap = o.cap;
  out.drift = o.drift ? *o.drift : compensator_drift(law, &out.dropped_mass);
  double offset = 0;
  for (std::size_t i = 0; i < beta.size(); ++i) {
    const double u = law.g.g_inv(beta[i]);
    Engine e = rs.child(2 * i).engine();
    SimOpts so;
    so.max_steps = law.max_steps;
    auto f = std::make_shared<Spindle>();
    f->path = sample_zero_diffusion(law.Y, u, law.step_for(u), e, so);
    f->zeta = f->path.lifetime;
    f->amplitude = f->path.max();
    f->grid_max = f->amplitude;
    f->truncated = f->path.truncated;
    Atom a0;
    a0.t = offset;
    a0.pre = 0;
    a0.zeta = f->zeta;
    a0.amplitude = f->amplitude;
    a0.initial = true;
    a0.f = f;
    out.atoms.push_back(a0);
    out.truncated = out.truncated || f->truncated;

    PrmOptions po;
    po.x0 = f->zeta;
    po.cap = o.cap;
    po.store_all = o.store_all;
    po.store_levels = o.store_levels;
    po.max_atoms = o.max_atoms;
    po.drift = out.drift;
    SpindleMeasure blk = build_prm(law, Horizon::hit(0.0), rs.child(2 * i + 1), po);
    for (auto a : blk.atoms) {
      a.t += offset;
      out.atoms.push_back(std::move(a));
    }
    out.truncated = out.truncated || blk.truncated;
    offset += blk.end_time;
  }
  out.end_time = offset;
  return out;
}

}  // namespace ipevo
