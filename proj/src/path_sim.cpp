#include "ipevo/path_sim.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace ipevo {

double PathGrid::time(std::size_t i) const {
  double t = 0;
  for (const auto& [n, h] : runs) {
    if (i <= n) return t + static_cast<double>(i) * h;
    t += static_cast<double>(n) * h;
    i -= n;
  }
  return t;
}

std::vector<double> PathGrid::times() const {
  std::vector<double> out;
  out.reserve(values.size());
  out.push_back(0.0);
  double t = 0;
  for (const auto& [n, h] : runs) {
    for (std::size_t k = 1; k <= n; ++k) out.push_back(t + static_cast<double>(k) * h);
    t += static_cast<double>(n) * h;
  }
  return out;
}

double PathGrid::at(double t) const {
  if (values.empty()) return 0.0;
  if (t < 0) return absorbed ? 0.0 : values.front();
  if (t >= lifetime) return absorbed ? 0.0 : values.back();
  double t0 = 0;
  std::size_t base = 0;
  for (const auto& [n, h] : runs) {
    double span = static_cast<double>(n) * h;
    if (t < t0 + span) {
      double r = (t - t0) / h;
      std::size_t j = std::min(static_cast<std::size_t>(r), n - 1);
      double frac = r - static_cast<double>(j);
      double a = values[base + j], b = values[base + j + 1];
      return a + frac * (b - a);
    }
    t0 += span;
    base += n;
  }
  return values.back();
}

double PathGrid::max() const { return values.empty() ? 0.0 : *std::max_element(values.begin(), values.end()); }

std::size_t PathGrid::argmax() const {
  return static_cast<std::size_t>(std::max_element(values.begin(), values.end()) - values.begin());
}

void PathGrid::push(double v, double h) {
  values.push_back(v);
  if (!runs.empty() && runs.back().second == h)
    ++runs.back().first;
  else
    runs.emplace_back(1, h);
}

namespace {

void finish(PathGrid& p) {
  double t = 0;
  for (const auto& [n, h] : p.runs) t += static_cast<double>(n) * h;
  p.lifetime = t;
}

// keep only the endpoints, one step of the full length
void compress(PathGrid& p) {
  if (p.values.size() <= 2) return;
  double first = p.values.front(), last = p.values.back();
  p.values = {first, last};
  p.runs = {{1, p.lifetime}};
}

double noise_scale(const DiffusionSpec& s, double x) { return std::sqrt(std::max(s.sigma2(std::abs(x)), 0.0)); }

double clip_c(const DiffusionSpec& s, double x) { return std::isfinite(s.c()) ? std::min(x, s.c()) : x; }

// one path state for the zero-diffusion loop
struct ZeroRun {
  PathGrid p;
  double x;
  double h;
  bool done = false;
  std::size_t steps = 0;
  void step(const DiffusionSpec& spec, double z, const SimOpts& o) {
    if (done) return;
    double xn = x + spec.mu(x) * h + noise_scale(spec, x) * std::sqrt(h) * z;
    xn = clip_c(spec, xn);
    ++steps;
    if (xn <= 0) {
      p.push(0.0, h);
      p.absorbed = true;
      done = true;
    } else {
      p.push(xn, h);
      x = xn;
      if (xn >= o.stop_above) done = true;
    }
    // without storage keep the start and the current point; runs stay exact
    if (!o.store && p.values.size() > 2) p.values.erase(p.values.begin() + 1);
    if (!done && steps >= o.max_steps) {
      p.truncated = true;
      done = true;
    }
  }
};

ZeroRun start_run(double x0, double dt) {
  ZeroRun r;
  r.p.dt = dt;
  r.p.values.push_back(x0);
  r.x = x0;
  r.h = dt;
  return r;
}

void check_zero_args(const DiffusionSpec& spec, double x0, double dt) {
  if (!(dt > 0)) throw std::invalid_argument("dt must be positive");
  if (!(x0 >= 0) || (std::isfinite(spec.c()) && x0 > spec.c())) throw std::invalid_argument("x0 outside [0, c]");
}

}  // namespace

PathGrid sample_zero_diffusion(const DiffusionSpec& spec, double x0, double dt, Engine& eng, const SimOpts& o) {
  check_zero_args(spec, x0, dt);
  ZeroRun r = start_run(x0, dt);
  if (x0 <= 0) {
    r.p.absorbed = true;
    return r.p;
  }
  std::normal_distribution<double> nd;
  while (!r.done) r.step(spec, nd(eng), o);
  finish(r.p);
  if (!o.store) compress(r.p);
  return r.p;
}

std::pair<PathGrid, PathGrid> sample_zero_diffusion_pair(const DiffusionSpec& spec, double x0, double dt, Engine& eng,
                                                         const SimOpts& o) {
  check_zero_args(spec, x0, dt);
  ZeroRun coarse = start_run(x0, dt), fine = start_run(x0, dt / 2);
  SimOpts of = o;
  of.max_steps = o.max_steps * 2;
  std::normal_distribution<double> nd;
  if (x0 <= 0) {
    coarse.p.absorbed = fine.p.absorbed = true;
    return {coarse.p, fine.p};
  }
  while (!coarse.done || !fine.done) {
    double z1 = nd(eng), z2 = nd(eng);
    fine.step(spec, z1, of);
    fine.step(spec, z2, of);
    coarse.step(spec, (z1 + z2) / std::sqrt(2.0), o);
  }
  finish(coarse.p);
  finish(fine.p);
  if (!o.store) {
    compress(coarse.p);
    compress(fine.p);
  }
  return {coarse.p, fine.p};
}

std::vector<PathGrid> sample_coupled(const std::vector<DiffusionSpec>& specs, double x0, double dt, Engine& eng,
                                     std::size_t max_steps) {
  std::vector<ZeroRun> runs;
  SimOpts o;
  o.max_steps = max_steps;
  for (const auto& s : specs) {
    check_zero_args(s, x0, dt);
    runs.push_back(start_run(x0, dt));
  }
  std::normal_distribution<double> nd;
  auto alive = [&] {
    for (auto& r : runs)
      if (!r.done) return true;
    return false;
  };
  while (alive()) {
    double z = nd(eng);
    for (std::size_t i = 0; i < runs.size(); ++i) {
      // grid points stay aligned across runs until each one stops
      runs[i].step(specs[i], z, o);
    }
  }
  std::vector<PathGrid> out;
  for (auto& r : runs) {
    finish(r.p);
    out.push_back(std::move(r.p));
  }
  return out;
}

double up_entrance(const DiffusionSpec& spec, double w) {
  const auto& cf = spec.closed();
  if (cf.mu_up) {
    double v = cf.mu_up(1e-12 * w);
    if (std::isfinite(v)) return 0.0;
  }
  return 1e-4 * w;
}

PathGrid sample_up_diffusion(const DiffusionSpec& spec, double x0, double w, double dt, Engine& eng,
                             const SimOpts& o) {
  if (!(dt > 0)) throw std::invalid_argument("dt must be positive");
  if (!(x0 >= 0 && x0 <= w)) throw std::invalid_argument("need 0 <= x0 <= w");
  if (std::isfinite(spec.c()) && w > spec.c()) throw std::invalid_argument("w above c");
  PathGrid p;
  p.dt = dt;
  p.values.push_back(x0);
  if (x0 >= w) return p;
  Fn mu_up = spec.closed().mu_up;
  if (!mu_up) {
    mu_up = [&spec](double x) { return spec.mu(x) + spec.scale_derivative(x) / spec.scale(x) * spec.sigma2(x); };
  }
  std::normal_distribution<double> nd;
  std::uniform_real_distribution<double> ud(0.0, 1.0);
  const double sq = std::sqrt(dt);
  double x = x0;
  std::size_t steps = 0;
  auto put = [&](double v, double h) {
    p.push(v, h);
    if (!o.store && p.values.size() > 2) p.values.erase(p.values.begin() + 1);
  };
  while (true) {
    double s2 = std::max(spec.sigma2(x), 0.0);
    double xn = std::abs(x + mu_up(x) * dt + std::sqrt(s2) * sq * nd(eng));
    ++steps;
    if (xn >= w) {
      put(w, (w - x) / (xn - x) * dt);
      break;
    }
    // Brownian-bridge check for a crossing between the grid points
    if (s2 > 0) {
      double e = 2.0 * (w - x) * (w - xn) / (s2 * dt);
      if (e < 30 && ud(eng) < std::exp(-e)) {
        put(w, 0.5 * dt);
        break;
      }
    }
    put(xn, dt);
    x = xn;
    if (steps >= o.max_steps) {
      p.truncated = true;
      break;
    }
  }
  finish(p);
  if (!o.store) compress(p);
  return p;
}

PathGrid reversed(const PathGrid& p) {
  PathGrid r;
  r.dt = p.dt;
  r.values.assign(p.values.rbegin(), p.values.rend());
  r.runs.assign(p.runs.rbegin(), p.runs.rend());
  r.lifetime = p.lifetime;
  r.absorbed = p.absorbed;
  r.truncated = p.truncated;
  return r;
}

PathGrid reverse_path(const PathGrid& p) {
  if (!p.absorbed) throw std::invalid_argument("reverse_path: path is not absorbed");
  return reversed(p);
}

PathGrid concat(const PathGrid& a, const PathGrid& b) {
  if (a.values.empty()) return b;
  if (b.values.empty()) return a;
  PathGrid out = a;
  out.values.insert(out.values.end(), b.values.begin() + 1, b.values.end());
  for (const auto& r : b.runs) {
    if (!out.runs.empty() && out.runs.back().second == r.second)
      out.runs.back().first += r.first;
    else
      out.runs.push_back(r);
  }
  out.lifetime = a.lifetime + b.lifetime;
  out.absorbed = b.absorbed;
  out.truncated = a.truncated || b.truncated;
  return out;
}

std::pair<PathGrid, PathGrid> split_path(const PathGrid& p, double u) {
  if (!(u > 0 && u < p.lifetime)) throw std::invalid_argument("split_path: u outside (0, lifetime)");
  PathGrid lo, hi;
  lo.dt = hi.dt = p.dt;
  lo.values.push_back(p.values.front());
  double t0 = 0;
  std::size_t base = 0;
  bool cut = false;
  for (const auto& [n, h] : p.runs) {
    if (cut) {
      for (std::size_t k = 1; k <= n; ++k) hi.push(p.values[base + k], h);
      base += n;
      continue;
    }
    double span = static_cast<double>(n) * h;
    if (u < t0 + span) {
      double r = (u - t0) / h;
      std::size_t j = std::min(static_cast<std::size_t>(r), n - 1);
      double tj = t0 + static_cast<double>(j) * h;
      for (std::size_t k = 1; k <= j; ++k) lo.push(p.values[base + k], h);
      double a = p.values[base + j], b = p.values[base + j + 1];
      double mid = a + (u - tj) / h * (b - a);
      if (u > tj) lo.push(mid, u - tj);
      else mid = a;
      hi.values.push_back(mid);
      hi.push(b, tj + h - u);
      for (std::size_t k = j + 2; k <= n; ++k) hi.push(p.values[base + k], h);
      cut = true;
    } else {
      for (std::size_t k = 1; k <= n; ++k) lo.push(p.values[base + k], h);
    }
    t0 += span;
    base += n;
  }
  lo.lifetime = u;
  hi.lifetime = p.lifetime - u;
  hi.absorbed = p.absorbed;
  lo.truncated = hi.truncated = p.truncated;
  return {lo, hi};
}

}  // namespace ipevo
