#include "ipevo/excursions.hpp"

#include <cmath>
#include <stdexcept>

#include "ipevo/models.hpp"

namespace ipevo {

double ExcursionLaw::rate() const {
  double r = amplitude_rate(Y, cutoff);
  if (cap < Y.c()) r -= 1.0 / Y.scale(cap);
  return r;
}

double amplitude_rate(const DiffusionSpec& Y, double a) {
  if (!(a > 0) || a >= Y.c()) throw std::domain_error("amplitude cutoff must lie in (0, c)");
  return 1.0 / Y.scale(a);
}

double amplitude_tail(const DiffusionSpec& Y, double a, double w) {
  if (!(a > 0) || a >= Y.c()) throw std::domain_error("amplitude cutoff must lie in (0, c)");
  if (w <= a) return 1.0;
  if (w >= Y.c()) {
    // only the atom survives
    double sc = Y.scale_at_c();
    return std::isfinite(sc) && w == Y.c() ? Y.scale(a) / sc : 0.0;
  }
  return Y.scale(a) / Y.scale(w);
}

double sample_amplitude(const ExcursionLaw& law, Engine& eng) {
  const auto& Y = law.Y;
  const double a = law.cutoff;
  const double sa = Y.scale(a);
  if (!(sa > 0)) throw std::domain_error("s(a) must be positive");
  const double sc = std::isfinite(Y.c()) ? Y.scale_at_c() : kInf;
  std::uniform_real_distribution<double> ud(0.0, 1.0);
  double u = 1.0 - ud(eng);  // (0, 1]
  if (law.cap < Y.c()) {
    // restrict to (a, cap]: u uniform on [s(a)/s(cap), 1]
    double lo_u = sa / Y.scale(law.cap);
    u = lo_u + (1.0 - lo_u) * u;
  } else if (std::isfinite(sc) && u <= sa / sc) {
    return Y.c();
  }
  const double target = sa / u;
  // bracket then bisect on s in log space
  double lo = a, hi = 2 * a;
  const double top = std::min(Y.c(), law.cap);
  while (true) {
    if (hi >= top) {
      hi = top;
      break;
    }
    if (Y.scale(hi) >= target) break;
    lo = hi;
    hi *= 2;
  }
  for (int i = 0; i < 200 && (hi - lo) > 1e-10 * hi; ++i) {
    double mid = std::isfinite(top) && hi == top ? 0.5 * (lo + hi) : std::sqrt(lo * hi);
    if (Y.scale(mid) < target) lo = mid;
    else hi = mid;
  }
  return 0.5 * (lo + hi);
}

Spindle sample_spindle_given(const ExcursionLaw& law, double w, Engine& eng, bool store) {
  const auto& Y = law.Y;
  const double h = law.step_for(w);
  SimOpts o;
  o.store = store;
  o.max_steps = law.max_steps;
  Spindle f;
  f.amplitude = w;
  PathGrid up1 = sample_up_diffusion(Y, up_entrance(Y, w), w, h, eng, o);
  up1.values.front() = 0.0;  // entrance at delta > 0 is a stand-in for 0
  PathGrid down;
  if (w >= Y.c()) {
    f.at_c = true;
    down = sample_zero_diffusion(Y, Y.c(), h, eng, o);
  } else {
    down = reversed(sample_up_diffusion(Y, up_entrance(Y, w), w, h, eng, o));
    down.values.back() = 0.0;
  }
  f.argmax_time = up1.lifetime;
  f.path = concat(up1, down);
  f.path.absorbed = true;
  f.path.dt = h;
  f.zeta = f.path.lifetime;
  f.grid_max = f.path.max();
  f.truncated = f.path.truncated;
  return f;
}

Spindle sample_spindle(const ExcursionLaw& law, Engine& eng, bool store) {
  double w = sample_amplitude(law, eng);
  return sample_spindle_given(law, w, eng, store);
}

std::vector<TailEstimate> lifetime_tail_mc(const ExcursionLaw& law, const std::vector<double>& zs, std::size_t n,
                                           RngStream rs, double ratio, unsigned threads) {
  std::vector<TailEstimate> out(zs.size());
  for (std::size_t k = 0; k < zs.size(); ++k) {
    const double z = zs[k];
    if (!(z > 0)) throw std::domain_error("lifetime tail needs z > 0");
    ExcursionLaw l = law;
    l.cutoff = ratio * z;
    l.cap = kInf;
    std::vector<char> hit(n, 0);
    RngStream base = rs.child(k);
    parallel_for(
        n,
        [&](std::size_t i) {
          Engine eng = base.child(i).engine();
          Spindle f = sample_spindle(l, eng, false);
          hit[i] = f.zeta > z;
        },
        threads);
    std::size_t cnt = 0;
    for (char c : hit) cnt += c;
    double p = static_cast<double>(cnt) / static_cast<double>(n);
    double r = l.rate();
    out[k] = {z, r * p, r * std::sqrt(p * (1 - p) / static_cast<double>(n)), n, l.cutoff};
  }
  return out;
}

double lifetime_tail_closed(const DiffusionSpec& Y, double z) {
  const auto& cf = Y.closed();
  return cf.lifetime_tail ? cf.lifetime_tail(z) : std::nan("");
}

double lifetime_tail_mixture(double alpha, double z) {
  // m(u) = u^{-1-alpha}/2 for BESQ(-2 alpha) with s'(1) = 1
  auto f = [alpha, z](double u) {
    InverseGammaLaw ig = besq_lifetime_law(alpha, u);
    return 0.5 * std::pow(u, -1 - alpha) * ig.pdf(z);
  };
  return integrate(f, 0.0, kInf).value;
}

MassEstimate truncated_lifetime_mass_mc(const ExcursionLaw& law, std::size_t n, RngStream rs, unsigned threads) {
  std::vector<double> z(n);
  parallel_for(
      n,
      [&](std::size_t i) {
        Engine eng = rs.child(i).engine();
        z[i] = sample_spindle(law, eng, false).zeta;
      },
      threads);
  double s = 0, s2 = 0;
  for (double v : z) {
    s += v;
    s2 += v * v;
  }
  double nn = static_cast<double>(n);
  double mean = s / nn, var = std::max(s2 / nn - mean * mean, 0.0);
  double r = law.rate();
  return {r * mean, r * std::sqrt(var / nn), n};
}

}  // namespace ipevo
