#include "ipevo/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "ipevo/excursions.hpp"
#include "ipevo/models.hpp"
#include "ipevo/partition.hpp"
#include "ipevo/path_sim.hpp"
#include "ipevo/scaffold.hpp"
#include "ipevo/stats.hpp"

namespace ipevo {

using nlohmann::json;

namespace {

constexpr double kAlpha = 0.01;

std::string num(double x) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.6g", x);
  return buf;
}

json finite_or_null(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

TestResult ks_result(std::string name, const KsResult& ks, std::string anchor) {
  TestResult r;
  r.name = std::move(name);
  r.statistic_name = "KS D";
  r.statistic = ks.d;
  r.p_value = ks.p;
  r.threshold = kAlpha;
  r.rule = "pass if p >= 0.01";
  r.pass = ks.p >= kAlpha;
  r.sizes = {{"n", static_cast<double>(ks.n)}};
  r.anchor = std::move(anchor);
  return r;
}

// the step sizes the experiment runs at, overridable from the config
double key(const RunConfig& c, const char* k, double def) { return c.num(k, def); }
std::size_t nkey(const RunConfig& c, const char* k, std::size_t def) { return c.count(k, def); }

Model model_or_default(const RunConfig& c) { return make_model(c); }

ExcursionLaw law_for(const RunConfig& c, const Model& m, double cutoff, double dt, double dt_rel) {
  ExcursionLaw law{m.Y};
  law.g = m.g;
  law.cutoff = key(c, "cutoff", cutoff);
  law.dt = key(c, "dt", dt);
  law.dt_rel = key(c, "dt_rel", dt_rel);
  return law;
}

// ---------------------------------------------------------------- hitting-prob

ExperimentOutput hitting_prob(const RunConfig& c) {
  ExperimentOutput out;
  Model m = model_or_default(c);
  const double x = key(c, "x", 1.0), w = key(c, "w", 4.0), dt = key(c, "dt", 1e-4);
  const std::size_t n = nkey(c, "paths", 10000);
  const double truth = m.Y.scale(x) / m.Y.scale(w);
  std::vector<char> hc(n), hf(n);
  RngStream rs{c.seed, 1};
  parallel_for(n, [&](std::size_t i) {
    Engine e = rs.child(i).engine();
    SimOpts o;
    o.stop_above = w;
    o.store = false;
    auto [pc, pf] = sample_zero_diffusion_pair(m.Y, x, dt, e, o);
    hc[i] = !pc.absorbed && !pc.truncated;
    hf[i] = !pf.absorbed && !pf.truncated;
  });
  std::size_t kc = 0, kf = 0;
  double sd = 0;
  for (std::size_t i = 0; i < n; ++i) {
    kc += hc[i];
    kf += hf[i];
  }
  auto cc = binomial_ci(kc, n), cf = binomial_ci(kf, n);
  std::vector<double> diff(n);
  for (std::size_t i = 0; i < n; ++i) diff[i] = static_cast<double>(hf[i]) - static_cast<double>(hc[i]);
  sd = std::sqrt(variance(diff) / static_cast<double>(n));

  TestResult r;
  r.name = "hitting probability at dt";
  r.statistic_name = "estimate";
  r.statistic = cc.p;
  r.ci_lo = cc.lo;
  r.ci_hi = cc.hi;
  r.threshold = truth;
  r.rule = "pass if s(x)/s(w) lies in estimate +- 3 binomial sd";
  r.pass = cc.lo <= truth && truth <= cc.hi;
  r.sizes = {{"paths", static_cast<double>(n)}};
  r.diagnostics = {{"dt", dt}, {"sd", cc.sigma}, {"truth", truth}};
  r.anchor = "P_x(T_w < T_0) = s(x)/s(w) = (x/w)^{1+alpha}";
  out.results.push_back(r);

  TestResult q;
  q.name = "dt/2 refinement";
  q.statistic_name = "|err(dt/2)| - |err(dt)|";
  q.statistic = std::abs(cf.p - truth) - std::abs(cc.p - truth);
  q.threshold = 2 * sd;
  q.rule = "pass if the refined error does not grow by more than 2 sd of the paired difference";
  q.pass = q.statistic <= q.threshold;
  q.sizes = r.sizes;
  q.diagnostics = {{"estimate dt/2", cf.p}, {"estimate dt", cc.p}, {"paired sd", sd}};
  q.anchor = r.anchor;
  out.results.push_back(q);

  Table t{{"dt", "estimate", "sd", "truth"}, {}};
  t.add({dt, cc.p, cc.sigma, truth});
  t.add({dt / 2, cf.p, cf.sigma, truth});
  out.tables["hitting"] = t;
  return out;
}

// ---------------------------------------------------------------- besq-lifetime

ExperimentOutput besq_lifetime(const RunConfig& c) {
  ExperimentOutput out;
  Model m = model_or_default(c);
  if (!m.besq_alpha) throw UsageError("besq-lifetime needs a besq model");
  const double u = key(c, "u", 1.0), dt = key(c, "dt", 1e-4);
  const std::size_t n = nkey(c, "paths", 5000);
  const InverseGammaLaw ig = besq_lifetime_law(*m.besq_alpha, u);
  std::vector<double> zc(n), zf(n);
  std::vector<char> trunc(n);
  RngStream rs{c.seed, 2};
  parallel_for(n, [&](std::size_t i) {
    Engine e = rs.child(i).engine();
    SimOpts o;
    o.store = false;
    auto [pc, pf] = sample_zero_diffusion_pair(m.Y, u, dt, e, o);
    zc[i] = pc.lifetime;
    zf[i] = pf.lifetime;
    trunc[i] = pc.truncated || pf.truncated;
  });
  auto cdf = [&](double z) { return ig.cdf(z); };
  auto kc = ks_one_sample(zc, cdf), kf = ks_one_sample(zf, cdf);
  auto kcf = ks_two_sample(zc, zf);
  const double crit = ks_critical(static_cast<double>(n), kAlpha);
  // Euler absorption bias is O(sqrt dt): F_dt - F_0 ~ (F_dt - F_dt/2) / (1 - 2^-1/2)
  const double bias = kcf.d / (1 - 1 / std::sqrt(2.0));

  TestResult r;
  r.name = "lifetime KS vs InverseGamma(1+alpha, u/2)";
  r.statistic_name = "KS D";
  r.statistic = kc.d;
  r.p_value = kc.p;
  r.threshold = crit + bias;
  r.rule = "pass if D <= D_crit(0.01) + refinement bias estimate";
  r.pass = kc.d <= r.threshold;
  r.sizes = {{"paths", static_cast<double>(n)},
             {"truncated", static_cast<double>(std::accumulate(trunc.begin(), trunc.end(), 0))}};
  r.diagnostics = {{"D_crit", crit}, {"bias estimate", bias}, {"D dt/2", kf.d}, {"p dt/2", kf.p}, {"dt", dt}};
  r.anchor = "zeta under Q_u ~ InverseGamma(1+alpha, u/2)";
  out.results.push_back(r);

  Table t{{"path", "zeta_dt", "zeta_dt2"}, {}};
  for (std::size_t i = 0; i < n; ++i) t.add({static_cast<double>(i), zc[i], zf[i]});
  out.tables["lifetimes"] = t;
  return out;
}

// ---------------------------------------------------------------- amplitude-law

ExperimentOutput amplitude_law(const RunConfig& c) {
  ExperimentOutput out;
  Model m = model_or_default(c);
  ExcursionLaw law = law_for(c, m, 0.1, 1e-3, 0.01);
  const std::size_t n = nkey(c, "paths", 10000);
  std::vector<double> w(n);
  RngStream rs{c.seed, 3};
  parallel_for(n, [&](std::size_t i) {
    Engine e = rs.child(i).engine();
    w[i] = sample_amplitude(law, e);
  });
  const double a = law.cutoff;
  auto ks = ks_one_sample(w, [&](double x) { return x <= a ? 0.0 : 1 - amplitude_tail(law.Y, a, x); });
  auto r = ks_result("amplitude KS vs 1 - s(a)/s(w)", ks, "P(A > w | A > a) = s(a)/s(w)");
  r.diagnostics = {{"cutoff", a}};
  out.results.push_back(r);
  Table t{{"index", "amplitude"}, {}};
  for (std::size_t i = 0; i < n; ++i) t.add({static_cast<double>(i), w[i]});
  out.tables["amplitudes"] = t;
  return out;
}

// ---------------------------------------------------------------- up-moments

ExperimentOutput up_moments(const RunConfig& c) {
  ExperimentOutput out;
  Model m = model_or_default(c);
  const double w = key(c, "w", 1.0), dt = key(c, "dt", 1e-4), tol = key(c, "tolerance", 0.05);
  const std::size_t n = nkey(c, "paths", 10000);
  const double m1 = up_mean_time(m.Y, w), m2 = up_second_moment(m.Y, w);
  const double x0 = up_entrance(m.Y, w);
  auto run = [&](double h, std::uint64_t stream) {
    std::vector<double> T(n);
    RngStream rs{c.seed, stream};
    parallel_for(n, [&](std::size_t i) {
      Engine e = rs.child(i).engine();
      SimOpts o;
      o.store = false;
      T[i] = sample_up_diffusion(m.Y, x0, w, h, e, o).lifetime;
    });
    return T;
  };
  auto T = run(dt, 4), T2 = run(dt / 2, 5);
  auto moments = [](const std::vector<double>& v) {
    double s1 = 0, s2 = 0;
    for (double x : v) {
      s1 += x;
      s2 += x * x;
    }
    return std::pair{s1 / static_cast<double>(v.size()), s2 / static_cast<double>(v.size())};
  };
  auto [e1, e2] = moments(T);
  auto [f1, f2] = moments(T2);
  auto add = [&](const char* name, double est, double truth, double refined, const char* anchor) {
    TestResult r;
    r.name = name;
    r.statistic_name = "relative error";
    r.statistic = std::abs(est - truth) / truth;
    r.threshold = tol;
    r.rule = "pass if relative error < 0.05";
    r.pass = r.statistic < tol;
    r.sizes = {{"paths", static_cast<double>(n)}};
    r.diagnostics = {{"estimate", est}, {"quadrature", truth}, {"estimate dt/2", refined},
                     {"relative error dt/2", std::abs(refined - truth) / truth}, {"dt", dt}};
    r.anchor = anchor;
    out.results.push_back(r);
  };
  add("E[T_w] up-diffusion", e1, m1, f1, "E_up[T_w] = int_0^w (s_up(w) - s_up(v)) M_up(dv)");
  add("E[T_w^2] up-diffusion", e2, m2, f2, "E_up[T_w^2] from the iterated Green kernel");
  Table t{{"path", "T_dt", "T_dt2"}, {}};
  for (std::size_t i = 0; i < n; ++i) t.add({static_cast<double>(i), T[i], T2[i]});
  out.tables["up_times"] = t;
  return out;
}

// ---------------------------------------------------------------- first passage over 0

struct Passage {
  bool done = false;  // passed 0 before the kill clock and the atom cap
  double width = kNaN, overshoot = kNaN, undershoot = kNaN;
};

std::vector<Passage> first_passages(const ExcursionLaw& law, double q, std::size_t attempts, RngStream rs,
                                    double drift, bool need_width, std::size_t* atoms = nullptr) {
  std::vector<Passage> out(attempts);
  std::vector<std::size_t> counts(attempts);
  parallel_for(attempts, [&](std::size_t r) {
    PrmOptions o;
    o.kill_rate = q;
    o.drift = drift;
    if (need_width) o.store_levels = {0.0};
    auto N = build_prm(law, Horizon::pass(0.0), rs.child(r), o);
    counts[r] = N.atoms.size();
    if (N.killed || N.truncated || N.atoms.empty()) return;
    const Atom& a = N.atoms.back();
    if (!(a.pre < 0 && a.post() > 0)) return;
    Passage p;
    p.done = true;
    p.undershoot = -a.pre;
    p.overshoot = a.post();
    if (need_width && a.f) p.width = law.width(*a.f, -a.pre);
    out[r] = p;
  });
  if (atoms) *atoms = std::accumulate(counts.begin(), counts.end(), std::size_t{0});
  return out;
}

ExperimentOutput crossing_width(const RunConfig& c) {
  ExperimentOutput out;
  Model m = model_or_default(c);
  ExcursionLaw law = law_for(c, m, 0.05, 1e-3, 0.01);
  const double q = key(c, "kill_rate", 0.003);
  const double w0 = key(c, "w0", law.cutoff), w1 = key(c, "w1", 1.0);
  const std::size_t attempts = nkey(c, "attempts", 6000), refine = nkey(c, "refine_attempts", 1500);
  const double d = compensator_drift(law);
  const double norm = m.Z.speed_mass(w0, w1);
  auto cdf = [&](double x) { return x <= w0 ? 0.0 : x >= w1 ? 1.0 : m.Z.speed_mass(w0, x) / norm; };
  auto widths = [&](const std::vector<Passage>& ps) {
    std::vector<double> w;
    for (const auto& p : ps)
      if (p.done && p.width >= w0 && p.width <= w1) w.push_back(p.width);
    return w;
  };
  std::size_t atoms = 0;
  auto ps = first_passages(law, q, attempts, RngStream{c.seed, 6}, d, true, &atoms);
  auto w = widths(ps);
  if (w.empty()) throw std::runtime_error("crossing-width: no widths in the window");
  auto ks = ks_one_sample(w, cdf);
  auto r = ks_result("crossing widths KS vs normalized M(dx) on [w0, w1]", ks,
                     "crossing width intensity proportional to the speed measure M(dx)");
  r.sizes.push_back({"attempts", static_cast<double>(attempts)});
  r.sizes.push_back({"atoms", static_cast<double>(atoms)});
  std::size_t done = 0;
  for (const auto& p : ps) done += p.done;
  r.diagnostics = {{"cutoff", law.cutoff}, {"w0", w0}, {"w1", w1}, {"kill rate", q}, {"passages", static_cast<double>(done)}};

  // refinement: halve the spindle step
  ExcursionLaw fine = law;
  fine.dt /= 2;
  fine.dt_rel /= 2;
  if (refine > 0) {
    auto pf = first_passages(fine, q, refine, RngStream{c.seed, 7}, d, true);
    auto wf = widths(pf);
    if (!wf.empty()) {
      auto kf = ks_one_sample(wf, cdf);
      r.diagnostics.push_back({"KS D dt/2", kf.d});
      r.diagnostics.push_back({"p dt/2", kf.p});
      r.diagnostics.push_back({"n dt/2", static_cast<double>(kf.n)});
    }
  }
  out.results.push_back(r);

  Table t{{"attempt", "width", "undershoot", "overshoot"}, {}};
  for (std::size_t i = 0; i < ps.size(); ++i)
    if (ps[i].done) t.add({static_cast<double>(i), ps[i].width, ps[i].undershoot, ps[i].overshoot});
  out.tables["crossings"] = t;
  Table s{{"x", "empirical_cdf", "model_cdf"}, {}};
  std::sort(w.begin(), w.end());
  for (int k = 0; k <= 50; ++k) {
    double x = w0 * std::pow(w1 / w0, k / 50.0);
    double e = static_cast<double>(std::upper_bound(w.begin(), w.end(), x) - w.begin()) / static_cast<double>(w.size());
    s.add({x, e, cdf(x)});
  }
  out.tables["width_cdf"] = s;
  return out;
}

// overshoot law of the first passage over 0 under Exp(q) killing:
// density prop. to int e^{-Phi u} nu(zeta in u + dz) du, i.e. CDF prop. to
// E[(e^{-Phi (zeta - z)_+} - e^{-Phi zeta}) / Phi]; Phi = 0 gives E[min(zeta, z)]
struct TiltedOracle {
  std::vector<double> z, head, tail;  // sorted lifetimes; prefix of (1 - e^{-Phi z})/Phi, suffix of e^{-Phi z}
  double phi = 0;
  TiltedOracle(std::vector<double> zs, double p) : z(std::move(zs)), phi(p) {
    std::sort(z.begin(), z.end());
    head.assign(z.size() + 1, 0);
    tail.assign(z.size() + 1, 0);
    for (std::size_t i = 0; i < z.size(); ++i) head[i + 1] = head[i] + (phi > 0 ? -std::expm1(-phi * z[i]) / phi : z[i]);
    for (std::size_t i = z.size(); i-- > 0;) tail[i] = tail[i + 1] + (phi > 0 ? std::exp(-phi * z[i]) : 1.0);
  }
  double G(double x) const {
    if (x <= 0) return 0;
    auto k = static_cast<std::size_t>(std::upper_bound(z.begin(), z.end(), x) - z.begin());
    return head[k] + tail[k] * (phi > 0 ? std::expm1(phi * x) / phi : x);
  }
};

ExperimentOutput overshoot_tail(const RunConfig& c) {
  ExperimentOutput out;
  Model m = model_or_default(c);
  ExcursionLaw law = law_for(c, m, 0.05, 1e-3, 0.01);
  const double q = key(c, "kill_rate", 0.01), z1 = key(c, "z1", 2.0);
  const std::size_t attempts = nkey(c, "attempts", 6000), refine = nkey(c, "refine_attempts", 2000);
  const std::size_t n_oracle = nkey(c, "oracle_spindles", 100000);
  const double d = compensator_drift(law);
  const double rate = law.rate();

  std::vector<double> zs(n_oracle);
  RngStream ro{c.seed, 8};
  parallel_for(n_oracle, [&](std::size_t i) {
    Engine e = ro.child(i).engine();
    zs[i] = sample_spindle(law, e, false).zeta;
  });
  // Laplace exponent of the truncated scaffold: |d| l - rate E[1 - e^{-l zeta}]
  auto psi = [&](double l) {
    double s = 0;
    for (double z : zs) s += -std::expm1(-l * z);
    return -d * l - rate * s / static_cast<double>(zs.size());
  };
  double phi = 0;
  if (q > 0) {
    double lo = 0, hi = 1;
    while (psi(hi) < q && hi < 1e6) hi *= 2;
    for (int i = 0; i < 200; ++i) {
      double mid = 0.5 * (lo + hi);
      (psi(mid) < q ? lo : hi) = mid;
    }
    phi = hi;
  }
  TiltedOracle tilted(zs, phi), flat(zs, 0);
  const double nt = tilted.G(z1), nf = flat.G(z1);

  auto sample = [&](const std::vector<Passage>& ps) {
    std::vector<double> v;
    for (const auto& p : ps)
      if (p.done && p.overshoot <= z1) v.push_back(p.overshoot);
    return v;
  };
  auto ps = first_passages(law, q, attempts, RngStream{c.seed, 9}, d, false);
  auto ov = sample(ps);
  if (ov.empty()) throw std::runtime_error("overshoot-tail: no passages");
  auto ks = ks_one_sample(ov, [&](double z) { return tilted.G(z) / nt; });
  auto ku = ks_one_sample(ov, [&](double z) { return flat.G(z) / nf; });
  auto r = ks_result("overshoot KS vs normalized int_0^z nu(zeta > x) dx (Exp(q)-tilted, Monte Carlo lifetimes)", ks,
                     "overshoot density proportional to nu(zeta > z) dz");
  r.sizes.push_back({"attempts", static_cast<double>(attempts)});
  r.sizes.push_back({"oracle spindles", static_cast<double>(n_oracle)});
  r.diagnostics = {{"cutoff", law.cutoff}, {"kill rate", q}, {"Phi", phi}, {"z1", z1},
                   {"KS D untilted", ku.d}, {"p untilted", ku.p}};
  if (refine > 0) {
    ExcursionLaw fine = law;
    fine.dt /= 2;
    fine.dt_rel /= 2;
    auto of = sample(first_passages(fine, q, refine, RngStream{c.seed, 10}, d, false));
    if (!of.empty()) {
      auto kf = ks_one_sample(of, [&](double z) { return tilted.G(z) / nt; });
      r.diagnostics.push_back({"KS D dt/2", kf.d});
      r.diagnostics.push_back({"p dt/2", kf.p});
    }
  }
  out.results.push_back(r);

  Table t{{"attempt", "undershoot", "overshoot"}, {}};
  for (std::size_t i = 0; i < ps.size(); ++i)
    if (ps[i].done) t.add({static_cast<double>(i), ps[i].undershoot, ps[i].overshoot});
  out.tables["overshoots"] = t;
  Table s{{"z", "empirical_cdf", "oracle_cdf", "untilted_cdf"}, {}};
  std::sort(ov.begin(), ov.end());
  for (int k = 0; k <= 100; ++k) {
    double z = z1 * k / 100.0;
    double e = static_cast<double>(std::upper_bound(ov.begin(), ov.end(), z) - ov.begin()) / static_cast<double>(ov.size());
    s.add({z, e, tilted.G(z) / nt, flat.G(z) / nf});
  }
  out.tables["overshoot_cdf"] = s;
  return out;
}

// ---------------------------------------------------------------- diversity-localtime

struct DiversityRun {
  IntervalPartition beta;
  double local_time = 0;
  std::size_t atoms = 0;
  double length = 0;
};

// regeneration cycles: X starts at the level cap L and runs until it hits 0;
// scaffold time above L is skipped, which leaves every level below L exact
DiversityRun diversity_run(const ExcursionLaw& law, double L, double y, double h, std::size_t cycles, RngStream rs) {
  const double d = compensator_drift(law);
  std::vector<IntervalPartition> parts(cycles);
  std::vector<double> lt(cycles), len(cycles);
  std::vector<std::size_t> na(cycles);
  parallel_for(cycles, [&](std::size_t i) {
    PrmOptions o;
    o.x0 = L;
    o.cap = L;
    o.store_levels = {y};
    o.drift = d;
    auto N = build_prm(law, Horizon::hit(0.0), rs.child(i), o);
    parts[i] = skewer(y, N, law.g);
    ScaffoldPath X(N);
    lt[i] = local_time_estimate(X, y, N.end_time, h);
    len[i] = N.end_time;
    na[i] = N.atoms.size();
  });
  DiversityRun r;
  r.beta = concatenate(parts);
  for (std::size_t i = 0; i < cycles; ++i) {
    r.local_time += lt[i];
    r.length += len[i];
    r.atoms += na[i];
  }
  return r;
}

ExperimentOutput diversity_localtime(const RunConfig& c) {
  ExperimentOutput out;
  Model m = model_or_default(c);
  ExcursionLaw law = law_for(c, m, 0.01, 1e-3, 0.01);
  const double L = key(c, "level_cap", 6.0), y = key(c, "level", 4.0), h = key(c, "bandwidth", 0.05);
  const double tol = key(c, "tolerance", 0.15);
  const std::size_t cycles = nkey(c, "cycles", 60), refine = nkey(c, "refine_cycles", 20);
  const double a = law.cutoff;
  std::vector<double> th = c.list("thresholds", {8 * a, 4 * a, 2 * a, a});
  auto run = diversity_run(law, L, y, h, cycles, RngStream{c.seed, 11});
  auto D = diversity(run.beta, m.Y, m.g, th);
  if (!D.applicable) throw UsageError("diversity-localtime needs a model with infinite speed mass at 0");
  TestResult r;
  r.name = "diversity vs local time at one level";
  r.statistic_name = "|D / l - 1|";
  r.statistic = std::abs(D.estimate / run.local_time - 1);
  r.threshold = tol;
  r.rule = "pass if relative gap <= 0.15";
  r.pass = run.local_time > 0 && r.statistic <= tol;
  r.sizes = {{"cycles", static_cast<double>(cycles)}, {"blocks", static_cast<double>(run.beta.size())},
             {"atoms", static_cast<double>(run.atoms)}};
  r.diagnostics = {{"diversity", D.estimate}, {"local time", run.local_time}, {"scaffold length", run.length},
                   {"converged", D.converged ? 1.0 : 0.0}, {"level", y}, {"bandwidth", h}};
  for (std::size_t i = 0; i < th.size(); ++i) r.diagnostics.push_back({"ratio x=" + num(th[i]), D.ratios[i]});
  if (refine > 0) {
    ExcursionLaw fine = law;
    fine.dt /= 2;
    fine.dt_rel /= 2;
    auto rf = diversity_run(fine, L, y, h, refine, RngStream{c.seed, 12});
    auto Df = diversity(rf.beta, m.Y, m.g, th);
    r.diagnostics.push_back({"D/l dt/2", Df.estimate / rf.local_time});
  }
  r.anchor = "m-diversity of the skewer equals the local time of the scaffold";
  out.results.push_back(r);
  Table t{{"threshold", "count", "speed_mass", "ratio"}, {}};
  for (std::size_t i = 0; i < th.size(); ++i) {
    std::size_t cnt = 0;
    for (double w : run.beta.widths()) cnt += w > th[i];
    t.add({th[i], static_cast<double>(cnt), m.Y.speed_mass(m.g.g_inv(th[i]), m.Y.c()), D.ratios[i]});
  }
  out.tables["diversity"] = t;
  out.tables["partition"] = partition_table(run.beta);
  return out;
}

// ---------------------------------------------------------------- metric-oracle

ExperimentOutput metric_oracle(const RunConfig& c) {
  ExperimentOutput out;
  const std::size_t n = nkey(c, "pairs", 1000), maxb = nkey(c, "max_blocks", 7);
  Engine e = make_engine(c.seed, 13);
  // dyadic widths keep every sum exact, so the comparisons below are exact
  auto random_ip = [&]() {
    std::uniform_int_distribution<std::size_t> nb(0, maxb);
    std::uniform_int_distribution<int> k(1, 1024);
    std::vector<double> w(nb(e));
    for (auto& x : w) x = k(e) / 1024.0;
    return IntervalPartition(w);
  };
  std::size_t mism = 0, asym = 0, tri = 0, lip = 0, inexact = 0;
  Table t{{"pair", "blocks_a", "blocks_b", "dp", "bruteforce"}, {}};
  const TransformSpec g2 = TransformSpec::linear(2.0);
  for (std::size_t i = 0; i < n; ++i) {
    auto b = random_ip(), g = random_ip(), h = random_ip();
    auto full = dprime_full(b, g);
    double dp = dprime(b, g), bf = dprime_bruteforce(b, g);
    inexact += !full.exact;
    mism += dp != bf;
    asym += dprime(b, g) != dprime(g, b);
    tri += dprime(b, h) > dprime(b, g) + dprime(g, h);
    lip += dprime(g_star(b, g2), g_star(g, g2)) > 2.0 * dp;
    t.add({static_cast<double>(i), static_cast<double>(b.size()), static_cast<double>(g.size()), dp, bf});
  }
  auto add = [&](std::string name, std::size_t bad, std::string anchor) {
    TestResult r;
    r.name = std::move(name);
    r.statistic_name = "violations";
    r.statistic = static_cast<double>(bad);
    r.threshold = 0;
    r.rule = "pass if no violation";
    r.pass = bad == 0;
    r.sizes = {{"instances", static_cast<double>(n)}, {"max blocks", static_cast<double>(maxb)}};
    r.anchor = std::move(anchor);
    out.results.push_back(r);
  };
  add("DP equals brute force", mism + inexact, "d'_H = infimum of distortions over order-preserving correspondences");
  add("symmetry", asym, "d'_H(beta, gamma) = d'_H(gamma, beta)");
  add("triangle inequality", tri, "d'_H(beta, eta) <= d'_H(beta, gamma) + d'_H(gamma, eta)");
  add("Lipschitz g* (g = 2x)", lip, "g* continuous: d'_H(g*beta, g*gamma) <= L d'_H(beta, gamma)");
  // fixed values
  std::size_t fixed = 0;
  IntervalPartition a21({2, 1}), a12({1, 2}), one({1});
  fixed += dprime(a21, a12) != 1.0;
  fixed += dprime(a21, IntervalPartition()) != 3.0;
  fixed += dprime(one, IntervalPartition({2})) != 1.0;
  fixed += dprime(a21, a21) != 0.0;
  add("known values", fixed, "d'_H(gamma, empty) = ||gamma||");
  out.tables["pairs"] = t;
  return out;
}

// ---------------------------------------------------------------- cutoff-convergence

ExperimentOutput cutoff_convergence(const RunConfig& c) {
  ExperimentOutput out;
  Model m = model_or_default(c);
  std::vector<double> cuts = c.list("cutoffs", {0.5, 0.2, 0.1, 0.05});
  std::sort(cuts.rbegin(), cuts.rend());
  const double T = key(c, "T", 1.0), x0 = key(c, "x0", 0.0);
  const std::size_t n = nkey(c, "paths", 10000), refine = nkey(c, "refine_paths", 2000);
  ExcursionLaw law = law_for(c, m, cuts.back(), 1e-3, 0.01);
  law.cutoff = cuts.back();
  std::vector<double> drift;
  for (double a : cuts) {
    ExcursionLaw l = law;
    l.cutoff = a;
    drift.push_back(compensator_drift(l));
  }
  // one PRM at the smallest cutoff; coarser cutoffs keep the atoms with A > a
  auto sample = [&](const ExcursionLaw& lw, std::size_t paths, std::uint64_t stream) {
    std::vector<std::vector<double>> X(cuts.size(), std::vector<double>(paths));
    RngStream rs{c.seed, stream};
    parallel_for(paths, [&](std::size_t r) {
      PrmOptions o;
      o.x0 = x0;
      o.drift = drift.back();
      auto N = build_prm(lw, Horizon::time(T), rs.child(r), o);
      for (std::size_t k = 0; k < cuts.size(); ++k) {
        double s = x0 + drift[k] * T;
        for (const auto& a : N.atoms)
          if (a.amplitude > cuts[k]) s += a.zeta;
        X[k][r] = s;
      }
    });
    return X;
  };
  auto X = sample(law, n, 14);
  std::vector<double> w1, ks;
  for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
    w1.push_back(w1_distance(X[k], X[k + 1]));
    ks.push_back(ks_two_sample(X[k], X[k + 1]).d);
  }
  double worst = 0;
  for (std::size_t k = 0; k + 1 < w1.size(); ++k) worst = std::max(worst, w1[k + 1] / w1[k]);
  TestResult r;
  r.name = "successive W1 distances of X(T) strictly decrease";
  r.statistic_name = "max W1 ratio";
  r.statistic = worst;
  r.threshold = 1;
  r.rule = "pass if every successive W1 ratio < 1";
  r.pass = w1.size() >= 2 && worst < 1;
  r.sizes = {{"paths", static_cast<double>(n)}};
  for (std::size_t k = 0; k < w1.size(); ++k) {
    std::string tag = num(cuts[k]) + "->" + num(cuts[k + 1]);
    r.diagnostics.push_back({"W1 " + tag, w1[k]});
    r.diagnostics.push_back({"KS D " + tag, ks[k]});
  }
  r.diagnostics.push_back({"T", T});
  if (refine > 0) {
    ExcursionLaw fine = law;
    fine.dt /= 2;
    fine.dt_rel /= 2;
    auto Xf = sample(fine, refine, 15);
    std::vector<double> head(X.back().begin(), X.back().begin() + static_cast<long>(std::min(refine, n)));
    r.diagnostics.push_back({"W1 dt vs dt/2 at smallest cutoff", w1_distance(head, Xf.back())});
  }
  r.anchor = "X = lim of -t int_{zeta > eps} x nu(zeta in dx) + sum of lifetimes";
  out.results.push_back(r);
  Table t{{"path"}, {}};
  for (double a : cuts) t.header.push_back("X_a=" + num(a));
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<double> row{static_cast<double>(i)};
    for (auto& v : X) row.push_back(v[i]);
    t.add(row);
  }
  out.tables["endpoints"] = t;
  return out;
}

// ---------------------------------------------------------------- markov-restart

ExperimentOutput markov_restart(const RunConfig& c) {
  ExperimentOutput out;
  Model m = model_or_default(c);
  ExcursionLaw law = law_for(c, m, 0.05, 1e-3, 0.01);
  const double y = key(c, "level", 0.5);
  const std::size_t n = nkey(c, "paths", 4000), perms = nkey(c, "permutations", 10000);
  const IntervalPartition start(c.start.empty() ? std::vector<double>{1.0} : c.start);
  const double d = compensator_drift(law);
  std::vector<double> direct(n), restart(n), mid(n);
  RngStream rs{c.seed, 16};
  parallel_for(n, [&](std::size_t r) {
    // direct: levels up to 2y are exact with the cap at 2y
    StartOptions o;
    o.cap = 2 * y;
    o.store_levels = {2 * y};
    o.drift = d;
    auto N = start_from_partition(start, law, rs.child(3 * r), o);
    direct[r] = skewer(2 * y, N, law.g).total();
    // restart: an independent run cut at level y, then a fresh run from its skewer
    StartOptions o1;
    o1.cap = y;
    o1.store_levels = {y};
    o1.drift = d;
    auto N1 = start_from_partition(start, law, rs.child(3 * r + 1), o1);
    auto beta = skewer(y, N1, law.g);
    mid[r] = beta.total();
    if (beta.empty()) {
      restart[r] = 0;
      return;
    }
    auto N2 = start_from_partition(beta, law, rs.child(3 * r + 2), o1);
    restart[r] = skewer(y, N2, law.g).total();
  });
  auto p = permutation_test_mean(direct, restart, perms, c.seed);
  auto ks = ks_two_sample(direct, restart);
  TestResult r;
  r.name = "total mass at 2y: direct vs restarted from skewer(y)";
  r.statistic_name = "|mean difference|";
  r.statistic = p.statistic;
  r.p_value = p.p;
  r.threshold = kAlpha;
  r.rule = "pass if permutation p >= 0.01";
  r.pass = p.p >= kAlpha;
  r.sizes = {{"direct", static_cast<double>(n)}, {"restart", static_cast<double>(n)}, {"permutations", static_cast<double>(perms)}};
  auto zeros = [](const std::vector<double>& v) {
    return static_cast<double>(std::count(v.begin(), v.end(), 0.0)) / static_cast<double>(v.size());
  };
  r.diagnostics = {{"mean direct", mean(direct)}, {"mean restart", mean(restart)}, {"mean at y", mean(mid)},
                   {"P(mass=0) direct", zeros(direct)}, {"P(mass=0) restart", zeros(restart)},
                   {"KS p", ks.p}, {"level y", y}, {"cutoff", law.cutoff}};
  r.anchor = "skewer process (gamma^y, y >= 0) is simple Markov";
  out.results.push_back(r);
  Table t{{"path", "mass_direct_2y", "mass_y", "mass_restart_2y"}, {}};
  for (std::size_t i = 0; i < n; ++i) t.add({static_cast<double>(i), direct[i], mid[i], restart[i]});
  out.tables["masses"] = t;
  return out;
}

// ---------------------------------------------------------------- condition table

ExperimentOutput condition_experiment(const RunConfig&) {
  ExperimentOutput out;
  auto rows = condition_table();
  Table t{{"row", "match"}, {}};
  std::size_t bad = 0;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    bad += !rows[i].match;
    t.add({static_cast<double>(i), rows[i].match ? 1.0 : 0.0});
  }
  TestResult r;
  r.name = "condition checker known answers";
  r.statistic_name = "mismatched rows";
  r.statistic = static_cast<double>(bad);
  r.threshold = 0;
  r.rule = "pass if every row matches";
  r.pass = bad == 0;
  r.sizes = {{"rows", static_cast<double>(rows.size())}};
  for (const auto& row : rows)
    for (const auto& [field, v] : row.checks)
      if (v.first != v.second) r.diagnostics.push_back({row.label + " " + field + " expected " + v.first + " got " + v.second, 0});
  r.anchor = "admissibility verdicts for the example diffusions";
  out.results.push_back(r);
  out.tables["conditions"] = t;
  return out;
}

}  // namespace

// ---------------------------------------------------------------- public

std::string TestResult::line() const {
  std::ostringstream os;
  os << (pass ? "PASS " : "FAIL ") << name << ": " << statistic_name << "=" << num(statistic);
  if (std::isfinite(p_value)) os << " p=" << num(p_value);
  if (std::isfinite(ci_lo)) os << " ci=[" << num(ci_lo) << ", " << num(ci_hi) << "]";
  os << " threshold=" << num(threshold) << " (" << rule << ")";
  for (const auto& [k, v] : sizes) os << " " << k << "=" << num(v);
  return os.str();
}

json TestResult::to_json() const {
  json j;
  j["name"] = name;
  j["statistic_name"] = statistic_name;
  j["statistic"] = finite_or_null(statistic);
  j["p_value"] = finite_or_null(p_value);
  j["ci"] = std::isfinite(ci_lo) ? json::array({ci_lo, ci_hi}) : json(nullptr);
  j["threshold"] = threshold;
  j["rule"] = rule;
  j["verdict"] = pass ? "pass" : "fail";
  json s = json::object();
  for (const auto& [k, v] : sizes) s[k] = v;
  j["sizes"] = s;
  json d = json::object();
  for (const auto& [k, v] : diagnostics) d[k] = finite_or_null(v);
  j["diagnostics"] = d;
  j["anchor"] = anchor;
  return j;
}

bool ExperimentOutput::pass() const {
  return !results.empty() && std::all_of(results.begin(), results.end(), [](const TestResult& r) { return r.pass; });
}

const std::vector<std::string>& experiment_names() {
  static const std::vector<std::string> names{"hitting-prob",       "besq-lifetime",  "amplitude-law",
                                              "up-moments",         "crossing-width", "overshoot-tail",
                                              "diversity-localtime", "metric-oracle", "markov-restart",
                                              "cutoff-convergence", "condition-table"};
  return names;
}

ExperimentOutput run_experiment(const std::string& name, const RunConfig& cfg) {
  auto t0 = std::chrono::steady_clock::now();
  ExperimentOutput out;
  if (name == "hitting-prob") out = hitting_prob(cfg);
  else if (name == "besq-lifetime") out = besq_lifetime(cfg);
  else if (name == "amplitude-law") out = amplitude_law(cfg);
  else if (name == "up-moments") out = up_moments(cfg);
  else if (name == "crossing-width") out = crossing_width(cfg);
  else if (name == "overshoot-tail") out = overshoot_tail(cfg);
  else if (name == "diversity-localtime") out = diversity_localtime(cfg);
  else if (name == "metric-oracle") out = metric_oracle(cfg);
  else if (name == "markov-restart") out = markov_restart(cfg);
  else if (name == "cutoff-convergence") out = cutoff_convergence(cfg);
  else if (name == "condition-table") out = condition_experiment(cfg);
  else {
    std::string all;
    for (const auto& n : experiment_names()) all += (all.empty() ? "" : ", ") + n;
    throw UsageError("unknown experiment '" + name + "' (" + all + ")");
  }
  out.name = name;
  out.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return out;
}

void write_experiment(const std::string& dir, const ExperimentOutput& out, const RunConfig& cfg) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  for (const auto& [stem, t] : out.tables) write_csv((fs::path(dir) / (stem + ".csv")).string(), t);
  // timing is left out so reruns give identical files
  json s;
  s["experiment"] = out.name;
  s["config"] = to_json(cfg);
  s["verdict"] = out.pass() ? "pass" : "fail";
  s["results"] = json::array();
  for (const auto& r : out.results) s["results"].push_back(r.to_json());
  write_text((fs::path(dir) / "summary.json").string(), s.dump(2) + "\n");

  std::ostringstream py;
  py << "# plots every table of this experiment; run: python plot.py\n"
        "import csv, os\n"
        "import matplotlib\n"
        "matplotlib.use('Agg')\n"
        "import matplotlib.pyplot as plt\n\n"
        "here = os.path.dirname(os.path.abspath(__file__))\n"
        "tables = [";
  bool first = true;
  for (const auto& [stem, t] : out.tables) {
    py << (first ? "" : ", ") << "'" << stem << "'";
    first = false;
  }
  py << "]\n\n"
        "def load(stem):\n"
        "    with open(os.path.join(here, stem + '.csv')) as f:\n"
        "        rows = list(csv.reader(f))\n"
        "    cols = list(zip(*[[float(v) for v in r] for r in rows[1:]])) if len(rows) > 1 else []\n"
        "    return rows[0], cols\n\n"
        "for stem in tables:\n"
        "    head, cols = load(stem)\n"
        "    if not cols:\n"
        "        continue\n"
        "    fig, ax = plt.subplots()\n"
        "    if head[0].endswith('cdf') or head[0] in ('x', 'z', 'threshold', 'dt'):\n"
        "        for name, col in zip(head[1:], cols[1:]):\n"
        "            ax.plot(cols[0], col, label=name)\n"
        "        ax.set_xlabel(head[0])\n"
        "        ax.legend()\n"
        "    else:\n"
        "        for name, col in zip(head[1:], cols[1:]):\n"
        "            ax.hist([v for v in col if v == v], bins=60, histtype='step', label=name)\n"
        "        ax.legend()\n"
        "    ax.set_title(stem)\n"
        "    fig.savefig(os.path.join(here, stem + '.png'), dpi=120)\n";
  write_text((fs::path(dir) / "plot.py").string(), py.str());
}

std::vector<ConditionRow> condition_table() {
  std::vector<ConditionRow> rows;
  auto yn = [](bool b) { return std::string(b ? "true" : "false"); };
  auto field = [&](const ConditionReport& r, const std::string& f) -> std::string {
    if (f == "zero") return to_string(r.boundary.zero_class);
    if (f == "levy") return to_string(r.levy_class);
    if (f == "x2") return num(r.x2_integral);
    if (f == "health") return yn(r.health_summable_ok);
    if (f == "start_ip") return yn(r.start_ip_ok);
    if (f == "B") return r.assumption_b ? (r.assumption_b->holds ? "holds" : "fails") : "n/a";
    if (f == "B5") return r.assumption_b ? yn(r.assumption_b->b5) : "n/a";
    if (f == "C") return r.assumption_c ? (r.assumption_c->holds ? "holds" : "fails") : "n/a";
    throw std::logic_error("unknown field " + f);
  };
  auto add = [&](std::string label, const Model& m, std::vector<std::pair<std::string, std::string>> expect) {
    ConditionRow row;
    row.label = std::move(label);
    row.report = check_all(m.Y, m.g, m.id);
    for (auto& [f, e] : expect) {
      std::string got = field(row.report, f);
      row.checks.push_back({f, {e, got}});
      row.match = row.match && got == e;
    }
    rows.push_back(std::move(row));
  };
  for (double a : {0.25, 0.5, 0.75})
    add("besq(" + num(a) + ")", besq(a),
        {{"zero", "exit"}, {"levy", "unbounded_variation"}, {"health", "true"}, {"start_ip", "true"}, {"B", "holds"}, {"C", "n/a"}});
  add("besq(0.5), g = y^0.3", self_similar(0.5, 1.0, 0.3), {{"levy", "unbounded_variation"}, {"health", "false"}});
  add("besq_dim0(1)", besq_dim0(1.0), {{"zero", "exit"}, {"levy", "unbounded_variation"}, {"x2", "0.25"}, {"start_ip", "false"}});
  add("wright_fisher(1, 0.25)", wright_fisher(1.0, 0.25),
      {{"zero", "regular"}, {"levy", "bounded_variation"}, {"health", "true"}, {"B", "n/a"}, {"C", "holds"}});
  add("cir(1, -1, 0.25)", cir(1.0, -1.0, 0.25), {{"levy", "bounded_variation"}, {"B", "n/a"}, {"C", "holds"}});
  add("self_similar(0.5, 1, 0.7)", self_similar(0.5, 1.0, 0.7),
      {{"levy", "unbounded_variation"}, {"health", "true"}, {"B", "holds"}, {"B5", "true"}, {"C", "n/a"}});
  {
    // counterexample transform on BESQ(0.5): liminf g/x = 0, limsup = inf
    Model b = besq(0.5);
    ConditionRow row;
    row.label = "besq(0.5), g counterexample";
    auto B = check_assumption_b(b.Y, g_counterexample());
    std::string got = B ? yn(B->b5) : "n/a";
    row.checks.push_back({"B5", {"false", got}});
    row.match = got == "false";
    row.report = check_all(b.Y, g_counterexample(), "besq");
    rows.push_back(std::move(row));
  }
  return rows;
}

ConditionReport run_check(const RunConfig& cfg) {
  Model m = make_model(cfg);
  return check_all(m.Y, m.g, m.id);
}

}  // namespace ipevo
