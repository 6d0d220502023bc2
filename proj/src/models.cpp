#include "ipevo/models.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include <boost/math/special_functions/gamma.hpp>

namespace ipevo {

namespace {

void need(bool ok, const std::string& msg) {
  if (!ok) throw std::invalid_argument(msg);
}

ClosedForms besq_forms(double a) {
  ClosedForms cf;
  cf.sprime = [a](double x) { return std::pow(x, a); };
  cf.s = [a](double x) { return x <= 0 ? 0.0 : std::pow(x, 1 + a) / (1 + a); };
  cf.s_at_c = kInf;
  cf.m = [a](double x) { return 0.5 * std::pow(x, -1 - a); };
  cf.speed_mass = [a](double l, double r) {
    if (l <= 0) return kInf;
    double hi = std::isinf(r) ? 0.0 : std::pow(r, -a);
    return (std::pow(l, -a) - hi) / (2 * a);
  };
  cf.mu_up = [a](double) { return 4 + 2 * a; };
  const double g = std::tgamma(1 + a);
  cf.lifetime_tail = [a, g](double z) { return z <= 0 ? kInf : std::pow(2 * z, -1 - a) / g; };
  return cf;
}

DiffusionSpec besq_spec(double a) {
  DiffusionSpec y([a](double) { return -2 * a; }, [](double x) { return 4 * x; }, kInf, false, 1.0,
                  "besq(" + std::to_string(a) + ")");
  return y.with_closed_forms(besq_forms(a));
}

}  // namespace

double InverseGammaLaw::pdf(double x) const {
  if (x <= 0) return 0.0;
  return std::exp(shape * std::log(scale) - std::lgamma(shape) - (shape + 1) * std::log(x) - scale / x);
}
double InverseGammaLaw::cdf(double x) const {
  if (x <= 0) return 0.0;
  return boost::math::gamma_q(shape, scale / x);
}
double InverseGammaLaw::mean() const { return shape > 1 ? scale / (shape - 1) : kInf; }

InverseGammaLaw besq_lifetime_law(double alpha, double u) {
  need(alpha > 0 && alpha < 1, "besq lifetime law: alpha must be in (0,1)");
  need(u > 0, "besq lifetime law: u must be > 0");
  return {1 + alpha, u / 2};
}

Model besq(double alpha) {
  need(alpha > 0 && alpha < 1, "besq: alpha must be in (0,1)");
  Model m;
  m.id = "besq";
  m.params = {{"alpha", alpha}};
  m.Y = besq_spec(alpha);
  m.g = TransformSpec::identity();
  m.Z = m.Y;
  m.besq_alpha = alpha;
  return m;
}

Model self_similar(double alpha, double k, double q) {
  need(alpha > 0 && alpha < 1, "self-similar: alpha must be in (0,1)");
  need(k > 0, "self-similar: k must be > 0");
  need(q > 0, "self-similar: q must be > 0");
  Model m;
  m.id = "self-similar";
  m.params = {{"alpha", alpha}, {"k", k}, {"q", q}};
  m.Y = besq_spec(alpha);
  m.g = TransformSpec::power(k, q);
  m.Z = transform(m.Y, m.g);
  m.besq_alpha = alpha;
  return m;
}

Model besq_dim0(double e2) {
  need(e2 > 0, "besq-dim0: eps2 must be > 0");
  Model m;
  m.id = "besq-dim0";
  m.params = {{"eps2", e2}};
  // zero drift below eps2; beyond it a restoring drift keeps M((eps2, inf)) finite
  Fn mu = [e2](double x) { return x <= e2 ? 0.0 : -2 * (x - e2); };
  DiffusionSpec y(mu, [](double x) { return 4 * x; }, kInf, false, e2, "besq-dim0");
  ClosedForms cf;
  Fn sp = [e2](double x) { return x <= e2 ? 1.0 : std::exp((x - e2) - e2 * std::log(x / e2)); };
  cf.sprime = sp;
  cf.s = [e2, sp](double x) { return x <= e2 ? std::max(x, 0.0) : e2 + gk(sp, e2, x); };
  cf.s_at_c = kInf;
  cf.m = [sp](double x) { return 1.0 / (2 * x * sp(x)); };
  Fn mf = cf.m;
  cf.speed_mass = [e2, mf](double l, double r) {
    if (l <= 0) return kInf;
    double tot = 0;
    if (l < e2) tot += 0.5 * (std::log(std::min(r, e2)) - std::log(l));
    if (r > e2) {
      Integral hi = integrate(mf, std::max(l, e2), r);
      if (!hi.finite) return kInf;
      tot += hi.value;
    }
    return tot;
  };
  DiffusionSpec base = y.with_closed_forms(cf);
  cf.mu_up = [e2, base](double x) {
    if (x <= e2) return 4.0;
    return base.mu(x) + base.scale_derivative(x) / base.scale(x) * base.sigma2(x);
  };
  m.Y = y.with_closed_forms(cf);
  m.g = TransformSpec::identity();
  m.Z = m.Y;
  return m;
}

double wf_g(double y) {
  double s = std::sin(std::sqrt(std::max(y, 0.0)) / 2);
  return s * s;
}
double wf_g_inv(double z) {
  double t = std::asin(std::sqrt(std::clamp(z, 0.0, 1.0)));
  return 4 * t * t;
}
double wf_mu_y(double y, double g1, double g2) {
  double r = std::sqrt(y);
  if (r < 1e-4) return 4 * g2 + y * (1.0 / 3 - g2 / 3 - g1);
  return 1 - r / std::tan(r) + 2 * r * (g2 / std::tan(r / 2) - g1 * std::tan(r / 2));
}

Model wright_fisher(double g1, double g2) {
  need(g1 >= 0, "wright-fisher: gamma1 must be >= 0");
  need(g2 > 0, "wright-fisher: gamma2 = 0 is an open case and is rejected");
  need(g2 < 0.5, "wright-fisher: gamma2 must be < 1/2");
  Model m;
  m.id = "wright-fisher";
  m.params = {{"gamma1", g1}, {"gamma2", g2}};
  const double c = std::numbers::pi * std::numbers::pi;
  const double bref = c / 2;
  TransformSpec t;
  t.name = "wf";
  t.g = wf_g;
  t.g_inv = wf_g_inv;
  t.gp = [](double y) {
    double r = std::sqrt(y);
    if (r < 1e-6) return 0.25 - y / 48;
    return std::sin(r) / (4 * r);
  };
  t.gpp = [](double y) {
    double r = std::sqrt(y);
    if (r < 1e-3) return -1.0 / 48 + y / 960;
    return (std::cos(r) - std::sin(r) / r) / (8 * y);
  };
  t.holder = HolderData{1.0, 0.25, 0.0};
  Fn gp = t.gp;
  auto raw = [g1, g2, gp](double y) {
    double z = wf_g(y);
    return std::pow(z, -2 * g2) * std::pow(1 - z, -2 * g1) * gp(y);
  };
  const double kappa = 1.0 / raw(bref);
  DiffusionSpec y([g1, g2](double x) { return wf_mu_y(x, g1, g2); }, [](double x) { return 4 * x; }, c, g1 < 0.5, bref,
                  "wf-y");
  ClosedForms cf;
  cf.sprime = [raw, kappa](double x) { return kappa * raw(x); };
  Fn spf = cf.sprime;
  cf.m = [spf](double x) { return 2.0 / (4 * x * spf(x)); };
  m.Y = y.with_closed_forms(cf);
  m.g = t;
  m.Z = transform(m.Y, t);
  return m;
}

Model cir(double a, double b, double c) {
  need(a > 0, "cir: a must be > 0");
  need(b < 0, "cir: b must be < 0");
  need(c > 0 && 2 * c < a, "cir: need 0 < 2c < a");
  Model m;
  m.id = "cir";
  m.params = {{"a", a}, {"b", b}, {"c", c}};
  const double k = 2 * c / a, lam = -b / 2;
  DiffusionSpec y([a, b, c](double x) { return b * x + 4 * c / a; }, [](double x) { return 4 * x; }, kInf, false, 1.0,
                  "cir-y");
  ClosedForms cf;
  cf.sprime = [k, lam](double x) { return std::exp(lam * (x - 1)) * std::pow(x, -k); };
  cf.m = [k, lam](double x) { return 0.5 * std::exp(-lam * (x - 1)) * std::pow(x, k - 1); };
  cf.speed_mass = [k, lam](double l, double r) {
    auto P = [&](double x) { return std::isinf(x) ? 1.0 : boost::math::gamma_p(k, lam * std::max(x, 0.0)); };
    return 0.5 * std::exp(lam) * std::pow(lam, -k) * std::tgamma(k) * (P(r) - P(l));
  };
  m.Y = y.with_closed_forms(cf);
  m.g = TransformSpec::linear(a / 4);
  m.Z = transform(m.Y, m.g);
  return m;
}

namespace {

Fn piecewise(std::vector<std::pair<double, double>> tab) {
  std::sort(tab.begin(), tab.end());
  return [tab](double x) {
    if (x <= tab.front().first) return tab.front().second;
    if (x >= tab.back().first) return tab.back().second;
    auto it = std::upper_bound(tab.begin(), tab.end(), std::make_pair(x, -kInf));
    auto lo = it - 1;
    double w = (x - lo->first) / (it->first - lo->first);
    return lo->second + w * (it->second - lo->second);
  };
}

}  // namespace

Model custom(std::vector<std::pair<double, double>> mu_tab, std::vector<std::pair<double, double>> s2_tab, double c,
             bool closed_at_c, double b, TransformSpec g) {
  need(mu_tab.size() >= 1 && s2_tab.size() >= 1, "custom: drift and variance tables must be non-empty");
  for (auto& p : s2_tab) need(p.second > 0, "custom: sigma2 table values must be > 0");
  Model m;
  m.id = "custom";
  m.params = {{"c", c}, {"b", b}};
  m.Y = DiffusionSpec(piecewise(mu_tab), piecewise(s2_tab), c, closed_at_c, b, "custom");
  m.g = std::move(g);
  m.Z = m.g.name == "identity" ? m.Y : transform(m.Y, m.g);
  return m;
}

}  // namespace ipevo
