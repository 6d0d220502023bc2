#include "ipevo/diffusion.hpp"

#include <cmath>
#include <mutex>

namespace ipevo {

struct DiffusionSpec::Impl {
  Fn mu, sigma2;
  double c = kInf;
  bool closed_at_c = false;
  double b = 1.0;
  std::string name;
  ClosedForms cf;

  mutable std::once_flag f_logsp, f_sp, f_m, f_sm, f_s2m;
  mutable Cumulative logsp, sp, mt, sm, s2m;

  double sprime(double x) const {
    if (cf.sprime) return cf.sprime(x);
    std::call_once(f_logsp, [&] {
      if (!mu) throw InadmissibleSpec("scale derivative needs a drift or a closed form");
      logsp = Cumulative([this](double z) { return 2.0 * mu(z) / sigma2(z); }, 0.0, b, c);
    });
    return std::exp(-logsp(x));
  }
  const Cumulative& sp_tab() const {
    std::call_once(f_sp, [&] { sp = Cumulative([this](double z) { return sprime(z); }, 0.0, b, c); });
    return sp;
  }
  double m(double x) const {
    if (cf.m) return cf.m(x);
    return 2.0 / (sigma2(x) * sprime(x));
  }
  const Cumulative& m_tab() const {
    std::call_once(f_m, [&] { mt = Cumulative([this](double z) { return m(z); }, 0.0, b, c); });
    return mt;
  }
};

namespace {

std::shared_ptr<DiffusionSpec::Impl> clone_impl(const DiffusionSpec::Impl& o) {
  auto p = std::make_shared<DiffusionSpec::Impl>();
  p->mu = o.mu;
  p->sigma2 = o.sigma2;
  p->c = o.c;
  p->closed_at_c = o.closed_at_c;
  p->b = o.b;
  p->name = o.name;
  p->cf = o.cf;
  return p;
}

}  // namespace

TransformSpec TransformSpec::identity() {
  TransformSpec t;
  t.name = "identity";
  t.g = [](double x) { return x; };
  t.g_inv = [](double x) { return x; };
  t.gp = [](double) { return 1.0; };
  t.gpp = [](double) { return 0.0; };
  t.holder = HolderData{1.0, 1.0, 0.0};
  return t;
}

TransformSpec TransformSpec::power(double k, double q) {
  if (!(k > 0 && q > 0)) throw std::invalid_argument("power transform needs k > 0, q > 0");
  TransformSpec t;
  t.name = q == 1.0 ? "linear" : "power";
  t.g = [k, q](double x) { return x <= 0 ? 0.0 : k * std::pow(x, q); };
  t.g_inv = [k, q](double z) { return z <= 0 ? 0.0 : std::pow(z / k, 1.0 / q); };
  t.gp = [k, q](double x) { return k * q * std::pow(x, q - 1); };
  t.gpp = [k, q](double x) { return k * q * (q - 1) * std::pow(x, q - 2); };
  if (q <= 1) t.holder = HolderData{q, k, 0.0};
  return t;
}

DiffusionSpec::DiffusionSpec(Fn mu, Fn sigma2, double c, bool closed_at_c, double b, std::string name)
    : p_(std::make_shared<Impl>()) {
  if (!(c > 0)) throw std::invalid_argument("upper boundary c must be > 0");
  if (!(b > 0 && b < c)) throw std::invalid_argument("reference point b must lie in (0, c)");
  if (!sigma2) throw std::invalid_argument("sigma2 is required");
  p_->mu = std::move(mu);
  p_->sigma2 = std::move(sigma2);
  p_->c = c;
  p_->closed_at_c = closed_at_c;
  p_->b = b;
  p_->name = std::move(name);
  double s2b = p_->sigma2(b);
  if (!(s2b > 0)) throw std::invalid_argument("sigma2(b) must be positive");
}

double DiffusionSpec::mu(double x) const {
  if (!p_->mu) throw std::logic_error("drift unavailable for " + p_->name);
  return p_->mu(x);
}
double DiffusionSpec::sigma2(double x) const { return p_->sigma2(x); }
double DiffusionSpec::c() const { return p_->c; }
bool DiffusionSpec::closed_at_c() const { return p_->closed_at_c; }
double DiffusionSpec::b() const { return p_->b; }
const std::string& DiffusionSpec::name() const { return p_->name; }
bool DiffusionSpec::has_drift() const { return static_cast<bool>(p_->mu); }
const ClosedForms& DiffusionSpec::closed() const { return p_->cf; }

double DiffusionSpec::scale_derivative(double x) const {
  if (!(x > 0 && x < p_->c)) throw std::domain_error("scale_derivative: x outside (0,c)");
  return p_->sprime(x);
}

double DiffusionSpec::scale(double x) const {
  if (x <= 0) return 0.0;
  if (x >= p_->c) return scale_at_c();
  if (p_->cf.s) return p_->cf.s(x);
  const Cumulative& t = p_->sp_tab();
  if (!std::isfinite(t.below())) throw InadmissibleSpec("s(0+) diverges for " + p_->name);
  return t.from_lo(x);
}

double DiffusionSpec::scale_at_c() const {
  if (p_->cf.s_at_c) return *p_->cf.s_at_c;
  if (p_->cf.s && std::isfinite(p_->c)) return p_->cf.s(p_->c);
  const Cumulative& t = p_->sp_tab();
  if (!std::isfinite(t.below())) throw InadmissibleSpec("s(0+) diverges for " + p_->name);
  return t.below() + t.above();
}

double DiffusionSpec::scale_difference(double v, double w) const {
  if (p_->cf.scale_diff) return p_->cf.scale_diff(v, w);
  if (p_->cf.s) return scale(w) - scale(v);
  const Cumulative& t = p_->sp_tab();
  double fw = w >= p_->c ? t.above() : t(w);
  double fv = v <= 0 ? -t.below() : t(v);
  return fw - fv;
}

double DiffusionSpec::speed_density(double x) const {
  if (!(x > 0 && x < p_->c)) throw std::domain_error("speed_density: x outside (0,c)");
  return p_->m(x);
}

double DiffusionSpec::speed_mass(double l, double r) const {
  if (l > r) throw std::domain_error("speed_mass: l > r");
  if (l == r) return 0.0;
  if (p_->cf.speed_mass) return p_->cf.speed_mass(l, r);
  const Cumulative& t = p_->m_tab();
  if (l <= 0 && r >= p_->c) return std::isfinite(t.below()) && std::isfinite(t.above()) ? t.below() + t.above() : kInf;
  if (l <= 0) return std::isfinite(t.below()) ? t.from_lo(r) : kInf;
  if (r >= p_->c) return std::isfinite(t.above()) ? t.to_hi(l) : kInf;
  return t(r) - t(l);
}

double DiffusionSpec::green(double a, double w, double x, double v) const {
  if (!(a < w)) throw std::domain_error("green: need a < w");
  if (x < a || x > w || v < a || v > w) throw std::domain_error("green: x, v must lie in [a, w]");
  double daw = scale_difference(a, w);
  double dax = scale_difference(a, x);
  double dav = scale_difference(a, v);
  if (std::isinf(daw)) return v > x ? dax : dav;
  if (v > x) return dax * (daw - dav) / daw;
  return (daw - dax) * dav / daw;
}

double DiffusionSpec::expected_exit_time(double a, double w, double x, bool split) const {
  if (!(a < w)) throw std::domain_error("expected_exit_time: need a < w");
  if (!(x > a && x < w)) return 0.0;
  double daw = scale_difference(a, w);
  double dax = scale_difference(a, x);
  auto g = [&](double v) {
    double dav = scale_difference(a, v);
    double G;
    if (std::isinf(daw)) G = v > x ? dax : dav;
    else if (v > x) G = dax * (daw - dav) / daw;
    else G = (daw - dax) * dav / daw;
    return G * p_->m(v);
  };
  if (!split) {
    Integral r = integrate(g, a, w);
    return r.finite ? r.value : kInf;
  }
  Integral l = integrate(g, a, x);
  Integral r = integrate(g, x, w);
  if (!l.finite || !r.finite) return kInf;
  return l.value + r.value;
}

double DiffusionSpec::sm_from0(double x) const {
  std::call_once(p_->f_sm, [&] {
    p_->sm = Cumulative([this](double z) { return scale(z) * p_->m(z); }, 0.0, p_->b, p_->c);
  });
  if (x >= p_->c) return p_->sm.below() + p_->sm.above();
  return p_->sm.from_lo(x);
}

double DiffusionSpec::s2m_from0(double x) const {
  std::call_once(p_->f_s2m, [&] {
    p_->s2m = Cumulative([this](double z) { double s = scale(z); return s * s * p_->m(z); }, 0.0, p_->b, p_->c);
  });
  if (x >= p_->c) return p_->s2m.below() + p_->s2m.above();
  return p_->s2m.from_lo(x);
}

DiffusionSpec DiffusionSpec::with_closed_forms(ClosedForms cf) const {
  DiffusionSpec out;
  out.p_ = clone_impl(*p_);
  out.p_->cf = std::move(cf);
  return out;
}

DiffusionSpec DiffusionSpec::strip_closed_forms() const { return with_closed_forms(ClosedForms{}); }

DiffusionSpec DiffusionSpec::renamed(std::string n) const {
  DiffusionSpec out;
  out.p_ = clone_impl(*p_);
  out.p_->name = std::move(n);
  return out;
}

DiffusionSpec up_diffusion(const DiffusionSpec& spec) {
  const double sb = spec.scale(spec.b());
  const double k = sb * sb;
  Fn mu_up;
  if (spec.closed().mu_up) {
    mu_up = spec.closed().mu_up;
  } else if (spec.has_drift()) {
    mu_up = [spec](double x) {
      return spec.mu(x) + spec.scale_derivative(x) / spec.scale(x) * spec.sigma2(x);
    };
  }
  DiffusionSpec up(mu_up, [spec](double x) { return spec.sigma2(x); }, spec.c(), spec.closed_at_c(), spec.b(),
                   spec.name() + "^up");
  ClosedForms cf;
  cf.sprime = [spec, k](double x) {
    double s = spec.scale(x);
    return k * spec.scale_derivative(x) / (s * s);
  };
  cf.m = [spec, k](double x) {
    double s = spec.scale(x);
    return spec.speed_density(x) * s * s / k;
  };
  cf.scale_diff = [spec, k](double v, double w) {
    double sv = spec.scale(v), sw = w >= spec.c() ? spec.scale_at_c() : spec.scale(w);
    if (sv <= 0) return kInf;
    return k * (1.0 / sv - (std::isinf(sw) ? 0.0 : 1.0 / sw));
  };
  cf.mu_up = nullptr;
  return up.with_closed_forms(cf);
}

DiffusionSpec transform(const DiffusionSpec& spec, const TransformSpec& t) {
  if (!t.g || !t.g_inv) throw std::invalid_argument("transform: g and g_inv required");
  if (std::abs(t.g(0.0)) > 1e-14) throw std::invalid_argument("transform: g(0) must be 0");
  // monotonicity and inverse on a log grid inside (0, c)
  double top = std::isfinite(spec.c()) ? spec.c() : 1e6;
  double prev = 0.0;
  for (int i = 0; i <= 200; ++i) {
    double x = top * std::pow(1e-9, 1.0 - i / 200.0) * (i == 200 ? 0.999999 : 1.0);
    double gx = t.g(x);
    if (!(gx > prev)) throw std::invalid_argument("transform: g not strictly increasing on the test grid");
    double back = t.g_inv(gx);
    if (std::abs(back - x) > 1e-6 * std::max(1.0, x)) throw std::invalid_argument("transform: g_inv(g(x)) != x");
    prev = gx;
  }
  const double cz = std::isfinite(spec.c()) ? t.g(spec.c()) : t.g(kInf);
  const double bz = t.g(spec.b());
  Fn gp = t.gp;
  if (!gp) {
    Fn g = t.g;
    gp = [g](double x) {
      double h = 1e-6 * std::max(x, 1e-12);
      return (g(x + h) - g(x - h)) / (2 * h);
    };
  }
  Fn mu_z;
  if (t.gpp && spec.has_drift()) {
    mu_z = [spec, t, gp](double z) {
      double y = t.g_inv(z);
      return 0.5 * spec.sigma2(y) * t.gpp(y) + spec.mu(y) * gp(y);
    };
  }
  Fn s2z = [spec, t, gp](double z) {
    double y = t.g_inv(z);
    double d = gp(y);
    return spec.sigma2(y) * d * d;
  };
  DiffusionSpec z(mu_z, s2z, cz, spec.closed_at_c(), bz, spec.name() + "|" + t.name);
  ClosedForms cf;
  cf.sprime = [spec, t, gp](double z) {
    double y = t.g_inv(z);
    return spec.scale_derivative(y) / gp(y);
  };
  cf.s = [spec, t](double z) { return spec.scale(t.g_inv(z)); };
  cf.scale_diff = [spec, t](double v, double w) { return spec.scale_difference(t.g_inv(v), t.g_inv(w)); };
  cf.s_at_c = spec.scale_at_c();
  cf.m = [spec, t, gp](double z) {
    double y = t.g_inv(z);
    return spec.speed_density(y) / gp(y);
  };
  cf.speed_mass = [spec, t](double l, double r) {
    double yl = l <= 0 ? 0.0 : t.g_inv(l);
    double yr = std::isinf(r) ? spec.c() : t.g_inv(r);
    return spec.speed_mass(yl, std::min(yr, spec.c()));
  };
  cf.lifetime_tail = spec.closed().lifetime_tail;
  return z.with_closed_forms(cf);
}

double expected_lifetime(const DiffusionSpec& spec, double x) {
  double tail = spec.speed_mass(x, spec.c());
  if (std::isinf(tail)) return kInf;
  return spec.sm_from0(x) + spec.scale(x) * tail;
}

double started_at_c_functional(const DiffusionSpec& spec, const Fn& F) {
  Integral r = integrate([&](double v) { return F(v) * spec.scale(v) * spec.speed_density(v); }, 0.0, spec.c());
  return r.finite ? r.value : kInf;
}

double up_mean_time(const DiffusionSpec& spec, double w) {
  if (!(w > 0 && w <= spec.c())) throw std::domain_error("up_mean_time: w outside (0,c]");
  double sw = w >= spec.c() ? spec.scale_at_c() : spec.scale(w);
  double p1 = spec.sm_from0(w), p2 = spec.s2m_from0(w);
  if (std::isinf(sw)) return p1;
  return p1 - p2 / sw;
}

double up_second_moment(const DiffusionSpec& spec, double w) {
  if (!(w > 0 && w < spec.c())) throw std::domain_error("up_second_moment: w outside (0,c)");
  const double I = up_mean_time(spec, w);
  // E_z[T_w] = E_0[T_w] - E_0[T_z]
  auto h = [&](double z) { return I - (spec.sm_from0(z) - spec.s2m_from0(z) / spec.scale(z)); };
  Cumulative H(
      [&](double z) {
        double s = spec.scale(z);
        return h(z) * s * s * spec.speed_density(z);
      },
      0.0, 0.5 * w, w);
  Integral outer = integrate(
      [&](double y) {
        double s = spec.scale(y);
        return H.from_lo(y) * spec.scale_derivative(y) / (s * s);
      },
      0.0, w);
  if (!outer.finite) return kInf;
  return 2.0 * outer.value;
}

double truncated_lifetime_mass(const DiffusionSpec& spec, double b) {
  if (!(b >= 0 && b < spec.c())) throw std::domain_error("truncated_lifetime_mass: b outside [0,c)");
  Integral main = integrate(
      [&](double w) {
        double s = spec.scale(w);
        double inner = spec.sm_from0(w) - spec.s2m_from0(w) / s;
        return spec.scale_derivative(w) / (s * s) * inner;
      },
      b, spec.c());
  if (!main.finite) return kInf;
  double total = 2.0 * main.value;
  double sc = spec.scale_at_c();
  if (std::isfinite(sc)) {
    double p1 = spec.sm_from0(spec.c()), p2 = spec.s2m_from0(spec.c());
    total += (2.0 * p1 - p2 / sc) / sc;
  }
  return total;
}

}  // namespace ipevo
