#include "ipevo/conditions.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "json.hpp"

namespace ipevo {

const char* to_string(ZeroClass z) {
  switch (z) {
    case ZeroClass::regular: return "regular";
    case ZeroClass::exit: return "exit";
    default: return "inadmissible";
  }
}
const char* to_string(CClass c) { return c == CClass::regular ? "regular" : "inaccessible"; }
const char* to_string(LevyClass l) {
  switch (l) {
    case LevyClass::bounded_variation: return "bounded_variation";
    case LevyClass::unbounded_variation: return "unbounded_variation";
    default: return "inadmissible";
  }
}
static const char* to_string(Trend t) {
  switch (t) {
    case Trend::to_zero: return "to_zero";
    case Trend::to_infinity: return "to_infinity";
    default: return "bounded";
  }
}

namespace {

const char* ok(bool b) { return b ? "ok" : "fail"; }

double safe(const Fn& f, double x) {
  try {
    double v = f(x);
    return std::isnan(v) ? kInf : v;
  } catch (const std::exception&) {
    return kInf;
  }
}

// the largest eps = min(b, 1) 2^-j on which the drift keeps one strict sign
struct DriftEnvelope {
  double eps = 0, lo = 0, hi = 0;
  int sign = 0;
};

DriftEnvelope drift_envelope(const DiffusionSpec& Y) {
  DriftEnvelope out;
  double top = std::min({Y.b(), 1.0, 0.5 * Y.c()});
  for (int j = 0; j <= 20; ++j) {
    double eps = top * std::ldexp(1.0, -j);
    double lo = kInf, hi = -kInf;
    auto take = [&](double x) {
      double v = Y.mu(x);
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    };
    for (int k = 0; k <= 40; ++k) take(eps * std::ldexp(1.0, -k));
    for (int i = 1; i <= 64; ++i) take(eps * i / 64.0);
    if (hi < 0 || lo > 0) {
      out.eps = eps;
      out.lo = lo;
      out.hi = hi;
      out.sign = hi < 0 ? -1 : 1;
      return out;
    }
  }
  return out;
}

bool variance_is_4x(const DiffusionSpec& Y) {
  double top = std::min(Y.b(), 0.5 * Y.c());
  for (int k = 0; k <= 40; ++k) {
    double x = top * std::ldexp(1.0, -k);
    if (std::abs(Y.sigma2(x) - 4 * x) > 1e-9 * 4 * x) return false;
  }
  return true;
}

}  // namespace

TrendReport dyadic_trend(const Fn& f, int k0, int k1) {
  TrendReport r;
  for (int k = k0; k <= k1; ++k) {
    double x = std::ldexp(1.0, -k);
    r.xs.push_back(x);
    r.values.push_back(safe(f, x));
  }
  const int n = static_cast<int>(r.values.size());
  const int w = std::min(12, n / 2);
  auto mx = [&](int a, int b) { return *std::max_element(r.values.begin() + a, r.values.begin() + b); };
  auto mn = [&](int a, int b) { return *std::min_element(r.values.begin() + a, r.values.begin() + b); };
  double max_last = mx(n - w, n), max_prev = mx(n - 2 * w, n - w);
  double min_last = mn(n - w, n), min_prev = mn(n - 2 * w, n - w);
  r.last = r.values.back();
  r.max_last = max_last;
  r.min_last = min_last;
  if (std::isinf(max_last) || max_last > 1.2 * max_prev) r.trend = Trend::to_infinity;
  else if (max_last < max_prev / 1.2) r.trend = Trend::to_zero;
  if (min_last < min_prev / 1.2) r.lower = Trend::to_zero;
  else if (std::isinf(min_last) || min_last > 1.2 * min_prev) r.lower = Trend::to_infinity;
  bool up = true, down = true;
  for (int i = n - w + 1; i < n; ++i) {
    if (r.values[i] < r.values[i - 1]) up = false;
    if (r.values[i] > r.values[i - 1]) down = false;
  }
  r.sensitive = !(up || down);
  return r;
}

BoundaryReport check_boundary(const DiffusionSpec& Y) {
  BoundaryReport r;
  const double b = Y.b();
  double sb = kInf;
  try {
    sb = Y.scale(b);
  } catch (const InadmissibleSpec&) {
  }
  r.diagnostics.push_back({"s(0+) finite (s(b))", sb, ok(std::isfinite(sb)), "attainable 0: int_0^x s dM < inf"});
  double a1 = std::isfinite(sb) ? Y.sm_from0(b) : kInf;
  r.a1_ok = std::isfinite(a1);
  r.diagnostics.push_back({"A1: int_0^b s dM", a1, ok(r.a1_ok), "A1: P_x(T_0 < inf) > 0"});
  double a2 = Y.speed_mass(b, Y.c());
  r.a2_ok = std::isfinite(a2);
  r.diagnostics.push_back({"A2: M((b,c))", a2, ok(r.a2_ok), "A2: E_x(T_y) < inf"});
  double m0 = Y.speed_mass(0.0, b);
  r.diagnostics.push_back({"M((0,b))", m0, std::isfinite(m0) ? "finite" : "infinite", "0 regular iff M(E) < inf"});
  if (!r.a1_ok) r.zero_class = ZeroClass::inadmissible;
  else r.zero_class = std::isfinite(m0) && r.a2_ok ? ZeroClass::regular : ZeroClass::exit;
  double sc = std::isfinite(sb) ? Y.scale_at_c() : kInf;
  r.c_class = std::isfinite(sc) ? CClass::regular : CClass::inaccessible;
  r.diagnostics.push_back({"s(c)", sc, to_string(r.c_class), "c regular iff s(c) < inf"});
  return r;
}

LevyClass check_theorem_levy(const DiffusionSpec& Y, double* x2, std::vector<Diagnostic>* trail) {
  BoundaryReport br = check_boundary(Y);
  if (trail) trail->insert(trail->end(), br.diagnostics.begin(), br.diagnostics.end());
  if (!br.a1_ok || !br.a2_ok) return LevyClass::inadmissible;
  if (br.zero_class == ZeroClass::regular) {
    if (x2) *x2 = 0;
    return LevyClass::bounded_variation;
  }
  const double b = Y.b();
  Integral I = integrate([&](double v) { return Y.sm_from0(v) * Y.speed_density(v); }, 0.0, b);
  double val = I.finite ? I.value : kInf;
  if (x2) *x2 = val;
  if (trail) trail->push_back({"x^2 bound: int_0^b int_0^v s dM dM", val, ok(I.finite), "x^2 bound"});
  return I.finite ? LevyClass::unbounded_variation : LevyClass::inadmissible;
}

bool check_health_summability(const DiffusionSpec& Y, const TransformSpec& g, LevyClass lc, double* value) {
  if (lc == LevyClass::bounded_variation) {
    if (value) *value = 0;
    return true;
  }
  if (lc == LevyClass::inadmissible) return false;
  Integral I = integrate([&](double y) { return g(y) * Y.speed_density(y); }, 0.0, Y.b());
  if (value) *value = I.finite ? I.value : kInf;
  return I.finite;
}

bool check_start_ip(const DiffusionSpec& Y, std::string* method, std::vector<Diagnostic>* trail) {
  // sufficient: limsup mu < 0 at 0
  TrendReport mu = dyadic_trend([&](double x) { return Y.mu(x); });
  const int n = static_cast<int>(mu.values.size());
  double max_prev = *std::max_element(mu.values.begin() + n - 24, mu.values.begin() + n - 12);
  bool drift_ok = mu.max_last < 0 && mu.max_last <= max_prev / 1.2;
  if (trail) trail->push_back({"limsup mu(x), x -> 0", mu.max_last, drift_ok ? "negative" : "not negative", "start IP via drift"});
  if (drift_ok) {
    if (method) *method = "drift";
    return true;
  }
  TrendReport r = dyadic_trend([&](double x) { return expected_lifetime(Y, x) / x; });
  bool fin = r.trend != Trend::to_infinity;
  if (trail)
    trail->push_back({std::string("r(x)/x at x = 2^-40") + (r.sensitive ? " (sensitive)" : ""), r.last,
                      fin ? "bounded" : "diverges", "starting IP condition"});
  if (method) *method = "r(x)/x";
  return fin;
}

double holder_exponent_estimate(const TransformSpec& g, double eps0) {
  if (g.holder) return g.holder->q0;
  double q = 1.0;
  for (int k = 1; k <= 40; ++k) {
    double x0 = eps0 * std::ldexp(1.0, -k + 1), x1 = eps0 * std::ldexp(1.0, -k);
    double a = g(x0), b = g(x1);
    if (!(a > 0 && b > 0)) continue;
    q = std::min(q, std::log(a / b) / std::log(2.0));
  }
  return q;
}

std::optional<AssumptionB> check_assumption_b(const DiffusionSpec& Y, const TransformSpec& g) {
  if (!variance_is_4x(Y)) return std::nullopt;
  DriftEnvelope env = drift_envelope(Y);
  if (env.sign >= 0) return std::nullopt;
  AssumptionB r;
  r.eps0 = env.eps;
  r.alpha_minus = -env.hi / 2;
  r.alpha_plus = -env.lo / 2;
  r.b1 = check_theorem_levy(Y) == LevyClass::unbounded_variation;
  r.b2 = true;
  r.b3 = r.alpha_minus > 0 && r.alpha_plus < 1;
  r.q0 = holder_exponent_estimate(g, r.eps0);
  r.b4 = r.q0 > r.alpha_plus;
  r.holds = r.b1 && r.b2 && r.b3 && r.b4;
  TrendReport gx = dyadic_trend([&](double x) { return g(x) / x; });
  r.liminf_gx = gx.min_last;
  r.limsup_gx = gx.max_last;
  r.g_lower = gx.lower;
  r.g_upper = gx.trend;
  r.b5 = gx.lower != Trend::to_zero || gx.trend != Trend::to_infinity;
  return r;
}

std::optional<AssumptionC> check_assumption_c(const DiffusionSpec& Y, const TransformSpec& g) {
  if (!variance_is_4x(Y)) return std::nullopt;
  DriftEnvelope env = drift_envelope(Y);
  if (env.sign <= 0) return std::nullopt;
  AssumptionC r;
  r.eps1 = env.eps;
  r.beta_minus = env.lo / 2;
  r.beta_plus = env.hi / 2;
  r.c1 = true;
  r.c2 = r.beta_minus > 0 && r.beta_plus < 1;
  if (r.c2) {
    const double p = 1.0 / (1.0 - r.beta_minus);
    Integral I = integrate([&](double y) { return g(std::pow(y, p)) / (y * y); }, 0.0, r.eps1);
    r.c3_integral = I.finite ? I.value : kInf;
    r.c3 = I.finite;
  }
  r.holds = r.c1 && r.c2 && r.c3;
  return r;
}

ConditionReport check_all(const DiffusionSpec& Y, const TransformSpec& g, const std::string& model_name) {
  ConditionReport r;
  r.model = model_name.empty() ? Y.name() : model_name;
  r.boundary = check_boundary(Y);
  r.trail = r.boundary.diagnostics;
  if (!r.boundary.a1_ok || !r.boundary.a2_ok) {
    r.levy_class = LevyClass::inadmissible;
    r.trail.push_back({"A1/A2", 0, "fail", "Levy measure theorem needs A1, A2"});
    return r;
  }
  if (r.boundary.zero_class == ZeroClass::regular) {
    r.levy_class = LevyClass::bounded_variation;
    r.x2_bound_ok = true;
    r.trail.push_back({"levy class", 0, "bounded_variation", "levy measure: bounded variation iff M(E) < inf"});
  } else {
    std::vector<Diagnostic> t;
    r.levy_class = check_theorem_levy(Y, &r.x2_integral, &t);
    for (auto& d : t)
      if (d.anchor == "x^2 bound") r.trail.push_back(d);
    r.x2_bound_ok = r.levy_class == LevyClass::unbounded_variation;
    r.levy_conjectured = !r.x2_bound_ok;
    r.trail.push_back({"levy class", r.x2_integral,
                       r.x2_bound_ok ? "unbounded_variation" : "inadmissible (conjectured)",
                       "levy measure: x^2 bound gives unbounded variation"});
  }
  r.health_summable_ok = check_health_summability(Y, g, r.levy_class, &r.health_integral);
  r.trail.push_back({"health summability: int_0^b g dM", r.health_integral, ok(r.health_summable_ok),
                     "IP existence condition"});
  r.start_ip_ok = check_start_ip(Y, &r.start_ip_method, &r.trail);
  r.trail.push_back({"start IP (" + r.start_ip_method + ")", 0, ok(r.start_ip_ok), "starting IP condition"});
  r.assumption_b = check_assumption_b(Y, g);
  r.assumption_c = check_assumption_c(Y, g);
  if (r.assumption_b) {
    auto& b = *r.assumption_b;
    r.trail.push_back({"B3 alpha-", b.alpha_minus, ok(b.b3), "B3: -2a+ <= mu <= -2a- on (0,eps0]"});
    r.trail.push_back({"B3 alpha+", b.alpha_plus, ok(b.b3), "B3: -2a+ <= mu <= -2a- on (0,eps0]"});
    r.trail.push_back({"B4 q0", b.q0, ok(b.b4), "B4: q0 > alpha+"});
    r.trail.push_back({"B5 liminf g(x)/x", b.liminf_gx, to_string(b.g_lower), "B5: liminf g/x > 0 or limsup g/x < inf"});
    r.trail.push_back({"B5 limsup g(x)/x", b.limsup_gx, to_string(b.g_upper), "B5: liminf g/x > 0 or limsup g/x < inf"});
    r.trail.push_back({"assumption B", 0, b.holds ? (b.b5 ? "holds (strong)" : "holds") : "fails", "assumption B"});
  } else {
    r.trail.push_back({"assumption B", 0, "not applicable", "assumption B"});
  }
  if (r.assumption_c) {
    auto& c = *r.assumption_c;
    r.trail.push_back({"C2 beta-", c.beta_minus, ok(c.c2), "C2: 2b- <= mu <= 2b+ on (0,eps1]"});
    r.trail.push_back({"C2 beta+", c.beta_plus, ok(c.c2), "C2: 2b- <= mu <= 2b+ on (0,eps1]"});
    r.trail.push_back({"C3 integral", c.c3_integral, ok(c.c3), "C3: int g(y^{1/(1-b-)})/y^2 < inf"});
    r.trail.push_back({"assumption C", 0, c.holds ? "holds" : "fails", "assumption C"});
  } else {
    r.trail.push_back({"assumption C", 0, "not applicable", "assumption C"});
  }
  return r;
}

std::string ConditionReport::to_text() const {
  std::ostringstream os;
  os << "model " << model << "\n";
  os << "zero boundary: " << to_string(boundary.zero_class) << ", c boundary: " << to_string(boundary.c_class) << "\n";
  os << "levy class: " << to_string(levy_class) << (levy_conjectured ? " (conjectured)" : "") << "\n";
  for (const auto& d : trail) os << "  " << d.name << " = " << d.value << " : " << d.verdict << "  [" << d.anchor << "]\n";
  return os.str();
}

std::string ConditionReport::to_json() const {
  nlohmann::ordered_json j;
  auto num = [](double v) -> nlohmann::ordered_json {
    if (std::isfinite(v)) return v;
    return v > 0 ? "inf" : "-inf";
  };
  j["model"] = model;
  j["zero_class"] = to_string(boundary.zero_class);
  j["c_class"] = to_string(boundary.c_class);
  j["a1_ok"] = boundary.a1_ok;
  j["a2_ok"] = boundary.a2_ok;
  j["levy_class"] = to_string(levy_class);
  j["levy_conjectured"] = levy_conjectured;
  j["x2_integral"] = num(x2_integral);
  j["x2_bound_ok"] = x2_bound_ok;
  j["health_summable_ok"] = health_summable_ok;
  j["health_integral"] = num(health_integral);
  j["start_ip_ok"] = start_ip_ok;
  j["start_ip_method"] = start_ip_method;
  if (assumption_b) {
    auto& b = *assumption_b;
    j["assumption_b"] = {{"alpha_minus", b.alpha_minus}, {"alpha_plus", b.alpha_plus}, {"eps0", b.eps0},
                         {"q0", b.q0},                   {"b1", b.b1},                 {"b3", b.b3},
                         {"b4", b.b4},                   {"holds", b.holds},           {"b5", b.b5}};
  } else {
    j["assumption_b"] = nullptr;
  }
  if (assumption_c) {
    auto& c = *assumption_c;
    j["assumption_c"] = {{"beta_minus", c.beta_minus}, {"beta_plus", c.beta_plus}, {"eps1", c.eps1},
                         {"c2", c.c2},                 {"c3", c.c3},               {"c3_integral", num(c.c3_integral)},
                         {"holds", c.holds}};
  } else {
    j["assumption_c"] = nullptr;
  }
  nlohmann::ordered_json t = nlohmann::ordered_json::array();
  for (const auto& d : trail) t.push_back({{"name", d.name}, {"value", num(d.value)}, {"verdict", d.verdict}, {"anchor", d.anchor}});
  j["trail"] = t;
  return j.dump(2);
}

double chi_tail(const Fn& lifetime_tail, double x) {
  Integral I = integrate(lifetime_tail, x, kInf);
  return I.finite ? I.value : kInf;
}

double laplace_exponent(const Fn& lifetime_tail, double lambda) {
  if (lambda == 0) return 0.0;
  // chi tail as a table, integrated against the exponential kernel
  Cumulative chi(lifetime_tail, 0.0, 1.0 / lambda, kInf);
  if (!std::isfinite(chi.above())) return kInf;
  Integral I = integrate([&](double x) { return lambda * lambda * std::exp(-lambda * x) * chi.to_hi(x); }, 0.0, kInf);
  return I.finite ? I.value : kInf;
}

TransformSpec g_counterexample() {
  // nodes in (log2 x, log2 g), interpolated linearly: power-law pieces
  std::vector<std::pair<double, double>> nodes{{-5.0, -5.0}};
  for (int n = 3; n <= 8; ++n) {
    double p = std::ldexp(1.0, n), p1 = std::ldexp(1.0, n + 1);
    nodes.push_back({-p, -p});
    nodes.push_back({-p - 1, -p - n});
    nodes.push_back({-p1 + 1, -p1 + n});
  }
  std::sort(nodes.begin(), nodes.end());
  auto interp = [](const std::vector<std::pair<double, double>>& t, double u) {
    if (u <= t.front().first) return t.front().second + (u - t.front().first);
    if (u >= t.back().first) return t.back().second + (u - t.back().first);
    auto it = std::upper_bound(t.begin(), t.end(), std::make_pair(u, -kInf));
    auto lo = it - 1;
    double w = (u - lo->first) / (it->first - lo->first);
    return lo->second + w * (it->second - lo->second);
  };
  std::vector<std::pair<double, double>> inv;
  for (auto& [a, b] : nodes) inv.push_back({b, a});
  TransformSpec t;
  t.name = "g-counterexample";
  t.g = [nodes, interp](double x) { return x <= 0 ? 0.0 : std::exp2(interp(nodes, std::log2(x))); };
  t.g_inv = [inv, interp](double z) { return z <= 0 ? 0.0 : std::exp2(interp(inv, std::log2(z))); };
  return t;
}

}  // namespace ipevo
