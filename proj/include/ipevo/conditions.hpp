#pragma once
#include <optional>
#include <string>
#include <vector>

#include "ipevo/diffusion.hpp"

namespace ipevo {

enum class ZeroClass { regular, exit, inadmissible };
enum class CClass { regular, inaccessible };
enum class LevyClass { bounded_variation, unbounded_variation, inadmissible };

const char* to_string(ZeroClass z);
const char* to_string(CClass c);
const char* to_string(LevyClass l);

struct Diagnostic {
  std::string name;
  double value = 0;
  std::string verdict;
  std::string anchor;
};

struct BoundaryReport {
  ZeroClass zero_class = ZeroClass::inadmissible;
  CClass c_class = CClass::inaccessible;
  bool a1_ok = false, a2_ok = false;
  std::vector<Diagnostic> diagnostics;
};

// behaviour of a sequence on x = 2^-k, k = 4..40
enum class Trend { bounded, to_zero, to_infinity };
struct TrendReport {
  Trend trend = Trend::bounded;  // for the upper envelope
  Trend lower = Trend::bounded;  // for the lower envelope (liminf)
  bool sensitive = false;        // last 12 points non-monotone
  double last = 0, max_last = 0, min_last = 0;
  std::vector<double> xs, values;
};
TrendReport dyadic_trend(const Fn& f, int k0 = 4, int k1 = 40);

struct AssumptionB {
  double alpha_minus = 0, alpha_plus = 0, eps0 = 0, q0 = 0;
  bool b1 = false, b2 = false, b3 = false, b4 = false;
  bool holds = false;
  double liminf_gx = 0, limsup_gx = 0;  // last-window min / max of g(x)/x
  Trend g_lower = Trend::bounded, g_upper = Trend::bounded;
  bool b5 = false;  // strong form: liminf g/x > 0 or limsup g/x < inf
};

struct AssumptionC {
  double beta_minus = 0, beta_plus = 0, eps1 = 0;
  bool c1 = false, c2 = false, c3 = false;
  double c3_integral = 0;
  bool holds = false;
};

struct ConditionReport {
  std::string model;
  BoundaryReport boundary;
  LevyClass levy_class = LevyClass::inadmissible;
  bool levy_conjectured = false;  // divergent x^2 double integral: necessity only believed
  double x2_integral = 0;
  bool x2_bound_ok = false;
  bool health_summable_ok = false;
  double health_integral = 0;
  bool start_ip_ok = false;
  std::string start_ip_method;
  std::optional<AssumptionB> assumption_b;
  std::optional<AssumptionC> assumption_c;
  std::vector<Diagnostic> trail;

  std::string to_text() const;
  std::string to_json() const;  // machine-readable key-value document
};

BoundaryReport check_boundary(const DiffusionSpec& Y);
LevyClass check_theorem_levy(const DiffusionSpec& Y, double* x2 = nullptr, std::vector<Diagnostic>* trail = nullptr);
bool check_health_summability(const DiffusionSpec& Y, const TransformSpec& g, LevyClass lc, double* value = nullptr);
bool check_start_ip(const DiffusionSpec& Y, std::string* method = nullptr, std::vector<Diagnostic>* trail = nullptr);
std::optional<AssumptionB> check_assumption_b(const DiffusionSpec& Y, const TransformSpec& g);
std::optional<AssumptionC> check_assumption_c(const DiffusionSpec& Y, const TransformSpec& g);

ConditionReport check_all(const DiffusionSpec& Y, const TransformSpec& g, const std::string& model_name = "");

// chi((x, inf)) = int_x^inf nu(zeta > z) dz for a given lifetime tail
double chi_tail(const Fn& lifetime_tail, double x);
// psi(lambda) = int_0^inf lambda^2 e^{-lambda x} chi((x, inf)) dx
double laplace_exponent(const Fn& lifetime_tail, double lambda);

// Hoelder exponent estimate near 0: min slope of log g against log x on a dyadic grid, capped at 1
double holder_exponent_estimate(const TransformSpec& g, double eps0);

// smooth-by-pieces increasing bijection of [0, 1/32] with liminf g/x = 0 and limsup g/x = inf
TransformSpec g_counterexample();

}  // namespace ipevo
