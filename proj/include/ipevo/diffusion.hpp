#pragma once
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>

#include "ipevo/quad.hpp"

namespace ipevo {

struct InadmissibleSpec : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Optional closed forms. Any subset may be given; missing pieces fall back to
// quadrature tables built on first use.
struct ClosedForms {
  Fn sprime;
  Fn s;                  // s(x) = int_0^x s'
  std::optional<double> s_at_c;
  Fn2 scale_diff;        // s(w) - s(v)
  Fn m;
  Fn2 speed_mass;        // int_l^r m
  Fn mu_up;              // drift of the up-diffusion
  Fn lifetime_tail;      // nu(zeta > z) in this normalization
};

struct HolderData {
  double q0 = 1.0;
  double Cq = 1.0;
  double eps0 = 0.0;
};

struct TransformSpec {
  std::string name = "identity";
  Fn g, g_inv;
  Fn gp, gpp;                       // optional derivatives
  std::optional<HolderData> holder;

  static TransformSpec identity();
  static TransformSpec power(double k, double q);
  static TransformSpec linear(double k) { return power(k, 1.0); }
  double operator()(double x) const { return g(x); }
};

class DiffusionSpec {
 public:
  DiffusionSpec() = default;
  DiffusionSpec(Fn mu, Fn sigma2, double c, bool closed_at_c, double b, std::string name = "");

  double mu(double x) const;
  double sigma2(double x) const;
  double c() const;
  bool closed_at_c() const;
  double b() const;
  const std::string& name() const;
  bool has_drift() const;

  double scale_derivative(double x) const;
  double scale(double x) const;
  double scale_difference(double v, double w) const;
  double scale_at_c() const;
  double speed_density(double x) const;
  double speed_mass(double l, double r) const;

  double green(double a, double w, double x, double v) const;
  double expected_exit_time(double a, double w, double x, bool split = true) const;

  const ClosedForms& closed() const;
  DiffusionSpec with_closed_forms(ClosedForms cf) const;
  DiffusionSpec strip_closed_forms() const;
  DiffusionSpec renamed(std::string n) const;

  // int_0^x s dM and int_0^x s^2 dM (running tables, used by nested integrals)
  double sm_from0(double x) const;
  double s2m_from0(double x) const;

  bool valid() const { return static_cast<bool>(p_); }

  struct Impl;

 private:
  std::shared_ptr<Impl> p_;
};

DiffusionSpec up_diffusion(const DiffusionSpec& spec);
DiffusionSpec transform(const DiffusionSpec& spec, const TransformSpec& t);

// r(x) = int s(v ^ x) M(dv), the mean lifetime of the 0-diffusion from x
double expected_lifetime(const DiffusionSpec& spec, double x);
// E_c[int_0^{T_0} F] = int F s dM (also used with c = inf as lim_x E_x)
double started_at_c_functional(const DiffusionSpec& spec, const Fn& F);
// up-diffusion from 0: E[T_w] and E[T_w^2]
double up_mean_time(const DiffusionSpec& spec, double w);
double up_second_moment(const DiffusionSpec& spec, double w);
// int zeta 1{A > b} d nu
double truncated_lifetime_mass(const DiffusionSpec& spec, double b);

}  // namespace ipevo
