#pragma once
#include <map>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "ipevo/diffusion.hpp"

namespace ipevo {

struct Model {
  std::string id;
  std::map<std::string, double> params;
  DiffusionSpec Y;      // untransformed diffusion
  TransformSpec g;
  DiffusionSpec Z;      // Z = g(Y)
  std::optional<double> besq_alpha;  // set for the BESQ(-2 alpha) family
};

Model besq(double alpha);
Model besq_dim0(double eps2);
Model self_similar(double alpha, double k, double q);
Model wright_fisher(double gamma1, double gamma2);
Model cir(double a, double b, double c);
// piecewise-linear drift / variance tables on (0, c)
Model custom(std::vector<std::pair<double, double>> mu_table, std::vector<std::pair<double, double>> sigma2_table,
             double c, bool closed_at_c, double b, TransformSpec g);

// Lifetime of BESQ(-2 alpha) from u absorbed at 0: InverseGamma(1 + alpha, u / 2)
struct InverseGammaLaw {
  double shape, scale;
  double pdf(double x) const;
  double cdf(double x) const;
  double mean() const;
  template <class Eng>
  double sample(Eng& eng) const {
    std::gamma_distribution<double> gd(shape, 1.0);
    return scale / gd(eng);
  }
};

InverseGammaLaw besq_lifetime_law(double alpha, double u);

// helpers for the Wright-Fisher example
double wf_g(double y);
double wf_g_inv(double z);
double wf_mu_y(double y, double gamma1, double gamma2);

}  // namespace ipevo
