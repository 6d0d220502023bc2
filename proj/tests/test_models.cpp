#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "ipevo/diffusion.hpp"
#include "ipevo/excursions.hpp"
#include "ipevo/models.hpp"

using namespace ipevo;

TEST_CASE("besq family closed forms") {
  for (double a : {0.25, 0.5, 0.75}) {
    Model m = besq(a);
    REQUIRE(m.besq_alpha);
    CHECK(*m.besq_alpha == a);
    CHECK(m.Y.mu(0.3) == doctest::Approx(-2 * a));
    CHECK(m.Y.sigma2(0.3) == doctest::Approx(1.2));
    // s(x) = x^{1+a}/(1+a), P_x(T_w < T_0) = (x/w)^{1+a}
    CHECK(m.Y.scale(1.0) / m.Y.scale(4.0) == doctest::Approx(std::pow(0.25, 1 + a)).epsilon(1e-8));
  }
}

TEST_CASE("lifetime law of BESQ(-2 alpha)") {
  auto ig = besq_lifetime_law(0.5, 1.0);
  CHECK(ig.shape == 1.5);
  CHECK(ig.scale == 0.5);
  CHECK(ig.mean() == doctest::Approx(1.0));
  CHECK(ig.cdf(1e-6) == doctest::Approx(0.0));
  std::mt19937_64 e(3);
  double s = 0;
  const int n = 20000;
  for (int i = 0; i < n; ++i) s += ig.cdf(ig.sample(e));
  CHECK(s / n == doctest::Approx(0.5).epsilon(0.02));  // probability integral transform
}

TEST_CASE("lifetime tail oracles agree") {
  Model m = besq(0.5);
  // nu(zeta > z) = (2z)^{-1-alpha} / Gamma(1+alpha), and the mixture over m(u) has the same value
  for (double z : {0.1, 1.0, 5.0}) {
    double closed = lifetime_tail_closed(m.Y, z);
    CHECK(closed == doctest::Approx(std::pow(2 * z, -1.5) / std::tgamma(1.5)).epsilon(1e-10));
    CHECK(lifetime_tail_mixture(0.5, z) == doctest::Approx(closed).epsilon(1e-6));
  }
}

TEST_CASE("wright-fisher drift") {
  // mu_Y(0+) = 4 gamma2
  CHECK(wf_mu_y(1e-8, 1.0, 0.25) == doctest::Approx(1.0).epsilon(1e-4));
  for (double y : {0.1, 1.0, 5.0}) CHECK(wf_g_inv(wf_g(y)) == doctest::Approx(y).epsilon(1e-10));
  CHECK_THROWS_AS(wright_fisher(1.0, 0.0), std::invalid_argument);
}

TEST_CASE("parameter validation") {
  CHECK_THROWS_AS(besq(0.0), std::invalid_argument);
  CHECK_THROWS_AS(besq(1.0), std::invalid_argument);
  CHECK_THROWS_AS(cir(1.0, 1.0, 0.25), std::invalid_argument);
  CHECK_THROWS_AS(cir(1.0, -1.0, 0.75), std::invalid_argument);
  CHECK_THROWS_AS(besq_dim0(0.0), std::invalid_argument);
  CHECK_THROWS_AS(self_similar(0.5, -1, 0.7), std::invalid_argument);
}

TEST_CASE("besq_dim0 and custom models") {
  Model d = besq_dim0(1.0);
  CHECK(d.Y.mu(0.5) == doctest::Approx(0.0));
  CHECK(d.Y.mu(2.0) == doctest::Approx(-2.0));
  // custom with BESQ(-1) tables reproduces the scale function
  Model c = custom({{0.0, -1.0}, {100.0, -1.0}}, {{1e-9, 4e-9}, {100.0, 400.0}}, kInf, false, 1.0, TransformSpec::identity());
  CHECK(c.Y.scale(4.0) == doctest::Approx(besq(0.5).Y.scale(4.0)).epsilon(1e-5));
}
