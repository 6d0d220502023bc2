#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "ipevo/diffusion.hpp"
#include "ipevo/models.hpp"

using namespace ipevo;

// BESQ(-1) normalized at b = 1: s(x) = x^1.5 / 1.5, m(x) = x^-1.5 / 2, M((x, inf)) = x^-0.5
TEST_CASE("scale and speed of BESQ(-1)") {
  Model m = besq(0.5);
  for (const DiffusionSpec& Y : {m.Y, m.Y.strip_closed_forms()}) {
    CHECK(Y.scale_derivative(1.0) == doctest::Approx(1.0));
    CHECK(Y.scale(1.0) == doctest::Approx(1 / 1.5).epsilon(1e-8));
    CHECK(Y.scale(4.0) == doctest::Approx(8 / 1.5).epsilon(1e-8));
    CHECK(Y.speed_density(4.0) == doctest::Approx(std::pow(4.0, -1.5) / 2).epsilon(1e-8));
    CHECK(Y.speed_mass(1.0, kInf) == doctest::Approx(1.0).epsilon(1e-7));
    CHECK(Y.speed_mass(0.25, 1.0) == doctest::Approx(1.0).epsilon(1e-7));
    CHECK_FALSE(std::isfinite(Y.speed_mass(0.0, 1.0)));
  }
}

TEST_CASE("up-diffusion exit moments and lifetime functionals") {
  Model m = besq(0.5);
  // up-process is BESQ(5): E T_1 = 1/5, E T_1^2 = 9/175
  CHECK(up_mean_time(m.Y, 1.0) == doctest::Approx(0.2).epsilon(1e-6));
  CHECK(up_second_moment(m.Y, 1.0) == doctest::Approx(9.0 / 175).epsilon(1e-5));
  CHECK(expected_lifetime(m.Y, 1.0) == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(truncated_lifetime_mass(m.Y, 1.0) == doctest::Approx(1.8).epsilon(1e-6));
  // quadrature path agrees with the closed forms
  DiffusionSpec bare = m.Y.strip_closed_forms();
  CHECK(up_mean_time(bare, 1.0) == doctest::Approx(0.2).epsilon(1e-5));
  CHECK(truncated_lifetime_mass(bare, 1.0) == doctest::Approx(1.8).epsilon(1e-4));
}

TEST_CASE("green function integrates to the exit time") {
  Model m = besq(0.5);
  double a = 0.5, w = 2.0, x = 1.0;
  double direct = m.Y.expected_exit_time(a, w, x);
  CHECK(direct > 0);
  // Euler-free check: for a driftless scale the exit time from (a, w) is bounded by the one from (0, w)
  CHECK(direct < m.Y.expected_exit_time(1e-9, w, x));
}

TEST_CASE("transform keeps the scale function") {
  Model m = besq(0.5);
  auto g = TransformSpec::power(2.0, 0.5);
  DiffusionSpec Z = transform(m.Y, g);
  for (double y : {0.1, 0.7, 3.0}) CHECK(Z.scale(g(y)) == doctest::Approx(m.Y.scale(y)).epsilon(1e-6));
}

TEST_CASE("construction errors") {
  auto mu = [](double) { return -1.0; };
  auto s2 = [](double x) { return 4 * x; };
  CHECK_THROWS_AS(DiffusionSpec(mu, s2, -1, false, 1), std::invalid_argument);
  CHECK_THROWS_AS(DiffusionSpec(mu, s2, 2, false, 3), std::invalid_argument);
  CHECK_THROWS_AS(DiffusionSpec(mu, nullptr, 2, false, 1), std::invalid_argument);
  CHECK_THROWS_AS(TransformSpec::power(-1, 1), std::invalid_argument);
}
