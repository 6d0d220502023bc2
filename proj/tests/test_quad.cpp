#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "ipevo/quad.hpp"

using namespace ipevo;

TEST_CASE("gauss rules on smooth integrands") {
  CHECK(gk([](double x) { return std::sin(x); }, 0, M_PI) == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(gl20([](double x) { return std::pow(x, 5); }, 0, 1) == doctest::Approx(1.0 / 6).epsilon(1e-14));
}

TEST_CASE("endpoint singularities and infinite range") {
  auto r = integrate([](double x) { return 1 / std::sqrt(x); }, 0, 1);
  CHECK(r.finite);
  CHECK(r.value == doctest::Approx(2.0).epsilon(1e-8));
  auto e = integrate([](double x) { return std::exp(-x); }, 0, kInf);
  CHECK(e.value == doctest::Approx(1.0).epsilon(1e-8));
  auto p = integrate([](double x) { return 1 / (x * x); }, 1, kInf);
  CHECK(p.value == doctest::Approx(1.0).epsilon(1e-8));
  // both ends singular
  auto b = integrate([](double x) { return 1 / std::sqrt(x * (1 - x)); }, 0, 1);
  CHECK(b.value == doctest::Approx(M_PI).epsilon(1e-7));
}

TEST_CASE("divergent integrals are flagged") {
  CHECK_FALSE(integrate([](double x) { return 1 / x; }, 0, 1).finite);
  CHECK_FALSE(integrate([](double x) { return std::pow(x, -1.5); }, 0, 1).finite);
  CHECK_FALSE(integrate([](double x) { return 1 / x; }, 1, kInf).finite);
}

TEST_CASE("cumulative table") {
  Cumulative c([](double x) { return 1 / std::sqrt(x); }, 0, 1, 4);
  CHECK(c.from_lo(1) == doctest::Approx(2.0).epsilon(1e-8));
  CHECK(c.to_hi(1) == doctest::Approx(2.0).epsilon(1e-8));
  CHECK(c(4) == doctest::Approx(2.0).epsilon(1e-8));
  CHECK(c(0.25) == doctest::Approx(-1.0).epsilon(1e-8));
  CHECK(c.below() == doctest::Approx(2.0).epsilon(1e-8));
  CHECK(c.above() == doctest::Approx(2.0).epsilon(1e-8));
}
