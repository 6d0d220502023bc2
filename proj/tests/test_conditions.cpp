#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "ipevo/conditions.hpp"
#include "ipevo/experiments.hpp"
#include "ipevo/models.hpp"

using namespace ipevo;

TEST_CASE("levy class of the examples") {
  double x2 = 0;
  CHECK(check_theorem_levy(besq_dim0(0.5).Y, &x2) == LevyClass::unbounded_variation);
  CHECK(x2 == doctest::Approx(0.5 / 4).epsilon(1e-6));  // eps2 / 4
  CHECK(check_theorem_levy(besq(0.5).Y) == LevyClass::unbounded_variation);
  CHECK(check_theorem_levy(wright_fisher(1.0, 0.25).Y) == LevyClass::bounded_variation);
  CHECK(check_boundary(wright_fisher(1.0, 0.25).Y).zero_class == ZeroClass::regular);
  CHECK(check_boundary(besq(0.5).Y).zero_class == ZeroClass::exit);
}

TEST_CASE("health summability") {
  Model b = besq(0.5);
  double v = 0;
  CHECK(check_health_summability(b.Y, TransformSpec::identity(), LevyClass::unbounded_variation, &v));
  CHECK(v == doctest::Approx(1.0).epsilon(1e-6));  // int_0^1 y m(y) dy = int y^-0.5 / 2
  CHECK(check_health_summability(b.Y, TransformSpec::power(1, 0.7), LevyClass::unbounded_variation));
  CHECK_FALSE(check_health_summability(b.Y, TransformSpec::power(1, 0.3), LevyClass::unbounded_variation));
  // bounded variation: always summable
  CHECK(check_health_summability(b.Y, TransformSpec::power(1, 0.3), LevyClass::bounded_variation));
}

TEST_CASE("start IP condition") {
  std::string how;
  CHECK(check_start_ip(besq(0.5).Y, &how));
  CHECK_FALSE(check_start_ip(besq_dim0(1.0).Y));
  // verdict does not depend on the eps2 reference scale
  CHECK_FALSE(check_start_ip(besq_dim0(0.25).Y));
}

TEST_CASE("assumptions B and C") {
  auto B = check_assumption_b(besq(0.5).Y, TransformSpec::identity());
  REQUIRE(B);
  CHECK(B->alpha_minus == doctest::Approx(0.5));
  CHECK(B->alpha_plus == doctest::Approx(0.5));
  CHECK(B->b5);
  CHECK(B->holds);
  CHECK_FALSE(check_assumption_c(besq(0.5).Y, TransformSpec::identity()));

  auto Bc = check_assumption_b(besq(0.5).Y, g_counterexample());
  REQUIRE(Bc);
  CHECK_FALSE(Bc->b5);

  Model wf = wright_fisher(1.0, 0.25);
  auto C = check_assumption_c(wf.Y, wf.g);
  REQUIRE(C);
  CHECK(C->holds);
  CHECK_FALSE(check_assumption_b(wf.Y, wf.g));
}

TEST_CASE("chi tail and laplace exponent") {
  Model b = besq(0.5);
  Fn tail = [&](double z) { return lifetime_tail_closed(b.Y, z); };
  CHECK(laplace_exponent(tail, 0.0) == 0.0);
  double prev = 0;
  for (double l : {0.5, 1.0, 2.0, 4.0}) {
    double p = laplace_exponent(tail, l);
    CHECK(p > prev);
    // psi(l) = l^1.5 2^-0.5 Gamma(0.5) / (Gamma(1.5)) for alpha = 0.5
    CHECK(p == doctest::Approx(std::pow(l, 1.5) * std::pow(2.0, -0.5) * std::tgamma(0.5) / (2 * 0.5 * std::tgamma(1.5))).epsilon(1e-4));
    prev = p;
  }
  CHECK(chi_tail(tail, 0.5) > chi_tail(tail, 1.0));
}

TEST_CASE("reports are deterministic and mutually consistent") {
  Model wf = wright_fisher(1.0, 0.25);
  auto r1 = check_all(wf.Y, wf.g, "wf"), r2 = check_all(wf.Y, wf.g, "wf");
  CHECK(r1.to_json() == r2.to_json());
  CHECK(r1.health_summable_ok);
  CHECK_FALSE((r1.assumption_b && r1.assumption_c));
}

TEST_CASE("known-answer table") {
  for (const auto& row : condition_table()) {
    INFO(row.label);
    for (const auto& [f, v] : row.checks) {
      INFO(f);
      CHECK(v.first == v.second);
    }
  }
}
