#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "ipevo/conditions.hpp"
#include "ipevo/partition.hpp"
#include "ipevo/rng.hpp"

using namespace ipevo;

using IP = IntervalPartition;

TEST_CASE("construction") {
  IP p({0.5, 0.25});
  CHECK(p.total() == 0.75);
  auto iv = p.intervals();
  CHECK(iv[1].first == 0.5);
  CHECK(iv[1].second == 0.75);
  CHECK_THROWS_AS(IP({0.5, 0.0}), std::invalid_argument);
  CHECK_THROWS_AS(IP({-1.0}), std::invalid_argument);
}

TEST_CASE("known distances") {
  CHECK(dprime(IP({1.0}), IP({2.0})) == doctest::Approx(1.0));
  CHECK(dprime(IP{}, IP{}) == 0.0);
  CHECK(dprime(IP({1.0, 2.0}), IP{}) == doctest::Approx(3.0));
  CHECK(dprime(IP({2.0, 1.0}), IP({1.0, 2.0})) == doctest::Approx(1.0));
  IP a({0.3, 0.1, 0.6});
  CHECK(dprime(a, a) == 0.0);
  // empty correspondence costs the larger mass
  Correspondence none;
  CHECK(distortion(IP({1.0}), IP({2.0, 0.5}), none) == doctest::Approx(2.5));
  Correspondence c;
  c.pairs = {{0, 0}};
  CHECK(distortion(IP({1.0}), IP({2.0, 0.5}), c) == doctest::Approx(1.5));  // |1-2| + unmatched 0.5
}

TEST_CASE("dynamic program agrees with enumeration") {
  Engine e = make_engine(51, 0);
  std::uniform_int_distribution<int> len(0, 5), num(1, 64);
  for (int it = 0; it < 200; ++it) {
    std::vector<double> x(len(e)), y(len(e));
    for (auto& v : x) v = num(e) / 64.0;
    for (auto& v : y) v = num(e) / 64.0;
    IP a(x), b(y);
    auto r = dprime_full(a, b);
    CHECK(r.exact);
    CHECK(r.value == doctest::Approx(dprime_bruteforce(a, b)).epsilon(1e-12));
    CHECK(r.lower <= r.value + 1e-12);
    CHECK(dprime(b, a) == doctest::Approx(r.value).epsilon(1e-12));
  }
}

TEST_CASE("triangle inequality and g-Lipschitz") {
  Engine e = make_engine(52, 0);
  std::uniform_int_distribution<int> len(0, 4), num(1, 32);
  auto draw = [&] {
    std::vector<double> x(len(e));
    for (auto& v : x) v = num(e) / 32.0;
    return IP(x);
  };
  TransformSpec g = TransformSpec::linear(2.0);
  for (int it = 0; it < 100; ++it) {
    IP a = draw(), b = draw(), c = draw();
    CHECK(dprime(a, c) <= dprime(a, b) + dprime(b, c) + 1e-12);
    CHECK(dprime(g_star(a, g), g_star(b, g)) <= 2 * dprime(a, b) + 1e-12);
  }
}

TEST_CASE("truncation slack") {
  IP a({0.5, 0.001, 0.3, 0.002}), b({0.4, 0.003, 0.35});
  auto t = dprime_truncated(a, b, 0.01);
  CHECK(t.kept_b == 2);
  CHECK(t.kept_g == 2);
  CHECK(std::abs(dprime(a, b) - t.value) <= t.slack + 1e-12);
}

TEST_CASE("concatenation and g-images") {
  IP c = concatenate({IP({0.1}), IP{}, IP({0.2, 0.3})});
  REQUIRE(c.size() == 3);
  CHECK(c.total() == doctest::Approx(0.6));
  IP s = g_star(IP({0.25, 1.0}), TransformSpec::power(1.0, 0.5));
  CHECK(s[0] == doctest::Approx(0.5));
  CHECK(s[1] == doctest::Approx(1.0));
}

TEST_CASE("group sums") {
  std::vector<WidthGroup> geo;
  for (int n = 1; n <= 30; ++n) geo.push_back({std::ldexp(1.0, -n), 1.0});
  auto s = group_sum(geo, [](double x) { return x; });
  CHECK_FALSE(s.divergent);
  CHECK(s.total == doctest::Approx(1.0).epsilon(1e-6));
  // the counterexample partition has finite mass but a divergent g-image
  auto parts = g_counterexample_partition();
  CHECK_FALSE(group_sum(parts, [](double x) { return x; }).divergent);
  CHECK(g_star_groups(parts, g_counterexample()).divergent);
}
