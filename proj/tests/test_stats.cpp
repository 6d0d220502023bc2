#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "ipevo/rng.hpp"
#include "ipevo/stats.hpp"

using namespace ipevo;

TEST_CASE("kolmogorov distribution") {
  CHECK(kolmogorov_sf(0.0) == 1.0);
  CHECK(kolmogorov_sf(1.358) == doctest::Approx(0.05).epsilon(0.01));
  CHECK(kolmogorov_sf(1.628) == doctest::Approx(0.01).epsilon(0.01));
  CHECK(ks_critical(1e6, 0.01) * 1e3 == doctest::Approx(1.628).epsilon(0.01));
}

TEST_CASE("one-sample KS") {
  Engine e = make_engine(1, 0);
  std::uniform_real_distribution<double> u;
  std::vector<double> x(2000);
  for (auto& v : x) v = u(e);
  auto ok = ks_one_sample(x, [](double t) { return std::clamp(t, 0.0, 1.0); });
  CHECK(ok.p > 0.01);
  auto bad = ks_one_sample(x, [](double t) { return std::clamp(t * t, 0.0, 1.0); });
  CHECK(bad.p < 1e-6);
  CHECK(ks_one_sample({0.5}, [](double t) { return t; }).d == doctest::Approx(0.5));
}

TEST_CASE("two-sample KS and W1") {
  std::vector<double> a{1, 2, 3}, b{1, 2, 3};
  CHECK(ks_two_sample(a, b).d == 0);
  CHECK(w1_distance(a, b) == 0);
  std::vector<double> c{2, 3, 4};
  CHECK(w1_distance(a, c) == doctest::Approx(1.0));
  CHECK(ks_two_sample(a, c).d == doctest::Approx(1.0 / 3));
  CHECK(w1_distance({0.0}, {0.0, 2.0}) == doctest::Approx(1.0));
}

TEST_CASE("moments and binomial interval") {
  CHECK(mean({1, 2, 3, 4}) == 2.5);
  CHECK(variance({1, 2, 3, 4}) == doctest::Approx(5.0 / 3));
  auto ci = binomial_ci(50, 100, 2);
  CHECK(ci.p == 0.5);
  CHECK(ci.sigma == doctest::Approx(0.05));
  CHECK(ci.lo == doctest::Approx(0.4));
}

TEST_CASE("permutation test") {
  Engine e = make_engine(2, 0);
  std::normal_distribution<double> n;
  std::vector<double> a(300), b(300), c(300);
  for (auto& v : a) v = n(e);
  for (auto& v : b) v = n(e);
  for (auto& v : c) v = n(e) + 0.5;
  CHECK(permutation_test_mean(a, b, 2000, 1).p > 0.01);
  CHECK(permutation_test_mean(a, c, 2000, 1).p < 0.01);
  // same seed, same answer
  CHECK(permutation_test_mean(a, c, 500, 9).p == permutation_test_mean(a, c, 500, 9).p);
}

TEST_CASE("streams") {
  RngStream s{5, 1};
  Engine a = s.child(3).engine(), b = s.child(3).engine(), c = s.child(4).engine();
  CHECK(a() == b());
  CHECK(s.child(3).stream != s.child(4).stream);
  (void)c;
  std::vector<int> hit(100, 0);
  parallel_for(100, [&](std::size_t i) { hit[i] += 1; }, 4);
  for (int h : hit) CHECK(h == 1);
  CHECK_THROWS(parallel_for(10, [](std::size_t i) { if (i == 7) throw std::runtime_error("x"); }, 2));
}
