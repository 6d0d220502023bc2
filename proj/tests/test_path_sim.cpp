#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "ipevo/models.hpp"
#include "ipevo/path_sim.hpp"
#include "ipevo/stats.hpp"

using namespace ipevo;

TEST_CASE("zero-diffusion paths") {
  Model m = besq(0.5);
  Engine e = make_engine(1, 1);
  PathGrid p = sample_zero_diffusion(m.Y, 1.0, 1e-3, e);
  CHECK(p.absorbed);
  CHECK(p.values.front() == 1.0);
  CHECK(p.values.back() == 0.0);
  CHECK(p.lifetime == doctest::Approx(static_cast<double>(p.size() - 1) * 1e-3));
  for (std::size_t i = 0; i + 1 < p.size(); ++i) CHECK(p.values[i] > 0);
  // start at 0: absorbed at once
  PathGrid z = sample_zero_diffusion(m.Y, 0.0, 1e-3, e);
  CHECK(z.absorbed);
  CHECK(z.lifetime == 0);
}

TEST_CASE("determinism and storage independence") {
  Model m = besq(0.5);
  Engine a = make_engine(7, 3), b = make_engine(7, 3);
  PathGrid full = sample_zero_diffusion(m.Y, 0.5, 1e-3, a);
  SimOpts o;
  o.store = false;
  PathGrid light = sample_zero_diffusion(m.Y, 0.5, 1e-3, b, o);
  CHECK(full.lifetime == light.lifetime);
  CHECK(light.size() == 2);
  Engine c = make_engine(7, 3);
  CHECK(sample_zero_diffusion(m.Y, 0.5, 1e-3, c).values == full.values);
}

TEST_CASE("step cap sets the truncated flag") {
  Model m = besq(0.5);
  Engine e = make_engine(2, 2);
  SimOpts o;
  o.max_steps = 10;
  PathGrid p = sample_zero_diffusion(m.Y, 5.0, 1e-4, e, o);
  CHECK(p.truncated);
  CHECK_FALSE(p.absorbed);
}

TEST_CASE("up-diffusion reaches w exactly") {
  Model m = besq(0.5);
  Engine e = make_engine(3, 1);
  for (int k = 0; k < 20; ++k) {
    PathGrid p = sample_up_diffusion(m.Y, 0.0, 1.0, 1e-3, e);
    CHECK(p.values.back() == 1.0);
    CHECK(p.lifetime > 0);
  }
  CHECK(sample_up_diffusion(m.Y, 1.0, 1.0, 1e-3, e).lifetime == 0);
  CHECK(up_entrance(m.Y, 1.0) == 0.0);
}

TEST_CASE("reversal, concatenation and splitting") {
  Model m = besq(0.5);
  Engine e = make_engine(4, 1);
  PathGrid p = sample_zero_diffusion(m.Y, 1.0, 1e-3, e);
  PathGrid rr = reverse_path(reverse_path(p));
  CHECK(rr.values == p.values);
  CHECK(rr.runs == p.runs);
  CHECK_THROWS(reverse_path(sample_up_diffusion(m.Y, 0.0, 1.0, 1e-3, e)));

  PathGrid up = sample_up_diffusion(m.Y, 0.0, 1.0, 1e-3, e);
  PathGrid down = sample_zero_diffusion(m.Y, 1.0, 1e-3, e);
  PathGrid f = concat(up, down);
  CHECK(f.size() == up.size() + down.size() - 1);
  CHECK(f.lifetime == doctest::Approx(up.lifetime + down.lifetime));
  CHECK(f.at(up.lifetime) == doctest::Approx(1.0));

  double u = 0.37 * p.lifetime;
  auto [lo, hi] = split_path(p, u);
  CHECK(lo.lifetime == doctest::Approx(u));
  CHECK(lo.values.back() == hi.values.front());
  CHECK(lo.values.back() == doctest::Approx(p.at(u)));
  CHECK(hi.at(0.1 * hi.lifetime) == doctest::Approx(p.at(u + 0.1 * hi.lifetime)).epsilon(1e-9));
}

TEST_CASE("interpolation") {
  PathGrid p;
  p.values = {0.0};
  p.push(1.0, 0.5);
  p.push(0.0, 0.5);
  p.lifetime = 1.0;
  p.absorbed = true;
  CHECK(p.at(0.25) == doctest::Approx(0.5));
  CHECK(p.at(0.75) == doctest::Approx(0.5));
  CHECK(p.at(2.0) == 0.0);
  CHECK(p.argmax() == 1);
}

TEST_CASE("coupled runs share noise") {
  Model m = besq(0.5);
  Engine e = make_engine(5, 1);
  auto runs = sample_coupled({m.Y, m.Y}, 1.0, 1e-3, e);
  REQUIRE(runs.size() == 2);
  CHECK(runs[0].values == runs[1].values);
}

TEST_CASE("hitting probability, small sample") {
  Model m = besq(0.5);
  const int n = 3000;
  int hits = 0;
  for (int i = 0; i < n; ++i) {
    Engine e = make_engine(11, static_cast<std::uint64_t>(i));
    SimOpts o;
    o.stop_above = 4.0;
    o.store = false;
    PathGrid p = sample_zero_diffusion(m.Y, 1.0, 1e-3, e, o);
    hits += !p.absorbed;
  }
  auto ci = binomial_ci(static_cast<std::size_t>(hits), n, 4.0);
  CHECK(ci.lo <= 0.125);
  CHECK(0.125 <= ci.hi);
}

TEST_CASE("argument checks") {
  Model m = besq(0.5);
  Engine e = make_engine(1, 1);
  CHECK_THROWS_AS(sample_zero_diffusion(m.Y, 1.0, 0.0, e), std::invalid_argument);
  CHECK_THROWS_AS(sample_zero_diffusion(m.Y, -1.0, 1e-3, e), std::invalid_argument);
  CHECK_THROWS_AS(sample_up_diffusion(m.Y, 2.0, 1.0, 1e-3, e), std::invalid_argument);
}
