#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "ipevo/excursions.hpp"
#include "ipevo/models.hpp"
#include "ipevo/stats.hpp"

using namespace ipevo;

TEST_CASE("amplitude rate and tail") {
  Model m = besq(0.5);
  // 1/s(a) with s(a) = a^1.5 / 1.5
  CHECK(amplitude_rate(m.Y, 0.25) == doctest::Approx(1.5 / std::pow(0.25, 1.5)));
  CHECK(amplitude_tail(m.Y, 0.25, 1.0) == doctest::Approx(std::pow(0.25, 1.5)));
  ExcursionLaw law{m.Y};
  law.cutoff = 0.1;
  law.cap = 10;
  CHECK(law.rate() == doctest::Approx(amplitude_rate(m.Y, 0.1) - amplitude_rate(m.Y, 10)));
}

TEST_CASE("amplitude sampler matches the exact law") {
  Model m = besq(0.5);
  ExcursionLaw law{m.Y};
  law.cutoff = 0.1;
  Engine e = make_engine(21, 0);
  std::vector<double> w(4000);
  for (auto& x : w) x = sample_amplitude(law, e);
  auto ks = ks_one_sample(w, [](double x) { return x <= 0.1 ? 0.0 : 1 - std::pow(0.1 / x, 1.5); });
  CHECK(ks.p > 0.001);
  for (double x : w) CHECK(x > 0.1);
}

TEST_CASE("capped amplitudes stay below the cap") {
  Model m = besq(0.5);
  ExcursionLaw law{m.Y};
  law.cutoff = 0.5;
  law.cap = 2.0;
  Engine e = make_engine(22, 0);
  for (int i = 0; i < 500; ++i) {
    double x = sample_amplitude(law, e);
    CHECK(x > 0.5);
    CHECK(x <= 2.0 + 1e-9);
  }
}

TEST_CASE("spindle shape") {
  Model m = besq(0.5);
  ExcursionLaw law{m.Y};
  law.dt = 1e-3;
  Engine e = make_engine(23, 0);
  Spindle f = sample_spindle_given(law, 1.0, e);
  CHECK(f.amplitude == 1.0);
  CHECK(f.path.values.front() == 0.0);
  CHECK(f.path.values.back() == 0.0);
  CHECK(f.eval(f.argmax_time) == doctest::Approx(1.0));
  CHECK(f.zeta == doctest::Approx(f.path.lifetime));
  CHECK(f.grid_max == doctest::Approx(1.0));
  // the Z-valued width applies g
  law.g = TransformSpec::power(2.0, 1.0);
  CHECK(law.width(f, f.argmax_time) == doctest::Approx(2.0));
}

TEST_CASE("relative step") {
  Model m = besq(0.5);
  ExcursionLaw law{m.Y};
  law.dt = 1e-3;
  law.dt_rel = 0.01;
  CHECK(law.step_for(0.01) == doctest::Approx(1e-4));
  CHECK(law.step_for(10.0) == doctest::Approx(1e-3));
}

TEST_CASE("lifetime tail by Monte Carlo") {
  Model m = besq(0.5);
  ExcursionLaw law{m.Y};
  law.dt = 1e-3;
  law.dt_rel = 0.01;
  auto est = lifetime_tail_mc(law, {0.5, 2.0}, 20000, RngStream{31, 0});
  for (const auto& t : est) {
    double truth = lifetime_tail_closed(m.Y, t.z);
    CHECK(std::abs(t.value - truth) < 4 * t.stderr_ + 0.02 * truth);
  }
}

TEST_CASE("capped truncated lifetime mass") {
  Model m = besq(0.5);
  ExcursionLaw law{m.Y};
  law.cutoff = 1.0;
  law.cap = 10.0;
  law.dt = 1e-3;
  law.dt_rel = 0.01;
  auto r = truncated_lifetime_mass_mc(law, 20000, RngStream{32, 0});
  double truth = truncated_lifetime_mass(m.Y, 1.0) - truncated_lifetime_mass(m.Y, 10.0);
  CHECK(truth == doctest::Approx(1.2308).epsilon(1e-3));
  CHECK(std::abs(r.value - truth) < 4 * r.stderr_ + 0.01 * truth);
}
