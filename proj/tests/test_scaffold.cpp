#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <memory>

#include "ipevo/models.hpp"
#include "ipevo/scaffold.hpp"
#include "ipevo/stats.hpp"

using namespace ipevo;

namespace {

// tent of height h: up at slope 1, down at slope 1
std::shared_ptr<Spindle> tent(double h) {
  auto f = std::make_shared<Spindle>();
  f->path.values = {0.0};
  f->path.push(h, h);
  f->path.push(0.0, h);
  f->path.lifetime = 2 * h;
  f->path.absorbed = true;
  f->zeta = 2 * h;
  f->amplitude = h;
  f->grid_max = h;
  f->argmax_time = h;
  return f;
}

SpindleMeasure hand_instance() {
  SpindleMeasure N;
  N.drift = -1;
  N.end_time = 2;
  Atom a;
  a.t = 0;
  a.pre = 0;
  a.zeta = 3;
  a.f = tent(1.5);
  Atom b;
  b.t = 1;
  b.pre = 2;
  b.zeta = 2;
  b.f = tent(1.0);
  N.atoms = {a, b};
  return N;
}

}  // namespace

TEST_CASE("hand-built skewer") {
  SpindleMeasure N = hand_instance();
  IntervalPartition p = skewer(2.5, N, TransformSpec::identity());
  REQUIRE(p.size() == 2);
  CHECK(p[0] == doctest::Approx(0.5));
  CHECK(p[1] == doctest::Approx(0.5));
  // only the first spindle reaches y = 1
  IntervalPartition q = skewer(1.0, N, TransformSpec::identity());
  REQUIRE(q.size() == 1);
  CHECK(q[0] == doctest::Approx(1.0));
  CHECK(skewer(5.0, N, TransformSpec::identity()).empty());
  // g is applied to the spindle value
  CHECK(skewer(2.5, N, TransformSpec::linear(2.0)).total() == doctest::Approx(2.0));

  ScaffoldPath X(N);
  CHECK(X.X(0.0) == 3.0);
  CHECK(X.X(0.5) == doctest::Approx(2.5));
  CHECK(X.X_minus(1.0) == doctest::Approx(2.0));
  CHECK(X.X(1.0) == doctest::Approx(4.0));
  CHECK(X.X(2.0) == doctest::Approx(3.0));
}

TEST_CASE("missing path is an error") {
  SpindleMeasure N = hand_instance();
  N.atoms[1].f.reset();
  CHECK_THROWS(skewer(2.5, N, TransformSpec::identity()));
  CHECK_NOTHROW(skewer(1.0, N, TransformSpec::identity()));
}

TEST_CASE("local time of pure drift") {
  SpindleMeasure N;
  N.drift = -2;
  N.x0 = 4;
  N.end_time = 2;
  ScaffoldPath X(N);
  CHECK(X.X(1.0) == doctest::Approx(2.0));
  CHECK(local_time_estimate(X, 2.0, 2.0, 0.1) == doctest::Approx(0.5));
  CHECK(local_time_estimate(X, 2.0, 0.5, 0.1) == 0.0);
}

TEST_CASE("atom count is Poisson with rate T nu") {
  Model m = besq(0.5);
  ExcursionLaw law{m.Y};
  law.cutoff = 0.2;
  PrmOptions o;
  o.drift = 0.0;
  const double T = 50;
  SpindleMeasure N = build_prm(law, Horizon::time(T), RngStream{41, 0}, o);
  double mu = T * law.rate();
  CHECK(std::abs(static_cast<double>(N.atoms.size()) - mu) < 4 * std::sqrt(mu));
  for (std::size_t i = 1; i < N.atoms.size(); ++i) CHECK(N.atoms[i].t >= N.atoms[i - 1].t);
  for (const auto& a : N.atoms) CHECK(a.amplitude > 0.2);
  // deterministic
  SpindleMeasure N2 = build_prm(law, Horizon::time(T), RngStream{41, 0}, o);
  REQUIRE(N2.atoms.size() == N.atoms.size());
  for (std::size_t i = 0; i < N.atoms.size(); ++i) CHECK(N2.atoms[i].zeta == N.atoms[i].zeta);

  SpindleMeasure E = build_prm(law, Horizon::time(0.0), RngStream{41, 0}, o);
  CHECK(E.atoms.empty());
}

TEST_CASE("scaffold with no atoms is the drift line") {
  SpindleMeasure N;
  N.x0 = 1;
  N.drift = -0.5;
  N.end_time = 2;
  ScaffoldPath X(N);
  for (double t : {0.0, 0.3, 1.7}) CHECK(X.X(t) == doctest::Approx(1 - 0.5 * t));
}

TEST_CASE("diversity") {
  Model m = besq(0.5);
  CHECK(diversity(IntervalPartition{}, m.Y, m.g, {0.1, 0.01}).estimate == 0);
  // M((x, inf)) = x^-0.5: n blocks above x with n = 2 x^-0.5 gives ratio 2
  std::vector<double> w;
  for (int k = 1; k <= 20000; ++k) w.push_back(1.0 / (static_cast<double>(k) * k));
  IntervalPartition b(w);
  auto d = diversity(b, m.Y, m.g, {1e-4, 1e-5, 1e-6});
  CHECK(d.applicable);
  CHECK(d.estimate == doctest::Approx(1.0).epsilon(0.02));
  // doubling every width scales the count at threshold x like count at x/2
  std::vector<double> w2 = w;
  for (auto& x : w2) x *= 4;
  auto d2 = diversity(IntervalPartition(w2), m.Y, m.g, {1e-4, 1e-5, 1e-6});
  CHECK(d2.estimate == doctest::Approx(2 * d.estimate).epsilon(0.02));
  CHECK_FALSE(diversity(b, wright_fisher(1.0, 0.25).Y, TransformSpec::identity(), {0.1}).applicable);
}

TEST_CASE("start from a partition: level 0 is the partition") {
  Model m = besq(0.5);
  ExcursionLaw law{m.Y};
  law.g = m.g;
  law.cutoff = 0.05;
  law.dt = 1e-3;
  law.dt_rel = 0.01;
  IntervalPartition beta({0.3, 0.2, 0.1});
  StartOptions o;
  SpindleMeasure N = start_from_partition(beta, law, RngStream{42, 0}, o);
  IntervalPartition p0 = skewer(0.0, N, m.g);
  REQUIRE(p0.size() == 3);
  for (std::size_t i = 0; i < 3; ++i) CHECK(p0[i] == doctest::Approx(beta[i]));
  CHECK(N.end_time > 0);
  ScaffoldPath X(N);
  CHECK(X.X(N.end_time) == doctest::Approx(0.0).epsilon(1e-9));
}

TEST_CASE("clade reversal is an involution") {
  Model m = besq(0.5);
  ExcursionLaw law{m.Y};
  law.g = m.g;
  law.cutoff = 0.1;
  law.dt = 1e-3;
  PrmOptions o;
  o.store_all = true;
  o.x0 = 0.5;
  SpindleMeasure N = build_prm(law, Horizon::hit(0.0), RngStream{43, 0}, o);
  SpindleMeasure R = reverse_clade(reverse_clade(N));
  REQUIRE(R.atoms.size() == N.atoms.size());
  for (std::size_t i = 0; i < N.atoms.size(); ++i) {
    CHECK(R.atoms[i].t == doctest::Approx(N.atoms[i].t));
    CHECK(R.atoms[i].zeta == N.atoms[i].zeta);
    CHECK(R.atoms[i].f->path.values == N.atoms[i].f->path.values);
  }
}
