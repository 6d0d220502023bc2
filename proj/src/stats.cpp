#include "ipevo/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "ipevo/rng.hpp"

namespace ipevo {

double kolmogorov_sf(double x) {
  if (x <= 0) return 1.0;
  if (x < 0.2) return 1.0;
  double s = 0;
  for (int k = 1; k <= 100; ++k) {
    double t = std::exp(-2.0 * k * k * x * x);
    s += (k % 2 ? 1.0 : -1.0) * t;
    if (t < 1e-17) break;
  }
  return std::clamp(2.0 * s, 0.0, 1.0);
}

namespace {
double ks_p(double d, double ne) {
  double sn = std::sqrt(ne);
  return kolmogorov_sf((sn + 0.12 + 0.11 / sn) * d);
}
}  // namespace

KsResult ks_one_sample(std::vector<double> x, const std::function<double(double)>& cdf) {
  if (x.empty()) throw std::invalid_argument("ks: empty sample");
  std::sort(x.begin(), x.end());
  const double n = static_cast<double>(x.size());
  double d = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    double f = cdf(x[i]);
    d = std::max({d, f - static_cast<double>(i) / n, static_cast<double>(i + 1) / n - f});
  }
  return {d, ks_p(d, n), x.size()};
}

KsResult ks_two_sample(std::vector<double> a, std::vector<double> b) {
  if (a.empty() || b.empty()) throw std::invalid_argument("ks: empty sample");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
  std::size_t i = 0, j = 0;
  double d = 0;
  while (i < a.size() && j < b.size()) {
    double v = std::min(a[i], b[j]);
    while (i < a.size() && a[i] == v) ++i;
    while (j < b.size() && b[j] == v) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
  }
  double ne = na * nb / (na + nb);
  return {d, ks_p(d, ne), static_cast<std::size_t>(ne)};
}

double ks_critical(double n, double alpha) {
  double lo = 0, hi = 1;
  for (int i = 0; i < 100; ++i) {
    double mid = 0.5 * (lo + hi);
    if (ks_p(mid, n) > alpha) lo = mid;
    else hi = mid;
  }
  return hi;
}

double mean(const std::vector<double>& x) {
  if (x.empty()) return 0.0;
  return std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
}

double variance(const std::vector<double>& x) {
  if (x.size() < 2) return 0.0;
  double m = mean(x), s = 0;
  for (double v : x) s += (v - m) * (v - m);
  return s / static_cast<double>(x.size() - 1);
}

double w1_distance(std::vector<double> a, std::vector<double> b) {
  if (a.empty() || b.empty()) throw std::invalid_argument("w1: empty sample");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
  std::size_t i = 0, j = 0;
  double prev = std::min(a[0], b[0]), out = 0;
  while (i < a.size() || j < b.size()) {
    double v;
    if (j >= b.size() || (i < a.size() && a[i] <= b[j])) v = a[i];
    else v = b[j];
    out += std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb) * (v - prev);
    prev = v;
    while (i < a.size() && a[i] == v) ++i;
    while (j < b.size() && b[j] == v) ++j;
  }
  return out;
}

PermResult permutation_test_mean(const std::vector<double>& a, const std::vector<double>& b, std::size_t perms,
                                 std::uint64_t seed) {
  if (a.empty() || b.empty()) throw std::invalid_argument("permutation test: empty sample");
  std::vector<double> pool(a);
  pool.insert(pool.end(), b.begin(), b.end());
  const double obs = std::abs(mean(a) - mean(b));
  const double total = std::accumulate(pool.begin(), pool.end(), 0.0);
  const double na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
  Engine eng = make_engine(seed, 0x9e77);
  std::size_t ge = 0;
  for (std::size_t k = 0; k < perms; ++k) {
    // partial Fisher-Yates: only the first |a| slots are needed
    double sa = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
      std::uniform_int_distribution<std::size_t> ud(i, pool.size() - 1);
      std::swap(pool[i], pool[ud(eng)]);
      sa += pool[i];
    }
    double stat = std::abs(sa / na - (total - sa) / nb);
    if (stat >= obs - 1e-12 * std::abs(obs)) ++ge;
  }
  return {obs, (static_cast<double>(ge) + 1.0) / (static_cast<double>(perms) + 1.0), perms};
}

BinomialCi binomial_ci(std::size_t k, std::size_t n, double z) {
  if (n == 0) throw std::invalid_argument("binomial: n = 0");
  double p = static_cast<double>(k) / static_cast<double>(n);
  double s = std::sqrt(p * (1 - p) / static_cast<double>(n));
  return {p, s, p - z * s, p + z * s};
}

}  // namespace ipevo
