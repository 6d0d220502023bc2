#pragma once
#include <cstdint>
#include <functional>
#include <vector>

namespace ipevo {

struct KsResult {
  double d = 0;       // sup distance
  double p = 1;       // asymptotic p-value with Stephens' small-sample correction
  std::size_t n = 0;  // effective sample size
};

// P(K > x) for the Kolmogorov distribution
double kolmogorov_sf(double x);
KsResult ks_one_sample(std::vector<double> x, const std::function<double(double)>& cdf);
KsResult ks_two_sample(std::vector<double> a, std::vector<double> b);
// smallest D rejected at level alpha for effective size n
double ks_critical(double n, double alpha);

double mean(const std::vector<double>& x);
double variance(const std::vector<double>& x);  // unbiased
// Wasserstein-1 distance between two empirical laws
double w1_distance(std::vector<double> a, std::vector<double> b);

struct PermResult {
  double statistic = 0;  // |mean(a) - mean(b)|
  double p = 1;
  std::size_t perms = 0;
};
PermResult permutation_test_mean(const std::vector<double>& a, const std::vector<double>& b, std::size_t perms,
                                 std::uint64_t seed);

struct BinomialCi {
  double p = 0, sigma = 0, lo = 0, hi = 0;
};
// normal interval p +- z sigma
BinomialCi binomial_ci(std::size_t k, std::size_t n, double z = 3.0);

}  // namespace ipevo
