#pragma once
#include <cstddef>
#include <utility>
#include <vector>

#include "ipevo/diffusion.hpp"

namespace ipevo {

class IntervalPartition {
 public:
  IntervalPartition() = default;
  explicit IntervalPartition(std::vector<double> widths);

  const std::vector<double>& widths() const { return w_; }
  double total() const { return total_; }
  std::size_t size() const { return w_.size(); }
  bool empty() const { return w_.empty(); }
  double operator[](std::size_t i) const { return w_[i]; }
  // (left, right) endpoints in [0, total]
  std::vector<std::pair<double, double>> intervals() const;

 private:
  std::vector<double> w_;
  double total_ = 0;
};

// order-preserving index pairs (i from beta, j from gamma)
struct Correspondence {
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
};

double distortion(const IntervalPartition& b, const IntervalPartition& g, const Correspondence& c);

// infimum of distortions; Pareto-frontier dynamic program
struct DprimeResult {
  double value = 0;
  bool exact = true;     // false when the frontier cap fired (value is then an upper bound)
  double lower = 0;      // always a valid lower bound
  std::size_t max_frontier = 0;
};
DprimeResult dprime_full(const IntervalPartition& b, const IntervalPartition& g, std::size_t frontier_cap = 1 << 14);
double dprime(const IntervalPartition& b, const IntervalPartition& g);
// enumeration over every order-preserving correspondence (small inputs only)
double dprime_bruteforce(const IntervalPartition& b, const IntervalPartition& g);

// blocks narrower than eps are dropped on both sides; |true - value| <= slack
struct TruncatedDistance {
  double value = 0, slack = 0;
  std::size_t kept_b = 0, kept_g = 0;
};
TruncatedDistance dprime_truncated(const IntervalPartition& b, const IntervalPartition& g, double eps);

IntervalPartition concatenate(const std::vector<IntervalPartition>& parts);

// g applied to every width; empty when the image is not summable
IntervalPartition g_star(const IntervalPartition& b, const TransformSpec& t);

// countable partitions given as (width, multiplicity) groups, widths decreasing
struct WidthGroup {
  double width;
  double count;
};
struct GroupSum {
  double total = 0;
  bool divergent = false;
};
// partial sums of count * f(width); divergent when they pass the blowup
// level or the last three group contributions are non-decreasing
GroupSum group_sum(const std::vector<WidthGroup>& groups, const Fn& f, double blowup = 1e12);
GroupSum g_star_groups(const std::vector<WidthGroup>& groups, const TransformSpec& t);
// partition that the counterexample transform maps to an empty g*-image
std::vector<WidthGroup> g_counterexample_partition();

}  // namespace ipevo
