#include "ipevo/partition.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <stdexcept>

namespace ipevo {

IntervalPartition::IntervalPartition(std::vector<double> widths) : w_(std::move(widths)) {
  for (double v : w_)
    if (!(v > 0) || !std::isfinite(v)) throw std::invalid_argument("interval partition widths must be positive");
  total_ = std::accumulate(w_.begin(), w_.end(), 0.0);
}

std::vector<std::pair<double, double>> IntervalPartition::intervals() const {
  std::vector<std::pair<double, double>> out;
  double l = 0;
  for (double v : w_) {
    out.emplace_back(l, l + v);
    l += v;
  }
  return out;
}

double distortion(const IntervalPartition& b, const IntervalPartition& g, const Correspondence& c) {
  double s = 0, su = 0, sv = 0;
  for (std::size_t k = 0; k < c.pairs.size(); ++k) {
    auto [i, j] = c.pairs[k];
    if (i >= b.size() || j >= g.size()) throw std::out_of_range("correspondence index out of range");
    if (k > 0 && (i <= c.pairs[k - 1].first || j <= c.pairs[k - 1].second))
      throw std::invalid_argument("correspondence is not strictly increasing");
    s += std::abs(b[i] - g[j]);
    su += b[i];
    sv += g[j];
  }
  return std::max(s + b.total() - su, s + g.total() - sv);
}

namespace {

// frontier point: x = sum|u-v| - sum u, y = sum|u-v| - sum v (both minimized)
struct Pt {
  double x, y;
};

void prune(std::vector<Pt>& c) {
  std::sort(c.begin(), c.end(), [](const Pt& a, const Pt& b) { return a.x < b.x || (a.x == b.x && a.y < b.y); });
  std::vector<Pt> out;
  double ymin = kInf;
  for (const auto& p : c) {
    if (p.y < ymin) {
      out.push_back(p);
      ymin = p.y;
    }
  }
  c.swap(out);
}

}  // namespace

DprimeResult dprime_full(const IntervalPartition& b, const IntervalPartition& g, std::size_t cap) {
  const std::size_t n = b.size(), m = g.size();
  DprimeResult res;
  std::vector<std::vector<Pt>> prev(m + 1), cur(m + 1);
  for (std::size_t j = 0; j <= m; ++j) prev[j] = {{0.0, 0.0}};
  for (std::size_t i = 1; i <= n; ++i) {
    cur[0] = {{0.0, 0.0}};
    for (std::size_t j = 1; j <= m; ++j) {
      std::vector<Pt> c = prev[j];
      c.insert(c.end(), cur[j - 1].begin(), cur[j - 1].end());
      const double u = b[i - 1], v = g[j - 1], d = std::abs(u - v);
      for (const auto& p : prev[j - 1]) c.push_back({p.x + d - u, p.y + d - v});
      prune(c);
      if (c.size() > cap) {
        std::vector<Pt> thin;
        for (std::size_t k = 0; k < cap; ++k) thin.push_back(c[k * (c.size() - 1) / (cap - 1)]);
        c.swap(thin);
        res.exact = false;
      }
      res.max_frontier = std::max(res.max_frontier, c.size());
      cur[j] = std::move(c);
    }
    std::swap(prev, cur);
  }
  const auto& fin = prev[m];
  double best = kInf, minx = kInf, miny = kInf;
  for (const auto& p : fin) {
    best = std::min(best, std::max(p.x + b.total(), p.y + g.total()));
    minx = std::min(minx, p.x);
    miny = std::min(miny, p.y);
  }
  res.value = best;
  res.lower = res.exact ? best : std::max(minx + b.total(), miny + g.total());
  return res;
}

double dprime(const IntervalPartition& b, const IntervalPartition& g) {
  // evaluate with the arguments in a canonical order so symmetry is exact
  if (std::lexicographical_compare(g.widths().begin(), g.widths().end(), b.widths().begin(), b.widths().end()))
    return dprime_full(g, b).value;
  return dprime_full(b, g).value;
}

double dprime_bruteforce(const IntervalPartition& b, const IntervalPartition& g) {
  if (b.size() > 12 || g.size() > 12) throw std::invalid_argument("brute force limited to 12 blocks");
  Correspondence c;
  double best = kInf;
  std::function<void(std::size_t, std::size_t)> rec = [&](std::size_t i0, std::size_t j0) {
    best = std::min(best, distortion(b, g, c));
    for (std::size_t i = i0; i < b.size(); ++i)
      for (std::size_t j = j0; j < g.size(); ++j) {
        c.pairs.emplace_back(i, j);
        rec(i + 1, j + 1);
        c.pairs.pop_back();
      }
  };
  rec(0, 0);
  return best;
}

TruncatedDistance dprime_truncated(const IntervalPartition& b, const IntervalPartition& g, double eps) {
  auto keep = [eps](const IntervalPartition& p, double& dropped) {
    std::vector<double> w;
    dropped = 0;
    for (double v : p.widths()) {
      if (v >= eps) w.push_back(v);
      else dropped += v;
    }
    return IntervalPartition(std::move(w));
  };
  double db = 0, dg = 0;
  IntervalPartition kb = keep(b, db), kg = keep(g, dg);
  // d'(beta, beta_kept) = dropped mass; triangle inequality on both sides
  return {dprime(kb, kg), db + dg, kb.size(), kg.size()};
}

IntervalPartition concatenate(const std::vector<IntervalPartition>& parts) {
  std::vector<double> w;
  for (const auto& p : parts) w.insert(w.end(), p.widths().begin(), p.widths().end());
  return IntervalPartition(std::move(w));
}

IntervalPartition g_star(const IntervalPartition& b, const TransformSpec& t) {
  std::vector<double> w;
  w.reserve(b.size());
  double s = 0;
  for (double v : b.widths()) {
    double gv = t(v);
    w.push_back(gv);
    s += gv;
  }
  if (!std::isfinite(s)) return {};
  return IntervalPartition(std::move(w));
}

GroupSum group_sum(const std::vector<WidthGroup>& groups, const Fn& f, double blowup) {
  GroupSum out;
  std::vector<double> terms;
  for (const auto& gr : groups) {
    double t = gr.count * f(gr.width);
    terms.push_back(t);
    out.total += t;
    if (!std::isfinite(out.total) || out.total > blowup) {
      out.divergent = true;
      return out;
    }
  }
  const std::size_t n = terms.size();
  if (n >= 3 && terms[n - 1] >= terms[n - 2] && terms[n - 2] >= terms[n - 3] && terms[n - 1] > 0)
    out.divergent = true;
  return out;
}

GroupSum g_star_groups(const std::vector<WidthGroup>& groups, const TransformSpec& t) { return group_sum(groups, t.g); }

std::vector<WidthGroup> g_counterexample_partition() {
  // widths 2^{1 - 2^{n+1}} where g/x = 2^{n-1}; multiplicities so that width * count = 1/n^2
  std::vector<WidthGroup> out;
  for (int n = 3; n <= 8; ++n) {
    double w = std::ldexp(1.0, 1 - (1 << (n + 1)));
    out.push_back({w, 1.0 / (static_cast<double>(n) * n * w)});
  }
  return out;
}

}  // namespace ipevo
