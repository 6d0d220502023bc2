#include "ipevo/quad.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

namespace ipevo {

namespace bq = boost::math::quadrature;

double gk(const Fn& f, double l, double r, double tol, int max_depth) {
  if (l == r) return 0.0;
  double err = 0;
  return bq::gauss_kronrod<double, 31>::integrate(f, l, r, max_depth, tol, &err);
}

double gl20(const Fn& f, double l, double r) {
  if (l == r) return 0.0;
  return bq::gauss<double, 20>::integrate(f, l, r);
}

double tail_estimate(const std::vector<double>& p, double sum, bool keep_small) {
  const size_t n = p.size();
  if (n == 0) return 0.0;
  double last = p.back();
  if (!std::isfinite(last) || !std::isfinite(sum)) return kInf;
  if (last == 0.0 || (!keep_small && std::abs(last) <= 1e-16 * std::abs(sum) + 1e-300)) return 0.0;
  // average ratio over the last few levels
  int used = 0;
  double lr = 0;
  for (size_t i = n - 1; i >= 1 && used < 4; --i) {
    if (p[i - 1] == 0.0 || p[i] == 0.0) break;
    double r = p[i] / p[i - 1];
    if (r <= 0) break;
    lr += std::log(r);
    ++used;
  }
  if (used == 0) return std::abs(last) < 1e-12 * std::abs(sum) ? 0.0 : kInf;
  double r = std::exp(lr / used);
  if (r >= 0.999) return kInf;
  return last * r / (1.0 - r);
}

namespace {

// one side: pieces from anchor q toward end e (finite) or outward to inf
Integral side(const Fn& f, double q, double e, const QuadOpts& o) {
  Integral out;
  std::vector<double> pieces;
  double sum = 0;
  double s16 = 0, s32 = 0;
  int small_run = 0;
  const bool outward = std::isinf(e);
  for (int k = 0; k < o.max_pieces; ++k) {
    double a, b;
    if (outward) {
      a = q * std::ldexp(1.0, k);
      b = 2 * a;
    } else {
      double h0 = (q - e) * std::ldexp(1.0, -k);
      // nodes would round onto e itself; the tail estimate covers the rest
      if (std::abs(h0) <= 64 * std::numeric_limits<double>::epsilon() * std::abs(e)) break;
      double h1 = h0 / 2;
      a = e + h1;
      b = e + h0;
      if (a == b) break;
    }
    double p = gk(f, std::min(a, b), std::max(a, b), o.rel_tol, o.max_depth);
    pieces.push_back(p);
    sum += p;
    ++out.pieces;
    if (!std::isfinite(sum) || std::abs(sum) > o.blowup) {
      out.finite = false;
      out.value = kInf;
      return out;
    }
    if (k == 15) s16 = sum;
    if (k == 31) s32 = sum;
    if (k >= 6 && std::abs(p) <= 1e-17 * std::abs(sum) + 1e-300) {
      if (++small_run >= 2) {
        out.value = sum;
        return out;
      }
    } else {
      small_run = 0;
    }
  }
  if (s16 > 0 && s32 >= 1.9 * s16 && sum >= 1.9 * s32) {
    out.finite = false;
    out.value = kInf;
    return out;
  }
  double t = tail_estimate(pieces, sum);
  if (!std::isfinite(t)) {
    out.finite = false;
    out.value = kInf;
    return out;
  }
  out.value = sum + t;
  return out;
}

}  // namespace

Integral integrate(const Fn& f, double l, double r, const QuadOpts& o) {
  Integral res;
  if (!(l < r)) {
    if (l == r) return res;
    throw std::invalid_argument("integrate: l > r");
  }
  double q;
  if (std::isinf(r)) {
    q = l > 0 ? 2 * l : 1.0;
  } else {
    q = 0.5 * (l + r);
  }
  Integral left = side(f, q, l, o);
  Integral right = side(f, q, r, o);
  res.pieces = left.pieces + right.pieces;
  if (!left.finite || !right.finite) {
    res.finite = false;
    res.value = kInf;
    return res;
  }
  res.value = left.value + right.value;
  return res;
}

Cumulative::Cumulative(Fn f, double lo, double anchor, double hi, int depth, int sub)
    : f_(std::move(f)), lo_(lo), anchor_(anchor), hi_(hi) {
  if (!(lo < anchor && anchor < hi)) throw std::invalid_argument("Cumulative: need lo < anchor < hi");
  // below the anchor, walking down toward lo
  std::vector<double> dn{anchor}, dv;  // nodes decreasing, cell values
  std::vector<double> dpieces;
  double dsum = 0;
  bool dfin = true;
  for (int k = 0; k < depth; ++k) {
    double top = lo + (anchor - lo) * std::ldexp(1.0, -k);
    double bot = lo + (anchor - lo) * std::ldexp(1.0, -k - 1);
    if (bot == top || bot <= lo) break;
    double piece = 0;
    double h = (top - bot) / sub;
    for (int j = 0; j < sub; ++j) {
      double b1 = top - j * h, b0 = (j == sub - 1) ? bot : top - (j + 1) * h;
      double v = gl20(f_, b0, b1);
      piece += v;
      dn.push_back(b0);
      dv.push_back(v);
    }
    dpieces.push_back(piece);
    dsum += piece;
    if (!std::isfinite(dsum)) {
      dfin = false;
      break;
    }
  }
  double dtail = dfin ? tail_estimate(dpieces, dsum, true) : kInf;
  below_ = std::isfinite(dtail) ? dsum + dtail : kInf;

  std::vector<double> un{anchor}, uv;
  std::vector<double> upieces;
  double usum = 0;
  bool ufin = true;
  for (int k = 0; k < depth; ++k) {
    double a, b;
    if (std::isinf(hi)) {
      a = anchor * std::ldexp(1.0, k);
      b = 2 * a;
    } else {
      a = hi - (hi - anchor) * std::ldexp(1.0, -k);
      b = hi - (hi - anchor) * std::ldexp(1.0, -k - 1);
      if (a == b || b >= hi) break;
    }
    double piece = 0;
    double h = (b - a) / sub;
    for (int j = 0; j < sub; ++j) {
      double a1 = a + j * h, b1 = (j == sub - 1) ? b : a + (j + 1) * h;
      double v = gl20(f_, a1, b1);
      piece += v;
      un.push_back(b1);
      uv.push_back(v);
    }
    upieces.push_back(piece);
    usum += piece;
    if (!std::isfinite(usum)) {
      ufin = false;
      break;
    }
  }
  double utail = ufin ? tail_estimate(upieces, usum, true) : kInf;
  above_ = std::isfinite(utail) ? usum + utail : kInf;

  // assemble increasing node list with cell values between consecutive nodes
  nodes_.assign(dn.rbegin(), dn.rend());
  std::vector<double> cells(dv.rbegin(), dv.rend());
  ia_ = nodes_.size() - 1;
  nodes_.insert(nodes_.end(), un.begin() + 1, un.end());
  cells.insert(cells.end(), uv.begin(), uv.end());
  const size_t n = nodes_.size();
  lo_cum_.assign(n, 0.0);
  hi_cum_.assign(n, 0.0);
  lo_cum_[0] = std::isfinite(dtail) ? dtail : kInf;
  for (size_t i = 1; i < n; ++i) lo_cum_[i] = lo_cum_[i - 1] + cells[i - 1];
  hi_cum_[n - 1] = std::isfinite(utail) ? utail : kInf;
  for (size_t i = n - 1; i-- > 0;) hi_cum_[i] = hi_cum_[i + 1] + cells[i];
  anc_.assign(n, 0.0);
  for (size_t i = ia_ + 1; i < n; ++i) anc_[i] = anc_[i - 1] + cells[i - 1];
  for (size_t i = ia_; i-- > 0;) anc_[i] = anc_[i + 1] - cells[i];
}

double Cumulative::partial(double a, double b) const {
  if (a == b) return 0.0;
  return bq::gauss<double, 7>::integrate(f_, a, b);
}

size_t Cumulative::cell(double x) const {
  auto it = std::upper_bound(nodes_.begin(), nodes_.end(), x);
  size_t j = static_cast<size_t>(it - nodes_.begin());
  return j == 0 ? 0 : std::min(j - 1, nodes_.size() - 2);
}

double Cumulative::from_lo(double x) const {
  if (x <= lo_) return 0.0;
  if (x >= hi_) return std::isfinite(below_) && std::isfinite(above_) ? below_ + above_ : kInf;
  if (x < nodes_.front()) return lo_cum_[0] - gk(f_, x, nodes_.front(), 1e-10, 4);
  if (x > nodes_.back()) return lo_cum_.back() + gk(f_, nodes_.back(), x, 1e-10, 4);
  size_t j = cell(x);
  double a = nodes_[j], b = nodes_[j + 1];
  if (x - a <= b - x) return lo_cum_[j] + partial(a, x);
  return lo_cum_[j + 1] - partial(x, b);
}

double Cumulative::to_hi(double x) const {
  if (x >= hi_) return 0.0;
  if (x <= lo_) return std::isfinite(below_) && std::isfinite(above_) ? below_ + above_ : kInf;
  if (x < nodes_.front()) return hi_cum_[0] + gk(f_, x, nodes_.front(), 1e-10, 4);
  if (x > nodes_.back()) return hi_cum_.back() - gk(f_, nodes_.back(), x, 1e-10, 4);
  size_t j = cell(x);
  double a = nodes_[j], b = nodes_[j + 1];
  if (x - a <= b - x) return hi_cum_[j] - partial(a, x);
  return hi_cum_[j + 1] + partial(x, b);
}

double Cumulative::operator()(double x) const {
  if (x == anchor_) return 0.0;
  if (x <= lo_) return -below_;
  if (x >= hi_) return above_;
  if (x < nodes_.front()) return anc_.front() - gk(f_, x, nodes_.front(), 1e-10, 4);
  if (x > nodes_.back()) return anc_.back() + gk(f_, nodes_.back(), x, 1e-10, 4);
  size_t j = cell(x);
  double a = nodes_[j], b = nodes_[j + 1];
  // stay on the anchor's side of the cell so the sum never crosses it twice
  if (b <= anchor_ || (a < anchor_ && x - a > b - x)) return anc_[j + 1] - partial(x, b);
  return anc_[j] + partial(a, x);
}

}  // namespace ipevo
