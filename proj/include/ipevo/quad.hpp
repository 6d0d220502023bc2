#pragma once
#include <functional>
#include <limits>
#include <vector>

namespace ipevo {

using Fn = std::function<double(double)>;
using Fn2 = std::function<double(double, double)>;

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

struct Integral {
  double value = 0.0;
  bool finite = true;
  int pieces = 0;
};

struct QuadOpts {
  double rel_tol = 1e-10;
  int max_pieces = 64;
  double blowup = 1e12;
  // bisection depth inside one dyadic piece; the pieces already resolve endpoint behaviour
  int max_depth = 4;
};

// adaptive Gauss-Kronrod on a finite interval
double gk(const Fn& f, double l, double r, double tol = 1e-10, int max_depth = 12);

// fixed 20-point Gauss-Legendre on a finite interval
double gl20(const Fn& f, double l, double r);

// Integral of f over (l, r). Both ends may carry a power-law singularity and r
// may be +inf: the interval is cut into dyadic pieces toward each end, each
// piece done by gk(). A side is declared divergent when the partial sum blows
// past opts.blowup, when it doubles twice under eps -> eps^2 refinement, or
// when the piece ratio at the last level stays >= 0.999. Otherwise the tail
// beyond the last piece is extrapolated geometrically.
Integral integrate(const Fn& f, double l, double r, const QuadOpts& opts = {});

// Running integral on a mesh that is geometric toward lo and hi (outward
// doubling when hi = inf). Cells use gl20; a partial cell adds a 7-point
// Gauss rule. Used for scale/speed tables and nested integrals.
class Cumulative {
 public:
  Cumulative() = default;
  Cumulative(Fn f, double lo, double anchor, double hi, int depth = 64, int sub = 4);

  // signed int_anchor^x f
  double operator()(double x) const;
  // int over (lo, anchor) and (anchor, hi); +inf when divergent
  double below() const { return below_; }
  double above() const { return above_; }
  // int_lo^x f and int_x^hi f, accumulated from the near end (no cancellation)
  double from_lo(double x) const;
  double to_hi(double x) const;
  double anchor() const { return anchor_; }
  bool valid() const { return static_cast<bool>(f_); }

 private:
  double partial(double a, double b) const;
  size_t cell(double x) const;
  Fn f_;
  double lo_ = 0, anchor_ = 0, hi_ = 0;
  std::vector<double> nodes_;   // increasing
  std::vector<double> lo_cum_;  // int_lo^node (includes extrapolated tail)
  std::vector<double> hi_cum_;  // int_node^hi
  std::vector<double> anc_;     // int_anchor^node, signed
  size_t ia_ = 0;               // index of the anchor node
  double below_ = 0, above_ = 0;
};

// geometric-tail estimate used by both engines; returns +inf when the
// piece sequence does not look summable. keep_small keeps tails that are
// negligible against the sum (running tables evaluate near the far end)
double tail_estimate(const std::vector<double>& pieces, double sum, bool keep_small = false);

}  // namespace ipevo
