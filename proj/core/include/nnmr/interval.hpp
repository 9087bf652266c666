#pragma once

#include <Eigen/Dense>

#include <iosfwd>
#include <vector>

namespace nnmr {

// Closed scalar interval [lo, hi]. Arithmetic is plain double arithmetic
// (round-to-nearest); widths handled by this toolkit sit far above ulp scale.
struct Interval {
  double lo = 0.0;
  double hi = 0.0;

  Interval() = default;
  Interval(double v) : lo(v), hi(v) {}  // point interval, intentionally implicit
  Interval(double lower, double upper);

  double width() const { return hi - lo; }
  double mid() const { return 0.5 * (lo + hi); }
  double rad() const { return 0.5 * (hi - lo); }
  double mag() const;  // max |x| over the interval

  bool contains(double v) const { return lo <= v && v <= hi; }
  bool contains(const Interval& other) const {
    return lo <= other.lo && other.hi <= hi;
  }
};

Interval operator+(const Interval& a, const Interval& b);
Interval operator-(const Interval& a, const Interval& b);
Interval operator-(const Interval& a);
Interval operator*(const Interval& a, const Interval& b);

Interval hull(const Interval& a, const Interval& b);

// Exact interval square: [min(a^2,b^2) or 0 if straddling, max(a^2,b^2)].
// Tighter than a*a, which treats the two factors as independent.
Interval square(const Interval& x);
inline double square(double x) { return x * x; }

// Axis-aligned box: componentwise lower/upper bounds. The constructor rejects
// inverted or non-finite bounds.
struct IntervalBox {
  Eigen::VectorXd lower;
  Eigen::VectorXd upper;

  IntervalBox() = default;
  IntervalBox(Eigen::VectorXd lo, Eigen::VectorXd hi);

  static IntervalBox point(const Eigen::VectorXd& v);
  static IntervalBox from_intervals(const std::vector<Interval>& comps);

  Eigen::Index dim() const { return lower.size(); }
  Interval component(Eigen::Index i) const { return {lower[i], upper[i]}; }
  std::vector<Interval> to_intervals() const;

  Eigen::VectorXd center() const { return 0.5 * (lower + upper); }
  Eigen::VectorXd widths() const { return upper - lower; }
  double max_width() const;

  bool contains(const Eigen::VectorXd& x) const;
  bool contains(const IntervalBox& inner) const;
};

IntervalBox hull(const IntervalBox& a, const IntervalBox& b);

// Componentwise padding by a nonnegative radius (Minkowski sum with the
// inf-norm ball of that radius).
IntervalBox pad(const IntervalBox& box, double radius);

// Finite union of same-dimension boxes.
struct BoxUnion {
  std::vector<IntervalBox> boxes;

  BoxUnion() = default;
  explicit BoxUnion(std::vector<IntervalBox> bs) : boxes(std::move(bs)) {}

  bool empty() const { return boxes.empty(); }
  std::size_t size() const { return boxes.size(); }
  Eigen::Index dim() const { return boxes.empty() ? 0 : boxes.front().dim(); }
};

// One row per box: cell index, lower..., upper...
void write_csv(const BoxUnion& u, std::ostream& out);

// Shortest round-trip decimal form of a double (also used by the CSV writers).
std::string format_double(double v);

}  // namespace nnmr
