#include "nnmr/interval.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <ostream>
#include <string>

#include "nnmr/errors.hpp"

namespace nnmr {

Interval::Interval(double lower, double upper) : lo(lower), hi(upper) {
  if (!(lo <= hi))
    throw ShapeError("interval bounds inverted or NaN: [" +
                     format_double(lower) + ", " + format_double(upper) + "]");
}

double Interval::mag() const { return std::max(std::abs(lo), std::abs(hi)); }

Interval operator+(const Interval& a, const Interval& b) {
  return {a.lo + b.lo, a.hi + b.hi};
}

Interval operator-(const Interval& a, const Interval& b) {
  return {a.lo - b.hi, a.hi - b.lo};
}

Interval operator-(const Interval& a) { return {-a.hi, -a.lo}; }

Interval operator*(const Interval& a, const Interval& b) {
  const double p1 = a.lo * b.lo;
  const double p2 = a.lo * b.hi;
  const double p3 = a.hi * b.lo;
  const double p4 = a.hi * b.hi;
  return {std::min(std::min(p1, p2), std::min(p3, p4)),
          std::max(std::max(p1, p2), std::max(p3, p4))};
}

Interval hull(const Interval& a, const Interval& b) {
  return {std::min(a.lo, b.lo), std::max(a.hi, b.hi)};
}

Interval square(const Interval& x) {
  const double a = x.lo * x.lo;
  const double b = x.hi * x.hi;
  const double hi = std::max(a, b);
  const double lo = (x.lo <= 0.0 && x.hi >= 0.0) ? 0.0 : std::min(a, b);
  return {lo, hi};
}

IntervalBox::IntervalBox(Eigen::VectorXd lo, Eigen::VectorXd hi)
    : lower(std::move(lo)), upper(std::move(hi)) {
  if (lower.size() != upper.size())
    throw ShapeError("box bounds have different lengths");
  for (Eigen::Index i = 0; i < lower.size(); ++i) {
    if (!std::isfinite(lower[i]) || !std::isfinite(upper[i]))
      throw ShapeError("box bound not finite at component " +
                       std::to_string(i));
    if (lower[i] > upper[i])
      throw ShapeError("box bounds inverted at component " + std::to_string(i));
  }
}

IntervalBox IntervalBox::point(const Eigen::VectorXd& v) {
  return IntervalBox(v, v);
}

IntervalBox IntervalBox::from_intervals(const std::vector<Interval>& comps) {
  Eigen::VectorXd lo(static_cast<Eigen::Index>(comps.size()));
  Eigen::VectorXd hi(static_cast<Eigen::Index>(comps.size()));
  for (std::size_t i = 0; i < comps.size(); ++i) {
    lo[static_cast<Eigen::Index>(i)] = comps[i].lo;
    hi[static_cast<Eigen::Index>(i)] = comps[i].hi;
  }
  return IntervalBox(std::move(lo), std::move(hi));
}

std::vector<Interval> IntervalBox::to_intervals() const {
  std::vector<Interval> out(static_cast<std::size_t>(dim()));
  for (Eigen::Index i = 0; i < dim(); ++i)
    out[static_cast<std::size_t>(i)] = component(i);
  return out;
}

double IntervalBox::max_width() const {
  return dim() == 0 ? 0.0 : (upper - lower).maxCoeff();
}

bool IntervalBox::contains(const Eigen::VectorXd& x) const {
  if (x.size() != dim()) return false;
  for (Eigen::Index i = 0; i < dim(); ++i)
    if (x[i] < lower[i] || x[i] > upper[i]) return false;
  return true;
}

bool IntervalBox::contains(const IntervalBox& inner) const {
  if (inner.dim() != dim()) return false;
  for (Eigen::Index i = 0; i < dim(); ++i)
    if (inner.lower[i] < lower[i] || inner.upper[i] > upper[i]) return false;
  return true;
}

IntervalBox hull(const IntervalBox& a, const IntervalBox& b) {
  if (a.dim() != b.dim()) throw ShapeError("hull: dimension mismatch");
  return IntervalBox(a.lower.cwiseMin(b.lower), a.upper.cwiseMax(b.upper));
}

IntervalBox pad(const IntervalBox& box, double radius) {
  if (radius < 0.0) throw ShapeError("pad: negative radius");
  return IntervalBox(box.lower.array() - radius, box.upper.array() + radius);
}

std::string format_double(double v) {
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

void write_csv(const BoxUnion& u, std::ostream& out) {
  const Eigen::Index d = u.dim();
  out << "cell";
  for (Eigen::Index i = 0; i < d; ++i) out << ",lo_" << i;
  for (Eigen::Index i = 0; i < d; ++i) out << ",hi_" << i;
  out << "\n";
  for (std::size_t k = 0; k < u.boxes.size(); ++k) {
    out << k;
    const IntervalBox& b = u.boxes[k];
    for (Eigen::Index i = 0; i < d; ++i) out << ',' << format_double(b.lower[i]);
    for (Eigen::Index i = 0; i < d; ++i) out << ',' << format_double(b.upper[i]);
    out << "\n";
  }
}

}  // namespace nnmr
