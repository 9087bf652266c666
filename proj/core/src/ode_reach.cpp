#include "nnmr/ode_reach.hpp"

#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

namespace nnmr {

namespace detail {

IntervalBox from_scalars(const std::vector<Interval>& v) {
  Eigen::VectorXd lo(static_cast<Eigen::Index>(v.size()));
  Eigen::VectorXd hi(static_cast<Eigen::Index>(v.size()));
  for (std::size_t i = 0; i < v.size(); ++i) {
    lo[static_cast<Eigen::Index>(i)] = v[i].lo;
    hi[static_cast<Eigen::Index>(i)] = v[i].hi;
  }
  return IntervalBox(std::move(lo), std::move(hi));
}

}  // namespace detail

namespace {

// x + [0, dt] * f(B): the Picard image of one substep. Contains x because
// [0, dt] * f always contains zero.
IntervalBox picard_image(const IntervalBox& x, const IntervalBox& f_of_b,
                         double dt) {
  Eigen::VectorXd lo = x.lower;
  Eigen::VectorXd hi = x.upper;
  for (Eigen::Index i = 0; i < x.dim(); ++i) {
    lo[i] += std::min(0.0, dt * f_of_b.lower[i]);
    hi[i] += std::max(0.0, dt * f_of_b.upper[i]);
  }
  return IntervalBox(std::move(lo), std::move(hi));
}

IntervalBox widen(const IntervalBox& box, double factor) {
  Eigen::VectorXd lo(box.dim()), hi(box.dim());
  for (Eigen::Index i = 0; i < box.dim(); ++i) {
    const double c = 0.5 * (box.lower[i] + box.upper[i]);
    const double r = 0.5 * (box.upper[i] - box.lower[i]);
    // Tiny absolute term so degenerate components can start growing.
    const double wr = factor * r + 1e-16 * (1.0 + std::abs(c));
    lo[i] = c - wr;
    hi[i] = c + wr;
  }
  return IntervalBox(std::move(lo), std::move(hi));
}

// A-priori enclosure for one substep: grow a candidate until the Picard image
// stays inside it. A candidate that diverges to overflow before the budget
// runs out is the same failure as exhausting the budget.
IntervalBox find_enclosure(const Dynamics& dyn, const IntervalBox& u,
                           const IntervalBox& x, double dt,
                           const StepConfig& cfg) {
  IntervalBox candidate = x;
  try {
    for (int iter = 0; iter <= cfg.max_picard_iters; ++iter) {
      const IntervalBox image =
          picard_image(x, dyn.vector_field_box(candidate, u), dt);
      if (candidate.contains(image)) return candidate;
      candidate = widen(hull(candidate, image), cfg.enclosure_inflation);
    }
  } catch (const ShapeError&) {
    throw EnclosureError("reach_ode_x: enclosure candidate diverged (dt = " +
                         format_double(dt) + "); shrink dt");
  }
  throw EnclosureError(
      "reach_ode_x: no a-priori enclosure after " +
      std::to_string(cfg.max_picard_iters) +
      " widenings (dt = " + format_double(dt) + "); shrink dt");
}

}  // namespace

ReachTube reach_ode_x(const Dynamics& dyn, const IntervalBox& u,
                      const IntervalBox& x0, double horizon,
                      const StepConfig& cfg, double t0) {
  if (x0.dim() != dyn.state_dim)
    throw ShapeError("reach_ode_x: initial box has dimension " +
                     std::to_string(x0.dim()) + ", plant expects " +
                     std::to_string(dyn.state_dim));
  if (u.dim() != dyn.input_dim)
    throw ShapeError("reach_ode_x: input box has dimension " +
                     std::to_string(u.dim()) + ", plant expects " +
                     std::to_string(dyn.input_dim));
  if (!(horizon > 0.0))
    throw PreconditionError("reach_ode_x: horizon must be positive");
  if (!(cfg.dt > 0.0))
    throw PreconditionError("reach_ode_x: dt must be positive");
  if (cfg.taylor_order != 1)
    throw PreconditionError(
        "reach_ode_x: only the order-1 validated Euler integrator is "
        "implemented");

  const auto substeps = static_cast<long long>(std::llround(horizon / cfg.dt));
  if (substeps < 1 ||
      std::abs(static_cast<double>(substeps) * cfg.dt - horizon) >
          1e-9 * std::max(1.0, horizon))
    throw PreconditionError("reach_ode_x: dt must divide the horizon into "
                            "integer substeps");
  const double dt = horizon / static_cast<double>(substeps);

  ReachTube tube;
  tube.segments.reserve(static_cast<std::size_t>(substeps));
  IntervalBox x = x0;
  for (long long k = 0; k < substeps; ++k) {
    const IntervalBox enclosure = find_enclosure(dyn, u, x, dt, cfg);
    const IntervalBox f_b = dyn.vector_field_box(enclosure, u);

    // All states during the substep lie in the Picard image; the state at the
    // end of the substep lies in the order-1 Euler image x + dt * f(B).
    const IntervalBox segment_box = picard_image(x, f_b, dt);
    Eigen::VectorXd lo = x.lower, hi = x.upper;
    for (Eigen::Index i = 0; i < x.dim(); ++i) {
      lo[i] += dt * f_b.lower[i];
      hi[i] += dt * f_b.upper[i];
    }

    TubeSegment seg;
    seg.t_begin = t0 + horizon * (static_cast<double>(k) / substeps);
    seg.t_end = k == substeps - 1
                    ? t0 + horizon
                    : t0 + horizon * (static_cast<double>(k + 1) / substeps);
    seg.box = segment_box;
    tube.segments.push_back(std::move(seg));
    x = IntervalBox(std::move(lo), std::move(hi));
  }
  tube.final_box = std::move(x);
  return tube;
}

IntervalBox reach_ode_y(const Dynamics& dyn, const IntervalBox& state_box) {
  if (state_box.dim() != dyn.state_dim)
    throw ShapeError("reach_ode_y: state box has dimension " +
                     std::to_string(state_box.dim()) + ", plant expects " +
                     std::to_string(dyn.state_dim));
  return dyn.output_map_box(state_box);
}

void write_csv(const ReachTube& tube, std::ostream& out) {
  const Eigen::Index d =
      tube.segments.empty() ? tube.final_box.dim() : tube.segments[0].box.dim();
  out << "t_begin,t_end";
  for (Eigen::Index i = 0; i < d; ++i) out << ",lo_" << i;
  for (Eigen::Index i = 0; i < d; ++i) out << ",hi_" << i;
  out << "\n";
  for (const TubeSegment& seg : tube.segments) {
    out << format_double(seg.t_begin) << ',' << format_double(seg.t_end);
    for (Eigen::Index i = 0; i < d; ++i)
      out << ',' << format_double(seg.box.lower[i]);
    for (Eigen::Index i = 0; i < d; ++i)
      out << ',' << format_double(seg.box.upper[i]);
    out << "\n";
  }
}

ReachTube read_tube_csv(std::istream& in) {
  ReachTube tube;
  std::string line;
  if (!std::getline(in, line))
    throw ParseError("tube csv: missing header line");
  std::size_t cols = 1;
  for (char ch : line)
    if (ch == ',') ++cols;
  if (cols < 4 || (cols - 2) % 2 != 0)
    throw ParseError("tube csv: malformed header");
  const auto d = static_cast<Eigen::Index>((cols - 2) / 2);

  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::istringstream ss(line);
    std::string tok;
    std::vector<double> vals;
    while (std::getline(ss, tok, ',')) {
      try {
        vals.push_back(std::stod(tok));
      } catch (const std::exception&) {
        throw ParseError("tube csv line " + std::to_string(lineno) +
                         ": bad number \"" + tok + "\"");
      }
    }
    if (static_cast<Eigen::Index>(vals.size()) != 2 + 2 * d)
      throw ParseError("tube csv line " + std::to_string(lineno) +
                       ": wrong column count");
    TubeSegment seg;
    seg.t_begin = vals[0];
    seg.t_end = vals[1];
    Eigen::VectorXd lo(d), hi(d);
    for (Eigen::Index i = 0; i < d; ++i) {
      lo[i] = vals[static_cast<std::size_t>(2 + i)];
      hi[i] = vals[static_cast<std::size_t>(2 + d + i)];
    }
    seg.box = IntervalBox(std::move(lo), std::move(hi));
    tube.segments.push_back(std::move(seg));
  }
  if (tube.segments.empty()) throw ParseError("tube csv: no segments");
  tube.final_box = tube.segments.back().box;
  return tube;
}

}  // namespace nnmr
