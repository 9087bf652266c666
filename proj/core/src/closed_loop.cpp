#include "nnmr/closed_loop.hpp"

#include <chrono>
#include <cmath>
#include <string>

#include "nnmr/errors.hpp"

namespace nnmr {

namespace {

void check_layout(const ControllerInputLayout& layout, Eigen::Index y_dim,
                  Eigen::Index r_dim) {
  for (std::size_t i = 0; i < layout.size(); ++i) {
    const TauComponent& c = layout[i];
    const Eigen::Index limit =
        c.source == TauComponent::Source::output ? y_dim : r_dim;
    if (c.index < 0 || c.index >= limit)
      throw ShapeError("controller input layout entry " + std::to_string(i) +
                       " is out of range");
  }
}

double elapsed(const std::chrono::steady_clock::time_point& from) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - from)
      .count();
}

}  // namespace

Eigen::VectorXd assemble_controller_input(const ControllerInputLayout& layout,
                                          const Eigen::VectorXd& y,
                                          const Eigen::VectorXd& r) {
  check_layout(layout, y.size(), r.size());
  Eigen::VectorXd tau(static_cast<Eigen::Index>(layout.size()));
  for (std::size_t i = 0; i < layout.size(); ++i)
    tau[static_cast<Eigen::Index>(i)] =
        layout[i].source == TauComponent::Source::output ? y[layout[i].index]
                                                         : r[layout[i].index];
  return tau;
}

IntervalBox assemble_controller_input(const ControllerInputLayout& layout,
                                      const IntervalBox& y,
                                      const IntervalBox& r) {
  check_layout(layout, y.dim(), r.dim());
  const auto n = static_cast<Eigen::Index>(layout.size());
  Eigen::VectorXd lo(n), hi(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const TauComponent& c = layout[static_cast<std::size_t>(i)];
    const IntervalBox& src =
        c.source == TauComponent::Source::output ? y : r;
    lo[i] = src.lower[c.index];
    hi[i] = src.upper[c.index];
  }
  return IntervalBox(std::move(lo), std::move(hi));
}

NncsReachResult reach_nncs(const SampledNNCS& sys, const IntervalBox& x0,
                           double horizon, const ReachNncsConfig& cfg) {
  const double period = sys.sampling_period;
  if (!(period > 0.0))
    throw PreconditionError("reach_nncs: sampling period must be positive");
  const auto intervals = static_cast<long long>(std::llround(horizon / period));
  if (intervals < 1 ||
      std::abs(static_cast<double>(intervals) * period - horizon) >
          1e-9 * std::max(1.0, horizon))
    throw PreconditionError(
        "reach_nncs: horizon must be an integer number of sampling periods");

  const bool use_reduced = sys.reduced_controller.has_value();
  const Network& ctrl =
      use_reduced ? *sys.reduced_controller : sys.controller;
  if (use_reduced && !sys.precision)
    throw PreconditionError(
        "reach_nncs: reduced controller configured without a precision");
  if (static_cast<Eigen::Index>(sys.input_layout.size()) != ctrl.input_dim)
    throw ShapeError("reach_nncs: controller input layout has " +
                     std::to_string(sys.input_layout.size()) +
                     " entries, controller expects " +
                     std::to_string(ctrl.input_dim));
  if (ctrl.output_dim() != sys.plant.input_dim)
    throw ShapeError("reach_nncs: controller output dimension " +
                     std::to_string(ctrl.output_dim()) +
                     " does not match plant input dimension " +
                     std::to_string(sys.plant.input_dim));

  const auto substeps =
      static_cast<long long>(std::llround(period / cfg.step.dt));
  if (substeps < 1 ||
      std::abs(static_cast<double>(substeps) * cfg.step.dt - period) >
          1e-9 * std::max(1.0, period))
    throw PreconditionError(
        "reach_nncs: dt must divide the sampling period into integer substeps");
  const double total_substeps = static_cast<double>(intervals * substeps);

  const auto t_start = std::chrono::steady_clock::now();
  NncsReachResult result;
  result.instants.reserve(static_cast<std::size_t>(intervals) + 1);
  result.tube.segments.reserve(
      static_cast<std::size_t>(intervals * substeps));
  result.stats.intervals = static_cast<std::size_t>(intervals);

  // The integrator consumes the hull of the (inflated) control set, so the
  // per-cell boxes are folded on the fly: hull-then-pad equals pad-then-hull
  // exactly.
  const detail::PreparedNetwork prepared = detail::prepare(ctrl);
  detail::PropagateScratch scratch;
  const double radius =
      use_reduced ? inflation_radius(sys.precision->rho, cfg.inflation) : 0.0;

  IntervalBox state = x0;
  result.instants.push_back(state);

  for (long long k = 0; k < intervals; ++k) {
    const IntervalBox outputs = reach_ode_y(sys.plant, state);
    const IntervalBox tau =
        assemble_controller_input(sys.input_layout, outputs, sys.reference_box);

    if (use_reduced && !sys.precision->input_set.contains(tau))
      throw PrecisionDomainError(
          "reach_nncs: controller input box at interval " + std::to_string(k) +
          " leaves the precision input set; recompute the precision over a "
          "larger input set");

    const auto t_ctrl = std::chrono::steady_clock::now();
    const std::vector<int> counts =
        partition_counts(tau, cfg.controller_partition);
    IntervalBox control_hull =
        detail::propagate_hull(prepared, tau, counts, scratch);
    if (use_reduced) control_hull = pad(control_hull, radius);
    result.stats.controller_reach_seconds += elapsed(t_ctrl);
    result.stats.controller_cells += cell_total(counts);

    const auto t_ode = std::chrono::steady_clock::now();
    ReachTube interval_tube =
        reach_ode_x(sys.plant, control_hull, state, period, cfg.step);
    result.stats.ode_reach_seconds += elapsed(t_ode);

    // Global time stamps share one formula so adjacent segments (and the two
    // runs of a comparison) meet bit-exactly.
    for (std::size_t j = 0; j < interval_tube.segments.size(); ++j) {
      TubeSegment seg = interval_tube.segments[j];
      const double m =
          static_cast<double>(k * substeps + static_cast<long long>(j));
      seg.t_begin = horizon * (m / total_substeps);
      seg.t_end = horizon * ((m + 1.0) / total_substeps);
      result.tube.segments.push_back(std::move(seg));
    }
    state = interval_tube.final_box;
    result.instants.push_back(state);
  }

  result.tube.final_box = state;
  result.stats.total_seconds = elapsed(t_start);
  return result;
}

const char* to_string(Verdict v) {
  return v == Verdict::safe ? "safe" : "unknown";
}

namespace {

// Least value of coeffs . x over the box: attained at the per-sign corner.
double min_over_box(const Eigen::VectorXd& coeffs, const IntervalBox& box) {
  double acc = 0.0;
  for (Eigen::Index i = 0; i < coeffs.size(); ++i)
    acc += coeffs[i] >= 0.0 ? coeffs[i] * box.lower[i]
                            : coeffs[i] * box.upper[i];
  return acc;
}

// Necessary intersection test: every inequality individually satisfiable at
// its best corner. May overestimate for multi-inequality regions, which only
// pushes the verdict toward unknown.
bool may_intersect(const UnsafeRegion& region, const IntervalBox& box) {
  for (const LinearInequality& ineq : region.inequalities) {
    if (ineq.coeffs.size() != box.dim())
      throw ShapeError("verify: inequality over " +
                       std::to_string(ineq.coeffs.size()) +
                       " variables against a " + std::to_string(box.dim()) +
                       "-dimensional tube");
    if (min_over_box(ineq.coeffs, box) > ineq.bound) return false;
  }
  return true;
}

}  // namespace

VerificationResult verify(const ReachTube& tube, const SafetySpec& spec) {
  VerificationResult result;
  result.verdict = Verdict::safe;
  for (const TubeSegment& seg : tube.segments) {
    for (std::size_t r = 0; r < spec.unsafe.size(); ++r) {
      if (may_intersect(spec.unsafe[r], seg.box)) {
        result.verdict = Verdict::unknown;
        result.first_violation =
            Violation{seg.t_begin, seg.t_end, r, spec.unsafe[r].description};
        return result;
      }
    }
  }
  return result;
}

}  // namespace nnmr
