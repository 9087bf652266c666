#pragma once

#include <Eigen/Dense>

#include <functional>
#include <iosfwd>
#include <optional>
#include <utility>
#include <vector>

#include "nnmr/errors.hpp"
#include "nnmr/interval.hpp"

namespace nnmr {

// Continuous-time plant xdot = f(x, u), y = h(x). Both maps are held twice:
// once over real vectors and once over boxes. Interval evaluation must be
// inclusion-isotone (nested boxes map to nested boxes); make_dynamics
// guarantees that by instantiating one generic body over both scalar types.
struct Dynamics {
  int state_dim = 0;
  int input_dim = 0;
  std::function<Eigen::VectorXd(const Eigen::VectorXd&, const Eigen::VectorXd&)>
      vector_field;
  std::function<IntervalBox(const IntervalBox&, const IntervalBox&)>
      vector_field_box;
  std::function<Eigen::VectorXd(const Eigen::VectorXd&)> output_map;
  std::function<IntervalBox(const IntervalBox&)> output_map_box;
  std::optional<double> lipschitz_hint;
};

namespace detail {

inline std::vector<double> to_scalars(const Eigen::VectorXd& v) {
  return {v.data(), v.data() + v.size()};
}

inline std::vector<Interval> to_scalars(const IntervalBox& b) {
  std::vector<Interval> out(static_cast<std::size_t>(b.dim()));
  for (Eigen::Index i = 0; i < b.dim(); ++i) out[static_cast<std::size_t>(i)] = b.component(i);
  return out;
}

inline Eigen::VectorXd from_scalars(const std::vector<double>& v) {
  return Eigen::Map<const Eigen::VectorXd>(v.data(),
                                           static_cast<Eigen::Index>(v.size()));
}

IntervalBox from_scalars(const std::vector<Interval>& v);

}  // namespace detail

// Builds a Dynamics from one generic vector field and one generic output map,
// each callable as (const std::vector<S>&, ...) -> std::vector<S> for S in
// {double, Interval}.
template <class F, class H>
Dynamics make_dynamics(int state_dim, int input_dim, F f, H h,
                       std::optional<double> lipschitz_hint = std::nullopt) {
  Dynamics d;
  d.state_dim = state_dim;
  d.input_dim = input_dim;
  d.lipschitz_hint = lipschitz_hint;
  d.vector_field = [f, state_dim, input_dim](const Eigen::VectorXd& x,
                                             const Eigen::VectorXd& u) {
    if (x.size() != state_dim || u.size() != input_dim)
      throw ShapeError("vector_field: state/input dimension mismatch");
    return detail::from_scalars(f(detail::to_scalars(x), detail::to_scalars(u)));
  };
  d.vector_field_box = [f, state_dim, input_dim](const IntervalBox& x,
                                                 const IntervalBox& u) {
    if (x.dim() != state_dim || u.dim() != input_dim)
      throw ShapeError("vector_field: state/input dimension mismatch");
    return detail::from_scalars(f(detail::to_scalars(x), detail::to_scalars(u)));
  };
  d.output_map = [h, state_dim](const Eigen::VectorXd& x) {
    if (x.size() != state_dim)
      throw ShapeError("output_map: state dimension mismatch");
    return detail::from_scalars(h(detail::to_scalars(x)));
  };
  d.output_map_box = [h, state_dim](const IntervalBox& x) {
    if (x.dim() != state_dim)
      throw ShapeError("output_map: state dimension mismatch");
    return detail::from_scalars(h(detail::to_scalars(x)));
  };
  return d;
}

// Validated integration step configuration. dt must divide the horizon passed
// to reach_ode_x into integer substeps.
struct StepConfig {
  double dt = 0.0025;
  double enclosure_inflation = 1.1;
  int max_picard_iters = 50;
  int taylor_order = 1;  // order-1 validated Euler is the only integrator

  static StepConfig for_period(double sampling_period) {
    StepConfig c;
    c.dt = sampling_period / 4.0;
    return c;
  }
};

struct TubeSegment {
  double t_begin = 0.0;
  double t_end = 0.0;
  IntervalBox box;
};

// Time-contiguous family of state boxes plus the tightened terminal slice
// (final_box is contained in the last segment's box).
struct ReachTube {
  std::vector<TubeSegment> segments;
  IntervalBox final_box;

  double t_begin() const { return segments.empty() ? 0.0 : segments.front().t_begin; }
  double t_end() const { return segments.empty() ? 0.0 : segments.back().t_end; }
};

// Guaranteed enclosure of every solution of xdot = f(x, ubar) with x(t0) in
// x0 and any constant ubar in u, over [t0, t0 + horizon]. Per substep: find
// an a-priori enclosure B with the Picard check x0 + [0,dt]*f(B,u) inside B,
// growing a candidate geometrically on failure, then take the step image
// x0 + dt*f(B,u). Throws EnclosureError when the growth budget runs out.
ReachTube reach_ode_x(const Dynamics& dyn, const IntervalBox& u,
                      const IntervalBox& x0, double horizon,
                      const StepConfig& cfg, double t0 = 0.0);

// Interval evaluation of the output map over a state box.
IntervalBox reach_ode_y(const Dynamics& dyn, const IntervalBox& state_box);

// Rows: t_begin, t_end, lower..., upper...
void write_csv(const ReachTube& tube, std::ostream& out);
ReachTube read_tube_csv(std::istream& in);

}  // namespace nnmr
