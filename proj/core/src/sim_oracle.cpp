#include "nnmr/sim_oracle.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <string>

#include "nnmr/errors.hpp"

namespace nnmr {

namespace {

// Dormand-Prince 5(4) coefficients.
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187,
                 a53 = 64448.0 / 6561, a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                 a64 = 49.0 / 176, a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                 b5 = -2187.0 / 6784, b6 = 11.0 / 84;
constexpr double e1 = 35.0 / 384 - 5179.0 / 57600,
                 e3 = 500.0 / 1113 - 7571.0 / 16695,
                 e4 = 125.0 / 192 - 393.0 / 640,
                 e5 = -2187.0 / 6784 + 92097.0 / 339200,
                 e6 = 11.0 / 84 - 187.0 / 2100, e7 = -1.0 / 40;

}  // namespace

Trajectory integrate_ode(const Dynamics& dyn, const Eigen::VectorXd& x0,
                         const Eigen::VectorXd& u, double t0, double t1,
                         double rel_tol, double abs_tol, bool record_steps) {
  if (!(t1 > t0)) throw SimulationError("integrate_ode: empty time span");
  auto f = [&](const Eigen::VectorXd& x) { return dyn.vector_field(x, u); };

  Trajectory traj;
  traj.times.push_back(t0);
  traj.states.push_back(x0);
  traj.control_times.push_back(t0);
  traj.controls.push_back(u);

  double t = t0;
  Eigen::VectorXd x = x0;
  Eigen::VectorXd k1 = f(x);
  double h = (t1 - t0) / 16.0;
  const double h_min = (t1 - t0) * 1e-14;

  while (t < t1) {
    h = std::min(h, t1 - t);
    const Eigen::VectorXd k2 = f(x + h * (a21 * k1));
    const Eigen::VectorXd k3 = f(x + h * (a31 * k1 + a32 * k2));
    const Eigen::VectorXd k4 = f(x + h * (a41 * k1 + a42 * k2 + a43 * k3));
    const Eigen::VectorXd k5 =
        f(x + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4));
    const Eigen::VectorXd k6 =
        f(x + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5));
    const Eigen::VectorXd x_new =
        x + h * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
    const Eigen::VectorXd k7 = f(x_new);  // FSAL
    const Eigen::VectorXd err =
        h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);

    double err_ratio = 0.0;
    for (Eigen::Index i = 0; i < x.size(); ++i) {
      const double scale =
          abs_tol + rel_tol * std::max(std::abs(x[i]), std::abs(x_new[i]));
      err_ratio = std::max(err_ratio, std::abs(err[i]) / scale);
    }

    if (err_ratio <= 1.0) {
      t = (t1 - t <= h + h_min) ? t1 : t + h;
      x = x_new;
      k1 = k7;
      if (record_steps || t >= t1) {
        traj.times.push_back(t);
        traj.states.push_back(x);
      }
    }

    const double factor = err_ratio > 0.0
                              ? 0.9 * std::pow(err_ratio, -0.2)
                              : 5.0;
    h *= std::clamp(factor, 0.2, 5.0);
    if (h < h_min)
      throw SimulationError("integrate_ode: step size underflow at t = " +
                            format_double(t));
  }
  return traj;
}

Trajectory simulate(const SampledNNCS& sys, const Eigen::VectorXd& x0,
                    const Eigen::VectorXd& reference, double horizon,
                    const SimulateOptions& opts) {
  const double period = sys.sampling_period;
  const auto intervals =
      static_cast<long long>(std::llround(horizon / period));
  if (intervals < 1 ||
      std::abs(static_cast<double>(intervals) * period - horizon) >
          1e-9 * std::max(1.0, horizon))
    throw PreconditionError(
        "simulate: horizon must be an integer number of sampling periods");
  if (x0.size() != sys.plant.state_dim)
    throw ShapeError("simulate: x0 has dimension " + std::to_string(x0.size()) +
                     ", plant expects " + std::to_string(sys.plant.state_dim));
  const Network& ctrl = opts.use_reduced && sys.reduced_controller
                            ? *sys.reduced_controller
                            : sys.controller;

  Trajectory traj;
  traj.times.push_back(0.0);
  traj.states.push_back(x0);

  Eigen::VectorXd x = x0;
  for (long long k = 0; k < intervals; ++k) {
    // Time stamps share the reach_nncs formula so audits line up bit-exactly.
    const double t_a =
        horizon * (static_cast<double>(k) / static_cast<double>(intervals));
    const double t_b =
        k == intervals - 1
            ? horizon
            : horizon * (static_cast<double>(k + 1) /
                         static_cast<double>(intervals));
    const Eigen::VectorXd y = sys.plant.output_map(x);
    const Eigen::VectorXd tau =
        assemble_controller_input(sys.input_layout, y, reference);
    const Eigen::VectorXd u = eval(ctrl, tau);

    Trajectory piece = integrate_ode(sys.plant, x, u, t_a, t_b, opts.rel_tol,
                                     opts.abs_tol, opts.record_internal_steps);
    traj.control_times.push_back(t_a);
    traj.controls.push_back(u);
    for (std::size_t i = 1; i < piece.times.size(); ++i) {
      traj.times.push_back(piece.times[i]);
      traj.states.push_back(piece.states[i]);
    }
    x = traj.states.back();
  }
  return traj;
}

AuditReport containment_audit(const std::vector<Trajectory>& trajectories,
                              const ReachTube& tube) {
  AuditReport report;
  const auto& segs = tube.segments;
  for (std::size_t id = 0; id < trajectories.size(); ++id) {
    const Trajectory& traj = trajectories[id];
    std::size_t cursor = 0;
    for (std::size_t p = 0; p < traj.times.size(); ++p) {
      const double t = traj.times[p];
      while (cursor + 1 < segs.size() && segs[cursor].t_end < t) ++cursor;
      // Check every segment whose window covers t (at a shared boundary the
      // point must lie in both neighbours).
      bool covered = false;
      for (std::size_t s = cursor;
           s < segs.size() && segs[s].t_begin <= t; ++s) {
        if (t > segs[s].t_end) continue;
        covered = true;
        const IntervalBox& box = segs[s].box;
        const Eigen::VectorXd& x = traj.states[p];
        ++report.checked_points;
        for (Eigen::Index i = 0; i < box.dim(); ++i) {
          double margin = 0.0;
          if (x[i] < box.lower[i]) margin = box.lower[i] - x[i];
          if (x[i] > box.upper[i]) margin = x[i] - box.upper[i];
          if (margin > 0.0)
            report.violations.push_back({id, t, i, margin});
        }
      }
      if (!covered && !segs.empty())
        report.violations.push_back({id, t, -1, 0.0});
    }
  }
  return report;
}

void write_csv(const Trajectory& traj, std::ostream& out) {
  const Eigen::Index d = traj.states.empty() ? 0 : traj.states[0].size();
  const Eigen::Index m = traj.controls.empty() ? 0 : traj.controls[0].size();
  out << "t";
  for (Eigen::Index i = 0; i < d; ++i) out << ",x_" << i;
  for (Eigen::Index i = 0; i < m; ++i) out << ",u_" << i;
  out << "\n";
  std::size_t ctrl_cursor = 0;
  for (std::size_t p = 0; p < traj.times.size(); ++p) {
    const double t = traj.times[p];
    while (ctrl_cursor + 1 < traj.control_times.size() &&
           traj.control_times[ctrl_cursor + 1] <= t)
      ++ctrl_cursor;
    out << format_double(t);
    for (Eigen::Index i = 0; i < d; ++i)
      out << ',' << format_double(traj.states[p][i]);
    if (!traj.controls.empty())
      for (Eigen::Index i = 0; i < m; ++i)
        out << ',' << format_double(traj.controls[ctrl_cursor][i]);
    out << "\n";
  }
}

}  // namespace nnmr
