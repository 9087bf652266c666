#pragma once

#include <Eigen/Dense>

#include <iosfwd>
#include <vector>

#include "nnmr/closed_loop.hpp"
#include "nnmr/ode_reach.hpp"

namespace nnmr {

// Sampled closed-loop trajectory from the reference integrator. This is NOT
// validated arithmetic: it can refute a tube, never certify one.
struct Trajectory {
  std::vector<double> times;
  std::vector<Eigen::VectorXd> states;
  std::vector<double> control_times;          // sampling instants
  std::vector<Eigen::VectorXd> controls;      // input held over each interval
};

struct SimulateOptions {
  double rel_tol = 1e-10;
  double abs_tol = 1e-10;
  bool use_reduced = false;
  bool record_internal_steps = true;
};

// Adaptive embedded Runge-Kutta integration with the control input held
// constant: u(t) = u over [t0, t1]. Deterministic for fixed inputs.
Trajectory integrate_ode(const Dynamics& dyn, const Eigen::VectorXd& x0,
                         const Eigen::VectorXd& u, double t0, double t1,
                         double rel_tol = 1e-10, double abs_tol = 1e-10,
                         bool record_steps = true);

// Closed-loop simulation: per sampling interval the controller (reduced when
// opts.use_reduced) is evaluated once and held, then the plant is integrated
// with the adaptive integrator.
Trajectory simulate(const SampledNNCS& sys, const Eigen::VectorXd& x0,
                    const Eigen::VectorXd& reference, double horizon,
                    const SimulateOptions& opts = {});

struct ContainmentViolation {
  std::size_t trajectory = 0;
  double time = 0.0;
  Eigen::Index component = 0;
  double margin = 0.0;  // distance outside the segment box
};

struct AuditReport {
  std::size_t checked_points = 0;
  std::vector<ContainmentViolation> violations;
};

// Checks every recorded trajectory point against the tube segments covering
// its time stamp. A sound tube must produce zero violations.
AuditReport containment_audit(const std::vector<Trajectory>& trajectories,
                              const ReachTube& tube);

// Rows: t, x..., u... (the control held over the interval containing t).
void write_csv(const Trajectory& traj, std::ostream& out);

}  // namespace nnmr
