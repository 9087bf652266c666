#pragma once

#include <vector>

#include "nnmr/closed_loop.hpp"
#include "nnmr/distill.hpp"
#include "nnmr/ode_reach.hpp"

namespace nnmr {

// Two-car adaptive cruise control plant. State (x_l, v_l, a_l, x_e, v_e,
// a_e): position, velocity and actual acceleration of the lead and ego car.
// Inputs are the commanded accelerations (alpha_l, alpha_e); each car follows
// adot = -2 a + 2 alpha - mu v^2 with friction parameter mu. Outputs are
// (v_e, d_rel, v_rel) with d_rel = x_l - x_e and v_rel = v_l - v_e.
Dynamics acc_dynamics(double mu = 0.001);

// Same plant with the lead command frozen to a constant, leaving the ego
// command as the only input. This is the plant the closed loop runs against.
Dynamics acc_plant_fixed_lead(double mu, double lead_accel);

struct AccScenarioOptions {
  double mu = 0.001;
  double t_gap = 1.4;        // safe-distance time gap (s)
  double d_def = 10.0;       // standstill default spacing (m)
  double v_set = 30.0;       // cruise set speed; benchmark choice, not pinned
  double lead_accel = -2.0;  // emergency braking command for the lead car
  double sampling_period = 0.01;
  double horizon = 3.0;      // 300 sampling intervals

  // Ego control law the benchmark controller realizes:
  //   alpha_e = clamp(gain_v (v_set - v_e) + gain_d (d_rel - d_def - t_gap v_e),
  //                   accel_min, accel_max)
  double gain_v = 0.5;
  double gain_d = 0.2;
  double accel_min = -3.0;
  double accel_max = 2.0;

  // Architecture the law is synthesized into.
  int hidden_layers = 5;
  int hidden_width = 20;
};

struct Scenario {
  SampledNNCS system;
  IntervalBox initial_set;
  SafetySpec safety;
  double horizon = 0.0;
};

// Controller input layout tau = (v_set, t_gap, v_e, d_rel, v_rel): the two
// reference components first, then the three plant outputs.
ControllerInputLayout acc_input_layout();

// Exact synthesis of the benchmark control law into the requested
// architecture. The clamp is realized by two relu units
// (lo + relu(s - lo) - relu(s - hi)); the remaining hidden layers pass the
// two nonnegative channels through identity relu blocks, so the returned
// network equals the law everywhere, saturation included.
Network acc_reference_controller(const AccScenarioOptions& opts = {});

// Unsafe region: d_rel <= d_def + t_gap * v_e, expanded over the plant state
// as a single linear inequality.
SafetySpec acc_safety_spec(double t_gap = 1.4, double d_def = 10.0);

// The benchmark exactly as studied: initial set x_l in [94,96], v_l in
// [30,30.2], a_l = 0, x_e in [10,11], v_e in [30,30.2], a_e = 0; braking
// lead; 0.01 s sampling over 3 s. The returned system carries the original
// controller only; attach_reduced_acc_controller adds the reduced side.
Scenario acc_scenario(const AccScenarioOptions& opts = {});

struct AccReductionOptions {
  std::vector<int> reduced_hidden = {5, 5};
  int distill_samples = 4096;
  int distill_epochs = 3000;
  double learning_rate = 1e-2;
  unsigned seed = 7;
  // Start the student at a reduced-form synthesis of the teacher's law
  // instead of random weights. See attach_reduced_acc_controller.
  bool init_from_law = true;

  // Box in tau space the student is fitted over and the precision is
  // computed over. Degenerate in the reference components.
  IntervalBox domain;                 // empty -> acc_default_precision_domain
  std::vector<int> precision_splits;  // empty -> acc_default_precision_splits
  std::size_t precision_cell_cap = 8000000;
  int precision_samples = 20000;
};

IntervalBox acc_default_precision_domain(const AccScenarioOptions& opts = {});
std::vector<int> acc_default_precision_splits();

struct AccReduction {
  Network reduced;
  PrecisionReport precision;
  DistillResult distill;
};

// Distills the scenario controller into the reduced architecture and
// computes the reduction precision over the domain. Attaches both to the
// scenario system.
AccReduction attach_reduced_acc_controller(Scenario& scenario,
                                           const AccReductionOptions& opts = {});

}  // namespace nnmr
