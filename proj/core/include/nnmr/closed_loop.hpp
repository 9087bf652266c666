#pragma once

#include <optional>
#include <string>
#include <vector>

#include "nnmr/interval.hpp"
#include "nnmr/network.hpp"
#include "nnmr/nn_reach.hpp"
#include "nnmr/ode_reach.hpp"
#include "nnmr/reduction.hpp"

namespace nnmr {

// One entry of the controller input vector: either a plant output component
// or a reference component. The layout fixes the order the controller was
// trained with (references may interleave with outputs).
struct TauComponent {
  enum class Source { output, reference };
  Source source = Source::output;
  int index = 0;
};

using ControllerInputLayout = std::vector<TauComponent>;

// Sampled-data neural network control system: the controller is evaluated at
// sampling instants and its output held constant until the next one. When a
// reduced controller is used for reachability, `precision` must be present
// and must have been computed over a box covering every controller input box
// the analysis encounters (checked at runtime).
struct SampledNNCS {
  Dynamics plant;
  Network controller;
  std::optional<Network> reduced_controller;
  std::optional<Precision> precision;
  double sampling_period = 0.01;
  IntervalBox reference_box;  // constant references live here as a point box
  ControllerInputLayout input_layout;
};

Eigen::VectorXd assemble_controller_input(const ControllerInputLayout& layout,
                                          const Eigen::VectorXd& y,
                                          const Eigen::VectorXd& r);
IntervalBox assemble_controller_input(const ControllerInputLayout& layout,
                                      const IntervalBox& y,
                                      const IntervalBox& r);

// Conjunction of linear inequalities coeffs . x <= bound describing one
// unsafe region; the safety specification is the union of its regions.
struct LinearInequality {
  Eigen::VectorXd coeffs;
  double bound = 0.0;
};

struct UnsafeRegion {
  std::string description;
  std::vector<LinearInequality> inequalities;
};

struct SafetySpec {
  std::vector<UnsafeRegion> unsafe;
};

struct ReachStats {
  double controller_reach_seconds = 0.0;
  double ode_reach_seconds = 0.0;
  double total_seconds = 0.0;
  std::size_t controller_cells = 0;
  std::size_t intervals = 0;
};

struct NncsReachResult {
  ReachTube tube;
  std::vector<IntervalBox> instants;  // state box at each sampling instant
  ReachStats stats;
};

struct ReachNncsConfig {
  PartitionConfig controller_partition;
  StepConfig step;
  InflationMode inflation = InflationMode::sound_full_rho;
};

// Closed-loop reachable tube over horizon = K * sampling_period. Per
// interval: output box of the current state box, controller input box from
// the layout, controller output union via reach_nn (the reduced controller
// when present, grown by the precision radius), then one validated
// integration of the plant with the hull of the control set held constant.
//
// With InflationMode::sound_full_rho the tube contains every trajectory of
// the closed loop driven by the ORIGINAL controller from X0 with references
// in reference_box. Throws PrecisionDomainError if a controller input box
// leaves precision.input_set.
NncsReachResult reach_nncs(const SampledNNCS& sys, const IntervalBox& x0,
                           double horizon, const ReachNncsConfig& cfg);

enum class Verdict { safe, unknown };

const char* to_string(Verdict v);

struct Violation {
  double t_begin = 0.0;
  double t_end = 0.0;
  std::size_t region = 0;
  std::string description;
};

struct VerificationResult {
  Verdict verdict = Verdict::unknown;
  std::optional<Violation> first_violation;
  ReachStats stats;
};

// Safe iff no tube segment can intersect any unsafe region. A region is
// counted as intersecting when each of its inequalities is satisfiable at the
// box corner minimizing it (necessary condition, so "safe" is sound and
// "unknown" is conservative).
VerificationResult verify(const ReachTube& tube, const SafetySpec& spec);

}  // namespace nnmr
