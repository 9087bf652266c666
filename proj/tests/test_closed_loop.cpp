#include <doctest.h>

#include <random>

#include "helpers.hpp"
#include "nnmr/acc.hpp"
#include "nnmr/closed_loop.hpp"
#include "nnmr/errors.hpp"
#include "nnmr/sim_oracle.hpp"

using namespace nnmr;
using namespace nnmr::testing;

namespace {

// One-state plant with zero flow; the controller output is wired in but the
// field ignores it.
SampledNNCS frozen_plant_system() {
  SampledNNCS sys;
  sys.plant = make_dynamics(
      1, 1,
      [](const auto& x, const auto&) {
        using S = typename std::decay_t<decltype(x)>::value_type;
        (void)x;
        return std::vector<S>{S(0.0)};
      },
      [](const auto& x) { return x; });
  std::mt19937 rng(101);
  sys.controller = random_network(rng, {1, 3, 1});
  sys.sampling_period = 0.1;
  sys.reference_box = IntervalBox(Eigen::VectorXd(0), Eigen::VectorXd(0));
  sys.input_layout = {{TauComponent::Source::output, 0}};
  return sys;
}

ReachNncsConfig basic_config() {
  ReachNncsConfig cfg;
  cfg.step.dt = 0.025;
  return cfg;
}

IntervalBox huge_domain(Eigen::Index dim) {
  return IntervalBox(Eigen::VectorXd::Constant(dim, -1e6),
                     Eigen::VectorXd::Constant(dim, 1e6));
}

}  // namespace

TEST_CASE("zero flow keeps the tube at the initial box") {
  const SampledNNCS sys = frozen_plant_system();
  const IntervalBox x0(vec({1.0}), vec({2.0}));
  const NncsReachResult run = reach_nncs(sys, x0, 1.0, basic_config());
  REQUIRE(run.stats.intervals == 10);
  for (const TubeSegment& seg : run.tube.segments) {
    CHECK(seg.box.lower[0] == 1.0);
    CHECK(seg.box.upper[0] == 2.0);
  }
  CHECK(same_box(run.tube.final_box, x0));
}

TEST_CASE("reduced = original with rho 0 reproduces the tube box for box") {
  AccScenarioOptions opts;
  opts.horizon = 0.2;
  Scenario sc = acc_scenario(opts);

  ReachNncsConfig cfg;
  cfg.controller_partition = PartitionConfig::uniform_splits({1, 1, 4, 4, 1});
  cfg.step.dt = 0.0025;

  const NncsReachResult original =
      reach_nncs(sc.system, sc.initial_set, opts.horizon, cfg);

  SampledNNCS with_reduced = sc.system;
  with_reduced.reduced_controller = sc.system.controller;
  Precision p;
  p.rho = 0.0;
  p.input_set = huge_domain(5);
  with_reduced.precision = p;
  const NncsReachResult reduced =
      reach_nncs(with_reduced, sc.initial_set, opts.horizon, cfg);

  REQUIRE(original.tube.segments.size() == reduced.tube.segments.size());
  for (std::size_t i = 0; i < original.tube.segments.size(); ++i) {
    CHECK(original.tube.segments[i].t_begin == reduced.tube.segments[i].t_begin);
    CHECK(same_box(original.tube.segments[i].box, reduced.tube.segments[i].box));
  }
  REQUIRE(original.instants.size() == reduced.instants.size());
  for (std::size_t i = 0; i < original.instants.size(); ++i)
    CHECK(same_box(original.instants[i], reduced.instants[i]));
}

TEST_CASE("controller inputs escaping the precision domain raise an error") {
  AccScenarioOptions opts;
  opts.horizon = 0.1;
  Scenario sc = acc_scenario(opts);
  sc.system.reduced_controller = sc.system.controller;
  Precision p;
  p.rho = 0.0;
  // Tiny domain that cannot contain the benchmark's tau boxes.
  p.input_set = IntervalBox(Eigen::VectorXd::Zero(5), Eigen::VectorXd::Zero(5));
  sc.system.precision = p;
  ReachNncsConfig cfg;
  cfg.step.dt = 0.0025;
  CHECK_THROWS_AS(reach_nncs(sc.system, sc.initial_set, opts.horizon, cfg),
                  PrecisionDomainError);
}

TEST_CASE("reduced controller without a precision is rejected") {
  SampledNNCS sys = frozen_plant_system();
  sys.reduced_controller = sys.controller;
  CHECK_THROWS_AS(
      reach_nncs(sys, IntervalBox(vec({0.0}), vec({1.0})), 0.5, basic_config()),
      PreconditionError);
}

TEST_CASE("horizon must be a whole number of sampling periods") {
  const SampledNNCS sys = frozen_plant_system();
  CHECK_THROWS_AS(reach_nncs(sys, IntervalBox(vec({0.0}), vec({1.0})), 0.25,
                             basic_config()),
                  PreconditionError);
}

TEST_CASE("verify: disjoint tube is safe, touching tube is unknown") {
  ReachTube tube;
  tube.segments.push_back({0.0, 1.0, IntervalBox(vec({5.0}), vec({6.0}))});
  tube.final_box = tube.segments[0].box;

  SafetySpec spec;
  UnsafeRegion region;
  region.description = "x at or below zero";
  region.inequalities.push_back({vec({1.0}), 0.0});
  spec.unsafe.push_back(region);

  CHECK(verify(tube, spec).verdict == Verdict::safe);

  ReachTube touching;
  touching.segments.push_back({0.0, 0.5, IntervalBox(vec({2.0}), vec({3.0}))});
  touching.segments.push_back({0.5, 1.0, IntervalBox(vec({-1.0}), vec({1.0}))});
  touching.final_box = touching.segments[1].box;
  const VerificationResult res = verify(touching, spec);
  CHECK(res.verdict == Verdict::unknown);
  REQUIRE(res.first_violation.has_value());
  CHECK(res.first_violation->t_begin == 0.5);
  CHECK(res.first_violation->region == 0);
}

TEST_CASE("acc safety spec encodes a single expanded inequality") {
  const SafetySpec spec = acc_safety_spec(1.4, 10.0);
  REQUIRE(spec.unsafe.size() == 1);
  REQUIRE(spec.unsafe[0].inequalities.size() == 1);
  const LinearInequality& ineq = spec.unsafe[0].inequalities[0];
  REQUIRE(ineq.coeffs.size() == 6);
  CHECK(ineq.coeffs[0] == 1.0);
  CHECK(ineq.coeffs[1] == 0.0);
  CHECK(ineq.coeffs[2] == 0.0);
  CHECK(ineq.coeffs[3] == -1.0);
  CHECK(ineq.coeffs[4] == -1.4);
  CHECK(ineq.coeffs[5] == 0.0);
  CHECK(ineq.bound == 10.0);
}

TEST_CASE("acc scenario wiring") {
  const Scenario sc = acc_scenario();
  CHECK(sc.system.sampling_period == 0.01);
  CHECK(sc.horizon == 3.0);
  CHECK(std::llround(sc.horizon / sc.system.sampling_period) == 300);

  // d_rel hull of the initial set.
  const IntervalBox y = reach_ode_y(sc.system.plant, sc.initial_set);
  CHECK(y.lower[1] == 83.0);
  CHECK(y.upper[1] == 86.0);

  // t_gap appears identically in the reference box and the safety spec.
  CHECK(sc.system.reference_box.lower[1] == 1.4);
  CHECK(sc.system.reference_box.upper[1] == 1.4);
  CHECK(sc.safety.unsafe[0].inequalities[0].coeffs[4] == -1.4);

  // First-interval relative distance stays positive.
  ReachNncsConfig cfg;
  cfg.controller_partition = PartitionConfig::uniform_splits({1, 1, 2, 2, 1});
  cfg.step.dt = 0.0025;
  const NncsReachResult run =
      reach_nncs(sc.system, sc.initial_set, sc.system.sampling_period, cfg);
  const IntervalBox y1 = reach_ode_y(sc.system.plant, run.tube.final_box);
  CHECK(y1.lower[1] > 0.0);
}

TEST_CASE("monotone conservatism: larger rho gives a containing tube") {
  AccScenarioOptions opts;
  opts.horizon = 0.3;
  Scenario sc = acc_scenario(opts);
  sc.system.reduced_controller = sc.system.controller;

  ReachNncsConfig cfg;
  cfg.controller_partition = PartitionConfig::uniform_splits({1, 1, 4, 4, 1});
  cfg.step.dt = 0.0025;

  Precision small;
  small.rho = 0.05;
  small.input_set = huge_domain(5);
  sc.system.precision = small;
  const NncsReachResult run_small =
      reach_nncs(sc.system, sc.initial_set, opts.horizon, cfg);

  Precision large;
  large.rho = 0.5;
  large.input_set = huge_domain(5);
  sc.system.precision = large;
  const NncsReachResult run_large =
      reach_nncs(sc.system, sc.initial_set, opts.horizon, cfg);

  REQUIRE(run_small.tube.segments.size() == run_large.tube.segments.size());
  for (std::size_t i = 0; i < run_small.tube.segments.size(); ++i)
    CHECK(run_large.tube.segments[i].box.contains(run_small.tube.segments[i].box));
}

TEST_CASE("verify is monotone under tube enlargement") {
  std::mt19937 rng(103);
  for (int trial = 0; trial < 30; ++trial) {
    ReachTube tube;
    for (int s = 0; s < 5; ++s) {
      tube.segments.push_back(
          {0.1 * s, 0.1 * (s + 1), random_box(rng, 2, 3.0, 1.0)});
    }
    tube.final_box = tube.segments.back().box;
    ReachTube bigger = tube;
    for (TubeSegment& seg : bigger.segments) seg.box = pad(seg.box, 0.7);

    SafetySpec spec;
    UnsafeRegion region;
    region.inequalities.push_back({random_vector(rng, 2, 1.0), 0.5});
    spec.unsafe.push_back(region);

    const Verdict v_small = verify(tube, spec).verdict;
    const Verdict v_big = verify(bigger, spec).verdict;
    if (v_big == Verdict::safe) CHECK(v_small == Verdict::safe);
  }
}

TEST_CASE("closed-loop containment with the reduced controller, short run") {
  AccScenarioOptions opts;
  opts.horizon = 0.3;
  Scenario sc = acc_scenario(opts);
  AccReductionOptions ropts;
  ropts.distill_epochs = 50;
  const AccReduction red = attach_reduced_acc_controller(sc, ropts);
  CHECK(red.precision.precision.rho >= 0.0);

  ReachNncsConfig cfg;
  cfg.controller_partition = PartitionConfig::uniform_splits({1, 1, 8, 8, 1});
  cfg.step.dt = 0.0025;
  const NncsReachResult run =
      reach_nncs(sc.system, sc.initial_set, opts.horizon, cfg);

  std::mt19937 rng(107);
  std::vector<Trajectory> trajs;
  for (int t = 0; t < 20; ++t) {
    trajs.push_back(simulate(sc.system, sample_box(rng, sc.initial_set),
                             sc.system.reference_box.center(), opts.horizon));
  }
  const AuditReport audit = containment_audit(trajs, run.tube);
  CHECK(audit.checked_points > 0);
  CHECK(audit.violations.empty());
}
