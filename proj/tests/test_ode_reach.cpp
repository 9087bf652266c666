#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "helpers.hpp"
#include "nnmr/acc.hpp"
#include "nnmr/errors.hpp"
#include "nnmr/ode_reach.hpp"
#include "nnmr/sim_oracle.hpp"

using namespace nnmr;
using namespace nnmr::testing;

namespace {

Dynamics constant_zero_flow() {
  return make_dynamics(
      1, 0,
      [](const auto& x, const auto&) {
        using S = typename std::decay_t<decltype(x)>::value_type;
        return std::vector<S>{S(0.0)};
      },
      [](const auto& x) { return x; });
}

Dynamics decay_flow() {
  return make_dynamics(
      1, 0,
      [](const auto& x, const auto&) {
        using S = typename std::decay_t<decltype(x)>::value_type;
        std::vector<S> dx{-x[0]};
        return dx;
      },
      [](const auto& x) { return x; });
}

Dynamics integrator_flow() {
  return make_dynamics(
      1, 1,
      [](const auto& x, const auto& u) {
        using S = typename std::decay_t<decltype(x)>::value_type;
        (void)x;
        return std::vector<S>{u[0]};
      },
      [](const auto& x) { return x; });
}

const IntervalBox kNoInput{Eigen::VectorXd(0), Eigen::VectorXd(0)};

}  // namespace

TEST_CASE("square rule: straddling zero is exact") {
  const Interval v = square(Interval(-2.0, 3.0));
  CHECK(v.lo == 0.0);
  CHECK(v.hi == 9.0);
  const Interval w = square(Interval(-3.0, -1.0));
  CHECK(w.lo == 1.0);
  CHECK(w.hi == 9.0);
}

TEST_CASE("constant flow keeps the initial box") {
  StepConfig cfg;
  cfg.dt = 0.25;
  const ReachTube tube = reach_ode_x(constant_zero_flow(), kNoInput,
                                     IntervalBox(vec({1.0}), vec({2.0})), 1.0, cfg);
  REQUIRE(tube.segments.size() == 4);
  CHECK(tube.final_box.lower[0] == 1.0);
  CHECK(tube.final_box.upper[0] == 2.0);
  for (const TubeSegment& seg : tube.segments) {
    CHECK(seg.box.lower[0] <= 1.0);
    CHECK(seg.box.upper[0] >= 2.0);
  }
}

TEST_CASE("decay flow encloses the analytic solution") {
  StepConfig cfg;
  cfg.dt = 0.005;
  const ReachTube tube = reach_ode_x(decay_flow(), kNoInput,
                                     IntervalBox::point(vec({1.0})), 0.1, cfg);
  const double truth = std::exp(-0.1);
  CHECK(tube.final_box.lower[0] <= truth);
  CHECK(tube.final_box.upper[0] >= truth);
  CHECK(tube.final_box.upper[0] - tube.final_box.lower[0] <= 0.05);
}

TEST_CASE("driven integrator reaches the analytic endpoint") {
  StepConfig cfg;
  cfg.dt = 0.25;
  const ReachTube tube =
      reach_ode_x(integrator_flow(), IntervalBox::point(vec({1.0})),
                  IntervalBox::point(vec({0.0})), 1.0, cfg);
  CHECK(tube.final_box.lower[0] <= 1.0);
  CHECK(tube.final_box.upper[0] >= 1.0);
}

TEST_CASE("enclosure failure reports a budget problem") {
  // Quadratic blowup with an absurd step: no a-priori enclosure exists.
  Dynamics quad = make_dynamics(
      1, 0,
      [](const auto& x, const auto&) {
        using S = typename std::decay_t<decltype(x)>::value_type;
        return std::vector<S>{square(x[0])};
      },
      [](const auto& x) { return x; });
  StepConfig cfg;
  cfg.dt = 2.0;
  CHECK_THROWS_AS(reach_ode_x(quad, kNoInput, IntervalBox::point(vec({1.0})),
                              2.0, cfg),
                  EnclosureError);
}

TEST_CASE("dt must divide the horizon") {
  StepConfig cfg;
  cfg.dt = 0.3;
  CHECK_THROWS_AS(reach_ode_x(constant_zero_flow(), kNoInput,
                              IntervalBox(vec({0.0}), vec({1.0})), 1.0, cfg),
                  PreconditionError);
}

TEST_CASE("reach_ode_y: identity, selection, difference") {
  const Dynamics plant = acc_dynamics();
  const IntervalBox state(vec({94.0, 30.0, 0.0, 10.0, 30.0, 0.0}),
                          vec({96.0, 30.2, 0.0, 11.0, 30.2, 0.0}));
  const IntervalBox y = reach_ode_y(plant, state);
  REQUIRE(y.dim() == 3);
  // ego velocity
  CHECK(y.lower[0] == 30.0);
  CHECK(y.upper[0] == 30.2);
  // relative distance
  CHECK(y.lower[1] == 83.0);
  CHECK(y.upper[1] == 86.0);
  // relative velocity
  CHECK(y.lower[2] == doctest::Approx(-0.2));
  CHECK(y.upper[2] == doctest::Approx(0.2));

  Dynamics diff = make_dynamics(
      2, 0,
      [](const auto& x, const auto&) { return x; },
      [](const auto& x) {
        using S = typename std::decay_t<decltype(x)>::value_type;
        return std::vector<S>{x[0] - x[1]};
      });
  const IntervalBox d =
      reach_ode_y(diff, IntervalBox(vec({3.0, 1.0}), vec({4.0, 2.0})));
  CHECK(d.lower[0] == 1.0);
  CHECK(d.upper[0] == 3.0);
}

TEST_CASE("acc plant derivative values") {
  const Dynamics plant = acc_dynamics();
  const Eigen::VectorXd x = vec({0.0, 30.0, 0.0, 0.0, 30.0, 0.0});
  const Eigen::VectorXd dx = plant.vector_field(x, vec({0.0, 0.0}));
  CHECK(dx[0] == 30.0);
  CHECK(dx[1] == 0.0);
  CHECK(dx[2] == doctest::Approx(-0.9).epsilon(1e-15));
  CHECK(dx[3] == 30.0);
  CHECK(dx[4] == 0.0);
  CHECK(dx[5] == doctest::Approx(-0.9).epsilon(1e-15));

  // -2a + 2*alpha cancels at a = alpha = 1 when v = 0.
  const Eigen::VectorXd dx2 =
      plant.vector_field(vec({0.0, 0.0, 1.0, 0.0, 0.0, 0.0}), vec({1.0, 0.0}));
  CHECK(dx2[2] == 0.0);
}

TEST_CASE("acc tube contains reference trajectories") {
  const Dynamics plant = acc_dynamics();
  const IntervalBox x0(vec({94.0, 30.0, 0.0, 10.0, 30.0, 0.0}),
                       vec({96.0, 30.2, 0.0, 11.0, 30.2, 0.0}));
  const IntervalBox inputs(vec({-2.0, -3.0}), vec({0.0, 2.0}));
  StepConfig cfg;
  cfg.dt = 0.0025;
  const ReachTube tube = reach_ode_x(plant, inputs, x0, 0.5, cfg);

  std::mt19937 rng(89);
  std::vector<Trajectory> trajs;
  for (int t = 0; t < 50; ++t) {
    trajs.push_back(integrate_ode(plant, sample_box(rng, x0),
                                  sample_box(rng, inputs), 0.0, 0.5));
  }
  const AuditReport audit = containment_audit(trajs, tube);
  CHECK(audit.checked_points > 0);
  CHECK(audit.violations.empty());
}

TEST_CASE("halving dt keeps the analytic value and overlapping finals") {
  StepConfig coarse;
  coarse.dt = 0.01;
  StepConfig fine;
  fine.dt = 0.005;
  const IntervalBox x0 = IntervalBox::point(vec({1.0}));
  const ReachTube a = reach_ode_x(decay_flow(), kNoInput, x0, 0.1, coarse);
  const ReachTube b = reach_ode_x(decay_flow(), kNoInput, x0, 0.1, fine);
  const double truth = std::exp(-0.1);
  for (const ReachTube* tube : {&a, &b}) {
    CHECK(tube->final_box.lower[0] <= truth);
    CHECK(tube->final_box.upper[0] >= truth);
  }
  CHECK(a.final_box.upper[0] >= b.final_box.lower[0]);
  CHECK(b.final_box.upper[0] >= a.final_box.lower[0]);
}

TEST_CASE("interval evaluation of the acc field is inclusion isotone") {
  const Dynamics plant = acc_dynamics();
  std::mt19937 rng(97);
  for (int trial = 0; trial < 50; ++trial) {
    const IntervalBox outer = random_box(rng, 6, 20.0, 5.0);
    // Shrink toward the center for a nested inner box.
    Eigen::VectorXd c = outer.center();
    const IntervalBox inner(c - 0.3 * (c - outer.lower),
                            c + 0.3 * (outer.upper - c));
    const IntervalBox u_outer = random_box(rng, 2, 1.0, 1.0);
    const IntervalBox u_inner = IntervalBox::point(u_outer.center());
    const IntervalBox fo = plant.vector_field_box(outer, u_outer);
    const IntervalBox fi = plant.vector_field_box(inner, u_inner);
    CHECK(fo.contains(fi));
  }
}

TEST_CASE("tube csv round-trip") {
  StepConfig cfg;
  cfg.dt = 0.25;
  const ReachTube tube = reach_ode_x(constant_zero_flow(), kNoInput,
                                     IntervalBox(vec({1.0}), vec({2.0})), 1.0, cfg);
  std::ostringstream os;
  write_csv(tube, os);
  std::istringstream is(os.str());
  const ReachTube back = read_tube_csv(is);
  REQUIRE(back.segments.size() == tube.segments.size());
  for (std::size_t i = 0; i < tube.segments.size(); ++i) {
    CHECK(back.segments[i].t_begin == tube.segments[i].t_begin);
    CHECK(back.segments[i].t_end == tube.segments[i].t_end);
    CHECK(same_box(back.segments[i].box, tube.segments[i].box));
  }
}
