#include "nnmr/acc.hpp"

#include <cmath>
#include <utility>

#include "nnmr/errors.hpp"

namespace nnmr {

namespace {

// Shared body for point and interval evaluation; S is double or Interval.
template <class S>
std::vector<S> acc_rhs(double mu, const std::vector<S>& x,
                       const std::vector<S>& u) {
  std::vector<S> dx(6);
  dx[0] = x[1];
  dx[1] = x[2];
  dx[2] = x[2] * (-2.0) + u[0] * 2.0 - square(x[1]) * mu;
  dx[3] = x[4];
  dx[4] = x[5];
  dx[5] = x[5] * (-2.0) + u[1] * 2.0 - square(x[4]) * mu;
  return dx;
}

template <class S>
std::vector<S> acc_outputs(const std::vector<S>& x) {
  std::vector<S> y(3);
  y[0] = x[4];          // ego velocity
  y[1] = x[0] - x[3];   // relative distance
  y[2] = x[1] - x[4];   // relative velocity
  return y;
}

}  // namespace

Dynamics acc_dynamics(double mu) {
  auto f = [mu](const auto& x, const auto& u) { return acc_rhs(mu, x, u); };
  auto h = [](const auto& x) { return acc_outputs(x); };
  return make_dynamics(6, 2, f, h);
}

Dynamics acc_plant_fixed_lead(double mu, double lead_accel) {
  auto f = [mu, lead_accel](const auto& x, const auto& u) {
    using S = typename std::decay_t<decltype(x)>::value_type;
    std::vector<S> full_u(2);
    full_u[0] = S(lead_accel);
    full_u[1] = u[0];
    return acc_rhs(mu, x, full_u);
  };
  auto h = [](const auto& x) { return acc_outputs(x); };
  return make_dynamics(6, 1, f, h);
}

ControllerInputLayout acc_input_layout() {
  using Source = TauComponent::Source;
  return {{Source::reference, 0},   // v_set
          {Source::reference, 1},   // t_gap
          {Source::output, 0},      // v_e
          {Source::output, 1},      // d_rel
          {Source::output, 2}};     // v_rel
}

namespace {

// clamp(w.x + c, lo, hi) as a relu network with the given hidden widths:
// lo + relu(s - lo) - relu(s - hi) in the first two channels, identity relu
// pass-through (both channels stay nonnegative) to the requested depth.
Network build_clamp_network(const Eigen::RowVectorXd& s_coeffs, double s_bias,
                            double lo, double hi,
                            const std::vector<int>& hidden_widths) {
  if (hidden_widths.empty())
    throw PreconditionError("clamp synthesis needs at least one hidden layer");
  for (int w : hidden_widths)
    if (w < 2)
      throw PreconditionError("clamp synthesis needs hidden widths >= 2");
  if (!(lo < hi))
    throw PreconditionError("clamp synthesis: lower bound must be below upper");

  Network net;
  net.input_dim = s_coeffs.size();

  Eigen::MatrixXd w1 = Eigen::MatrixXd::Zero(hidden_widths[0], net.input_dim);
  Eigen::VectorXd b1 = Eigen::VectorXd::Zero(hidden_widths[0]);
  w1.row(0) = s_coeffs;
  w1.row(1) = s_coeffs;
  b1[0] = s_bias - lo;
  b1[1] = s_bias - hi;
  net.layers.emplace_back(std::move(w1), std::move(b1), Activation::relu);

  for (std::size_t l = 1; l < hidden_widths.size(); ++l) {
    Eigen::MatrixXd w =
        Eigen::MatrixXd::Zero(hidden_widths[l], hidden_widths[l - 1]);
    w(0, 0) = 1.0;
    w(1, 1) = 1.0;
    net.layers.emplace_back(std::move(w),
                            Eigen::VectorXd::Zero(hidden_widths[l]),
                            Activation::relu);
  }

  Eigen::MatrixXd wo = Eigen::MatrixXd::Zero(1, hidden_widths.back());
  wo(0, 0) = 1.0;
  wo(0, 1) = -1.0;
  Eigen::VectorXd bo(1);
  bo << lo;
  net.layers.emplace_back(std::move(wo), std::move(bo), Activation::linear);
  return net;
}

Eigen::RowVectorXd acc_law_coeffs(const AccScenarioOptions& opts) {
  // s = gain_v (v_set - v_e) + gain_d (d_rel - d_def - t_gap v_e) over
  // tau = (v_set, t_gap, v_e, d_rel, v_rel); t_gap enters as a constant, so
  // its input channel carries a zero weight and the layout stays the full
  // five-component vector.
  Eigen::RowVectorXd s_coeffs(5);
  s_coeffs << opts.gain_v, 0.0, -opts.gain_v - opts.gain_d * opts.t_gap,
      opts.gain_d, 0.0;
  return s_coeffs;
}

}  // namespace

Network acc_reference_controller(const AccScenarioOptions& opts) {
  if (opts.hidden_layers < 1)
    throw PreconditionError("acc controller synthesis needs a hidden layer");
  const std::vector<int> widths(static_cast<std::size_t>(opts.hidden_layers),
                                opts.hidden_width);
  return build_clamp_network(acc_law_coeffs(opts),
                             -opts.gain_d * opts.d_def, opts.accel_min,
                             opts.accel_max, widths);
}

SafetySpec acc_safety_spec(double t_gap, double d_def) {
  // Unsafe when d_rel <= d_def + t_gap v_e; over the state vector this is
  // x_l - x_e - t_gap v_e <= d_def.
  Eigen::VectorXd coeffs(6);
  coeffs << 1.0, 0.0, 0.0, -1.0, -t_gap, 0.0;
  UnsafeRegion region;
  region.description = "relative distance at or below safe threshold";
  region.inequalities.push_back({std::move(coeffs), d_def});
  SafetySpec spec;
  spec.unsafe.push_back(std::move(region));
  return spec;
}

Scenario acc_scenario(const AccScenarioOptions& opts) {
  Scenario sc;
  sc.system.plant = acc_plant_fixed_lead(opts.mu, opts.lead_accel);
  sc.system.controller = acc_reference_controller(opts);
  sc.system.sampling_period = opts.sampling_period;
  sc.system.input_layout = acc_input_layout();

  Eigen::VectorXd ref(2);
  ref << opts.v_set, opts.t_gap;
  sc.system.reference_box = IntervalBox::point(ref);

  Eigen::VectorXd lo(6), hi(6);
  lo << 94.0, 30.0, 0.0, 10.0, 30.0, 0.0;
  hi << 96.0, 30.2, 0.0, 11.0, 30.2, 0.0;
  sc.initial_set = IntervalBox(std::move(lo), std::move(hi));

  sc.safety = acc_safety_spec(opts.t_gap, opts.d_def);
  sc.horizon = opts.horizon;
  return sc;
}

IntervalBox acc_default_precision_domain(const AccScenarioOptions& opts) {
  // Degenerate in the reference components, generous in the plant outputs:
  // wide enough to contain every controller input box of the benchmark tube.
  Eigen::VectorXd lo(5), hi(5);
  lo << opts.v_set, opts.t_gap, -420.0, -420.0, -900.0;
  hi << opts.v_set, opts.t_gap, 480.0, 570.0, 900.0;
  return IntervalBox(std::move(lo), std::move(hi));
}

// All cells go to the two components both controllers actually read; the
// sparsified student ignores v_rel, so that wide dimension needs no splits.
std::vector<int> acc_default_precision_splits() { return {1, 1, 3200, 1600, 1}; }

AccReduction attach_reduced_acc_controller(Scenario& scenario,
                                           const AccReductionOptions& opts) {
  IntervalBox domain =
      opts.domain.dim() == 5 ? opts.domain : acc_default_precision_domain();
  // The reference components are constants in operation; pin them to the
  // scenario's actual reference values so the runtime domain check matches.
  domain.lower[0] = scenario.system.reference_box.lower[0];
  domain.upper[0] = scenario.system.reference_box.upper[0];
  domain.lower[1] = scenario.system.reference_box.lower[1];
  domain.upper[1] = scenario.system.reference_box.upper[1];
  std::vector<int> splits = opts.precision_splits.empty()
                                ? acc_default_precision_splits()
                                : opts.precision_splits;

  DistillOptions dopts;
  dopts.epochs = opts.distill_epochs;
  dopts.learning_rate = opts.learning_rate;
  if (opts.init_from_law) {
    // Seed the student at a reduced-form synthesis of the teacher's own law,
    // read back off the teacher's weights. The closed-loop width dynamics
    // amplify any residual fit error by two to three orders of magnitude
    // before it returns as required precision-domain growth, so the
    // benchmark needs the student's plateaus exactly flat.
    const Network& teacher = scenario.system.controller;
    const Eigen::RowVectorXd s_coeffs = teacher.layers.front().weights.row(0);
    const double clamp_lo = teacher.layers.back().bias[0];
    const double s_bias = teacher.layers.front().bias[0] + clamp_lo;
    const double clamp_hi = s_bias - teacher.layers.front().bias[1];
    dopts.init = build_clamp_network(s_coeffs, s_bias, clamp_lo, clamp_hi,
                                     opts.reduced_hidden);
  }
  AccReduction red;
  red.distill = distill(scenario.system.controller, opts.reduced_hidden,
                        domain, opts.distill_samples, opts.seed, dopts);
  red.reduced = red.distill.net;

  // Input sparsification: where the reference controller provably ignores an
  // input (an exactly-zero first-layer column), the student's residual
  // weights there are training noise. Zeroing them keeps the precision
  // computation from paying interval width for components neither network
  // uses; the precision below is computed for the sparsified network, so the
  // guarantee is unaffected.
  const Eigen::MatrixXd& teacher_w1 = scenario.system.controller.layers[0].weights;
  for (Eigen::Index c = 0; c < teacher_w1.cols(); ++c)
    if (teacher_w1.col(c).isZero(0.0))
      red.reduced.layers[0].weights.col(c).setZero();

  PartitionConfig pcfg = PartitionConfig::uniform_splits(splits);
  pcfg.cell_cap = opts.precision_cell_cap;
  red.precision =
      precision_report(scenario.system.controller, red.reduced, domain, pcfg,
                       opts.precision_samples, opts.seed + 1);

  scenario.system.reduced_controller = red.reduced;
  scenario.system.precision = red.precision.precision;
  return red;
}

}  // namespace nnmr
