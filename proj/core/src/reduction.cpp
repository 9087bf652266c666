#include "nnmr/reduction.hpp"

#include <chrono>
#include <random>
#include <string>

#include "nnmr/errors.hpp"

namespace nnmr {

double inflation_radius(double rho, InflationMode mode) {
  return mode == InflationMode::sound_full_rho ? rho : 0.5 * rho;
}

namespace {

// [A; B] on a shared input.
Layer stack_layers(const Layer& top, const Layer& bottom) {
  Eigen::MatrixXd w(top.out_dim() + bottom.out_dim(), top.in_dim());
  w.topRows(top.out_dim()) = top.weights;
  w.bottomRows(bottom.out_dim()) = bottom.weights;
  Eigen::VectorXd b(top.out_dim() + bottom.out_dim());
  b << top.bias, bottom.bias;
  std::vector<Activation> acts = top.activations;
  acts.insert(acts.end(), bottom.activations.begin(),
              bottom.activations.end());
  return Layer(std::move(w), std::move(b), std::move(acts));
}

Layer block_diag(const Layer& top, const Layer& bottom) {
  Eigen::MatrixXd w = Eigen::MatrixXd::Zero(top.out_dim() + bottom.out_dim(),
                                            top.in_dim() + bottom.in_dim());
  w.topLeftCorner(top.out_dim(), top.in_dim()) = top.weights;
  w.bottomRightCorner(bottom.out_dim(), bottom.in_dim()) = bottom.weights;
  Eigen::VectorXd b(top.out_dim() + bottom.out_dim());
  b << top.bias, bottom.bias;
  std::vector<Activation> acts = top.activations;
  acts.insert(acts.end(), bottom.activations.begin(),
              bottom.activations.end());
  return Layer(std::move(w), std::move(b), std::move(acts));
}

// Linear identity block: carries a value unchanged through one layer.
Layer identity_passthrough(Eigen::Index n) {
  return Layer(Eigen::MatrixXd::Identity(n, n), Eigen::VectorXd::Zero(n),
               Activation::linear);
}

}  // namespace

Network augment(const Network& full, const Network& reduced) {
  if (full.input_dim != reduced.input_dim)
    throw PreconditionError(
        "augment: number of inputs differs (" +
        std::to_string(full.input_dim) + " vs " +
        std::to_string(reduced.input_dim) + ")");
  if (full.output_dim() != reduced.output_dim())
    throw PreconditionError(
        "augment: number of outputs differs (" +
        std::to_string(full.output_dim()) + " vs " +
        std::to_string(reduced.output_dim()) + ")");
  const Eigen::Index depth = full.layer_count();
  const Eigen::Index rdepth = reduced.layer_count();
  if (rdepth > depth)
    throw PreconditionError(
        "augment: reduced network has more layers than the full network (" +
        std::to_string(rdepth) + " vs " + std::to_string(depth) + ")");

  const Eigen::Index out = full.output_dim();

  Network aug;
  aug.input_dim = full.input_dim;
  aug.layers.reserve(static_cast<std::size_t>(depth) + 1);

  if (depth == 1) {
    // Both networks are a single (output) layer on the shared input.
    aug.layers.push_back(stack_layers(full.layers[0], reduced.layers[0]));
  } else {
    // Width of the bottom block while it idles between its last hidden layer
    // and the combined output layer.
    const Eigen::Index carried =
        rdepth >= 2 ? reduced.layers[static_cast<std::size_t>(rdepth) - 2]
                          .out_dim()
                    : reduced.input_dim;

    if (rdepth >= 2) {
      aug.layers.push_back(stack_layers(full.layers[0], reduced.layers[0]));
    } else {
      // A single-layer reduced network keeps the raw input alive until the
      // output layer consumes it.
      aug.layers.push_back(
          stack_layers(full.layers[0], identity_passthrough(carried)));
    }

    for (Eigen::Index l = 2; l <= depth - 1; ++l) {
      const Layer& top = full.layers[static_cast<std::size_t>(l) - 1];
      if (l <= rdepth - 1)
        aug.layers.push_back(
            block_diag(top, reduced.layers[static_cast<std::size_t>(l) - 1]));
      else
        aug.layers.push_back(block_diag(top, identity_passthrough(carried)));
    }

    aug.layers.push_back(
        block_diag(full.layers[static_cast<std::size_t>(depth) - 1],
                   reduced.layers[static_cast<std::size_t>(rdepth) - 1]));
  }

  // Comparison layer: output = top block - bottom block.
  Eigen::MatrixXd w(out, 2 * out);
  w << Eigen::MatrixXd::Identity(out, out),
      -Eigen::MatrixXd::Identity(out, out);
  aug.layers.push_back(
      Layer(std::move(w), Eigen::VectorXd::Zero(out), Activation::linear));
  return aug;
}

Precision compute_precision(const Network& full, const Network& reduced,
                            const IntervalBox& input,
                            const PartitionConfig& cfg) {
  if (input.dim() != full.input_dim)
    throw ShapeError("precision: input box has dimension " +
                     std::to_string(input.dim()) + ", networks expect " +
                     std::to_string(full.input_dim));
  const Network diff_net = augment(full, reduced);

  // Streamed equivalent of hull-of-reach_nn: partitions routinely run to
  // millions of cells here, so boxes are folded into the running max instead
  // of being materialized.
  const std::vector<int> counts = partition_counts(input, cfg);
  const std::size_t total = cell_total(counts);
  const detail::PreparedNetwork pnet = detail::prepare(diff_net);
  detail::PropagateScratch scratch;
  double rho = 0.0;
  for (std::size_t flat = 0; flat < total; ++flat) {
    const IntervalBox out =
        detail::propagate(pnet, partition_cell(input, counts, flat), scratch);
    for (Eigen::Index i = 0; i < out.dim(); ++i)
      rho = std::max(rho, out.component(i).mag());
  }

  Precision p;
  p.rho = rho;
  p.norm = Norm::inf;
  p.partition_used = cfg;
  p.input_set = input;
  return p;
}

PrecisionReport precision_report(const Network& full, const Network& reduced,
                                 const IntervalBox& input,
                                 const PartitionConfig& cfg, int sample_count,
                                 unsigned seed) {
  const auto start = std::chrono::steady_clock::now();
  PrecisionReport report;
  report.precision = compute_precision(full, reduced, input, cfg);
  report.cell_count = cell_total(partition_counts(input, cfg));

  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  Eigen::VectorXd x(input.dim());
  double lower_bound = 0.0;
  for (int s = 0; s < sample_count; ++s) {
    for (Eigen::Index i = 0; i < input.dim(); ++i)
      x[i] = input.lower[i] + (input.upper[i] - input.lower[i]) * unit(rng);
    const double diff =
        (eval(full, x) - eval(reduced, x)).lpNorm<Eigen::Infinity>();
    lower_bound = std::max(lower_bound, diff);
  }
  report.sampled_lower_bound = lower_bound;
  report.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
          .count();
  return report;
}

BoxUnion inflate(const BoxUnion& sets, const Precision& p,
                 InflationMode mode) {
  const double radius = inflation_radius(p.rho, mode);
  BoxUnion out;
  out.boxes.reserve(sets.boxes.size());
  for (const IntervalBox& box : sets.boxes) out.boxes.push_back(pad(box, radius));
  return out;
}

}  // namespace nnmr
