#pragma once

#include "nnmr/interval.hpp"
#include "nnmr/network.hpp"
#include "nnmr/nn_reach.hpp"

namespace nnmr {

enum class Norm { inf };

// Guaranteed upper bound on the output distance between a network and its
// reduced-size replacement over a given input set, together with how it was
// measured.
struct Precision {
  double rho = 0.0;
  Norm norm = Norm::inf;
  PartitionConfig partition_used;
  IntervalBox input_set;
};

// Radius used when growing reduced-network output sets. sound_full_rho pads
// by rho, which follows from the distance bound; paper_half_rho pads by
// rho/2 and is kept behind this switch for fidelity experiments.
enum class InflationMode { sound_full_rho, paper_half_rho };

double inflation_radius(double rho, InflationMode mode);

// Builds a single network whose output equals full(x) - reduced(x) for every
// shared input x. The two networks run side by side in block rows: the first
// layer stacks both first layers on the shared input, interior layers are
// block-diagonal, the shorter network is extended with linear identity
// pass-through blocks until the depths line up, the last block layer combines
// the two output layers, and a final [I, -I] linear layer takes the
// difference.
//
// Requires matching input widths, matching output widths, and
// full.layer_count() >= reduced.layer_count(); violations raise
// PreconditionError naming the failed clause.
Network augment(const Network& full, const Network& reduced);

// rho = sup of the inf-norm over a sound over-approximation of the difference
// network's output set: an upper bound on sup_{x in input} |full(x) -
// reduced(x)|_inf. Tightens as cfg splits finer.
Precision compute_precision(const Network& full, const Network& reduced,
                            const IntervalBox& input,
                            const PartitionConfig& cfg);

struct PrecisionReport {
  Precision precision;
  std::size_t cell_count = 0;
  // Max sampled |full(x) - reduced(x)|_inf: a lower bound on the true
  // distance, reported so interval looseness is visible next to rho.
  double sampled_lower_bound = 0.0;
  double wall_seconds = 0.0;
};

PrecisionReport precision_report(const Network& full, const Network& reduced,
                                 const IntervalBox& input,
                                 const PartitionConfig& cfg,
                                 int sample_count = 1000, unsigned seed = 0);

// Grows every box componentwise by the mode's radius. The inf-norm ball makes
// the Minkowski sum of a box and the ball a box again.
BoxUnion inflate(const BoxUnion& sets, const Precision& p, InflationMode mode);

}  // namespace nnmr
