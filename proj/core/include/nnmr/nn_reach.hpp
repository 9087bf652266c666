#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "nnmr/interval.hpp"
#include "nnmr/network.hpp"

namespace nnmr {

// How an input box is partitioned before interval propagation. Tightness of
// the interval method is bought with splitting, so the cell budget is an
// explicit, capped resource.
struct PartitionConfig {
  enum class Mode { uniform, bisection };

  Mode mode = Mode::uniform;

  // uniform: explicit per-dimension split counts. A single entry broadcasts
  // to every dimension; empty defers to max_cell_width (or one cell).
  std::vector<int> splits_per_dim;
  std::optional<double> max_cell_width;

  // bisection: every non-degenerate dimension is halved `depth` times,
  // i.e. 2^depth cells per dimension.
  int bisection_depth = 0;

  std::size_t cell_cap = 1000000;

  static PartitionConfig single_cell() { return {}; }
  static PartitionConfig uniform_splits(std::vector<int> splits);
  static PartitionConfig width_driven(double max_width);
  static PartitionConfig bisection_to_depth(int depth);
};

// Resolved split counts for a given box. Zero-width dimensions are never
// split. Throws BudgetError when the cell total exceeds cfg.cell_cap.
std::vector<int> partition_counts(const IntervalBox& box,
                                  const PartitionConfig& cfg);

std::size_t cell_total(const std::vector<int>& counts);

// Cell of the uniform grid addressed by flat lexicographic index (dimension 0
// is the most significant digit). Cell 0 starts at box.lower; the last cell
// along each dimension ends exactly at box.upper.
IntervalBox partition_cell(const IntervalBox& box,
                           const std::vector<int>& counts, std::size_t flat);

// Exact interval image of one dense layer: the affine part splits W into
// positive and negative parts so each output bound is attained at a corner,
// then the monotone activation maps the endpoints.
IntervalBox interval_layer(const Layer& layer, const IntervalBox& in);

// Sound output range over-approximation: partitions `input` per cfg and
// propagates every cell through the network. Box k corresponds to cell k in
// lexicographic grid order, so results are reproducible and parallel merges
// would be order-independent.
BoxUnion reach_nn(const Network& net, const IntervalBox& input,
                  const PartitionConfig& cfg);

// Componentwise min of lowers / max of uppers. Throws on an empty union.
IntervalBox hull(const BoxUnion& u);

namespace detail {

// Per-layer positive/negative weight split, cached so that propagating many
// cells does not redo it.
struct PreparedLayer {
  Eigen::MatrixXd wpos;
  Eigen::MatrixXd wneg;
  Eigen::VectorXd bias;
  const std::vector<Activation>* activations = nullptr;
};

struct PreparedNetwork {
  std::vector<PreparedLayer> layers;
  Eigen::Index max_width = 0;
};

// Ping-pong bound buffers reused across cells; propagation over millions of
// cells is allocation-free.
struct PropagateScratch {
  Eigen::VectorXd lo_a, hi_a, lo_b, hi_b;
  void resize(Eigen::Index width);
};

PreparedNetwork prepare(const Network& net);
IntervalBox propagate(const PreparedNetwork& pnet, const IntervalBox& cell,
                      PropagateScratch& scratch);
IntervalBox propagate(const PreparedNetwork& pnet, const IntervalBox& cell);

// Hull of the per-cell output boxes without materializing them. Identical to
// hull(reach_nn(...)) value for value.
IntervalBox propagate_hull(const PreparedNetwork& pnet,
                           const IntervalBox& input,
                           const std::vector<int>& counts,
                           PropagateScratch& scratch);

}  // namespace detail

}  // namespace nnmr
