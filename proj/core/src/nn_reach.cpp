#include "nnmr/nn_reach.hpp"

#include <cmath>
#include <string>

#include "nnmr/errors.hpp"

namespace nnmr {

PartitionConfig PartitionConfig::uniform_splits(std::vector<int> splits) {
  PartitionConfig cfg;
  cfg.splits_per_dim = std::move(splits);
  return cfg;
}

PartitionConfig PartitionConfig::width_driven(double max_width) {
  PartitionConfig cfg;
  cfg.max_cell_width = max_width;
  return cfg;
}

PartitionConfig PartitionConfig::bisection_to_depth(int depth) {
  PartitionConfig cfg;
  cfg.mode = Mode::bisection;
  cfg.bisection_depth = depth;
  return cfg;
}

std::vector<int> partition_counts(const IntervalBox& box,
                                  const PartitionConfig& cfg) {
  const auto d = static_cast<std::size_t>(box.dim());
  std::vector<int> counts(d, 1);

  if (cfg.mode == PartitionConfig::Mode::bisection) {
    if (cfg.bisection_depth < 0)
      throw PreconditionError("partition: negative bisection depth");
    const int per_dim = 1 << cfg.bisection_depth;
    for (std::size_t i = 0; i < d; ++i) counts[i] = per_dim;
  } else if (!cfg.splits_per_dim.empty()) {
    if (cfg.splits_per_dim.size() != d && cfg.splits_per_dim.size() != 1)
      throw PreconditionError(
          "partition: splits_per_dim has " +
          std::to_string(cfg.splits_per_dim.size()) + " entries for a " +
          std::to_string(d) + "-dimensional box");
    for (std::size_t i = 0; i < d; ++i) {
      const int s = cfg.splits_per_dim.size() == 1 ? cfg.splits_per_dim[0]
                                                   : cfg.splits_per_dim[i];
      if (s <= 0) throw PreconditionError("partition: split count must be positive");
      counts[i] = s;
    }
  } else if (cfg.max_cell_width) {
    const double w = *cfg.max_cell_width;
    if (!(w > 0.0))
      throw PreconditionError("partition: max_cell_width must be positive");
    for (std::size_t i = 0; i < d; ++i) {
      const double width = box.upper[static_cast<Eigen::Index>(i)] -
                           box.lower[static_cast<Eigen::Index>(i)];
      counts[i] = std::max(1, static_cast<int>(std::ceil(width / w)));
    }
  }

  // A degenerate dimension is never split.
  for (std::size_t i = 0; i < d; ++i)
    if (box.lower[static_cast<Eigen::Index>(i)] ==
        box.upper[static_cast<Eigen::Index>(i)])
      counts[i] = 1;

  std::size_t total = 1;
  for (int c : counts) {
    if (total > cfg.cell_cap / static_cast<std::size_t>(c))
      throw BudgetError("partition: cell count exceeds cap of " +
                        std::to_string(cfg.cell_cap));
    total *= static_cast<std::size_t>(c);
  }
  return counts;
}

std::size_t cell_total(const std::vector<int>& counts) {
  std::size_t total = 1;
  for (int c : counts) total *= static_cast<std::size_t>(c);
  return total;
}

IntervalBox partition_cell(const IntervalBox& box,
                           const std::vector<int>& counts, std::size_t flat) {
  const auto d = static_cast<Eigen::Index>(counts.size());
  Eigen::VectorXd lo(d), hi(d);
  // Dimension 0 is the most significant digit of the flat index.
  std::size_t rest = flat;
  for (Eigen::Index i = d - 1; i >= 0; --i) {
    const int s = counts[static_cast<std::size_t>(i)];
    const int k = static_cast<int>(rest % static_cast<std::size_t>(s));
    rest /= static_cast<std::size_t>(s);
    const double a = box.lower[i];
    const double b = box.upper[i];
    const double width = b - a;
    // Shared boundaries are evaluated with one formula so adjacent cells meet
    // exactly; the outermost boundaries snap to the box bounds.
    lo[i] = k == 0 ? a : a + width * (static_cast<double>(k) / s);
    hi[i] = k == s - 1 ? b : a + width * (static_cast<double>(k + 1) / s);
  }
  return IntervalBox(std::move(lo), std::move(hi));
}

IntervalBox interval_layer(const Layer& layer, const IntervalBox& in) {
  if (in.dim() != layer.in_dim())
    throw ShapeError("interval_layer: box has dimension " +
                     std::to_string(in.dim()) + ", layer expects " +
                     std::to_string(layer.in_dim()));
  // Same accumulation order as detail::propagate, so single-layer calls and
  // whole-network propagation agree bit for bit.
  const Eigen::MatrixXd wpos = layer.weights.cwiseMax(0.0);
  const Eigen::MatrixXd wneg = layer.weights.cwiseMin(0.0);

  Eigen::VectorXd lo = wpos * in.lower;
  lo.noalias() += wneg * in.upper;
  lo += layer.bias;
  Eigen::VectorXd hi = wpos * in.upper;
  hi.noalias() += wneg * in.lower;
  hi += layer.bias;
  for (Eigen::Index i = 0; i < lo.size(); ++i) {
    const Interval img =
        apply(layer.activations[static_cast<std::size_t>(i)], {lo[i], hi[i]});
    lo[i] = img.lo;
    hi[i] = img.hi;
  }
  return IntervalBox(std::move(lo), std::move(hi));
}

namespace detail {

PreparedNetwork prepare(const Network& net) {
  PreparedNetwork pnet;
  pnet.layers.reserve(net.layers.size());
  pnet.max_width = net.input_dim;
  for (const Layer& layer : net.layers) {
    PreparedLayer p;
    p.wpos = layer.weights.cwiseMax(0.0);
    p.wneg = layer.weights.cwiseMin(0.0);
    p.bias = layer.bias;
    p.activations = &layer.activations;
    pnet.max_width = std::max(pnet.max_width, layer.weights.rows());
    pnet.layers.push_back(std::move(p));
  }
  return pnet;
}

void PropagateScratch::resize(Eigen::Index width) {
  lo_a.resize(width);
  hi_a.resize(width);
  lo_b.resize(width);
  hi_b.resize(width);
}

IntervalBox propagate(const PreparedNetwork& pnet, const IntervalBox& cell,
                      PropagateScratch& s) {
  if (s.lo_a.size() < pnet.max_width) s.resize(pnet.max_width);
  Eigen::Index width = cell.dim();
  s.lo_a.head(width) = cell.lower;
  s.hi_a.head(width) = cell.upper;
  Eigen::VectorXd* lo = &s.lo_a;
  Eigen::VectorXd* hi = &s.hi_a;
  Eigen::VectorXd* nlo = &s.lo_b;
  Eigen::VectorXd* nhi = &s.hi_b;
  for (const PreparedLayer& p : pnet.layers) {
    const Eigen::Index rows = p.wpos.rows();
    nlo->head(rows).noalias() = p.wpos * lo->head(width);
    nlo->head(rows).noalias() += p.wneg * hi->head(width);
    nlo->head(rows) += p.bias;
    nhi->head(rows).noalias() = p.wpos * hi->head(width);
    nhi->head(rows).noalias() += p.wneg * lo->head(width);
    nhi->head(rows) += p.bias;
    for (Eigen::Index i = 0; i < rows; ++i) {
      if ((*p.activations)[static_cast<std::size_t>(i)] == Activation::relu) {
        if ((*nlo)[i] < 0.0) (*nlo)[i] = 0.0;
        if ((*nhi)[i] < 0.0) (*nhi)[i] = 0.0;
      }
    }
    std::swap(lo, nlo);
    std::swap(hi, nhi);
    width = rows;
  }
  return IntervalBox(lo->head(width), hi->head(width));
}

IntervalBox propagate(const PreparedNetwork& pnet, const IntervalBox& cell) {
  PropagateScratch scratch;
  return propagate(pnet, cell, scratch);
}

IntervalBox propagate_hull(const PreparedNetwork& pnet,
                           const IntervalBox& input,
                           const std::vector<int>& counts,
                           PropagateScratch& scratch) {
  const std::size_t total = cell_total(counts);
  IntervalBox acc = propagate(pnet, partition_cell(input, counts, 0), scratch);
  for (std::size_t flat = 1; flat < total; ++flat) {
    const IntervalBox out =
        propagate(pnet, partition_cell(input, counts, flat), scratch);
    acc.lower = acc.lower.cwiseMin(out.lower);
    acc.upper = acc.upper.cwiseMax(out.upper);
  }
  return acc;
}

}  // namespace detail

BoxUnion reach_nn(const Network& net, const IntervalBox& input,
                  const PartitionConfig& cfg) {
  if (input.dim() != net.input_dim)
    throw ShapeError("reach_nn: input box has dimension " +
                     std::to_string(input.dim()) + ", network expects " +
                     std::to_string(net.input_dim));
  const std::vector<int> counts = partition_counts(input, cfg);
  const std::size_t total = cell_total(counts);
  const detail::PreparedNetwork pnet = detail::prepare(net);

  BoxUnion out;
  out.boxes.reserve(total);
  detail::PropagateScratch scratch;
  // Cells are pure and independent; any parallel schedule merging by flat
  // index would produce this exact vector.
  for (std::size_t flat = 0; flat < total; ++flat)
    out.boxes.push_back(
        detail::propagate(pnet, partition_cell(input, counts, flat), scratch));
  return out;
}

IntervalBox hull(const BoxUnion& u) {
  if (u.empty()) throw ShapeError("hull: empty box union");
  IntervalBox acc = u.boxes.front();
  for (std::size_t i = 1; i < u.boxes.size(); ++i)
    acc = hull(acc, u.boxes[i]);
  return acc;
}

}  // namespace nnmr
