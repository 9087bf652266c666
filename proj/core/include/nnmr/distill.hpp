#pragma once

#include <optional>
#include <vector>

#include "nnmr/interval.hpp"
#include "nnmr/network.hpp"

namespace nnmr {

struct DistillOptions {
  int epochs = 2000;
  double learning_rate = 1e-2;
  // Halve the learning rate this many times, evenly spaced over the run.
  int lr_decay_steps = 2;
  // Stop once the loss is this small.
  double convergence_mse = 1e-14;
  // Starting weights; defaults to seeded scaled-uniform initialization.
  std::optional<Network> init;
};

struct DistillResult {
  Network net;
  double initial_mse = 0.0;
  double final_mse = 0.0;
  int epochs_run = 0;
};

// Fits a smaller relu network (hidden widths `hidden_dims`, linear output) to
// the teacher's outputs on `sample_count` points drawn uniformly from
// train_box, by full-batch Adam on mean squared error. Fully deterministic
// for a fixed seed. No accuracy guarantee is implied: guarantees about the
// returned network come only from compute_precision.
DistillResult distill(const Network& teacher,
                      const std::vector<int>& hidden_dims,
                      const IntervalBox& train_box, int sample_count,
                      unsigned seed, const DistillOptions& opts = {});

}  // namespace nnmr
