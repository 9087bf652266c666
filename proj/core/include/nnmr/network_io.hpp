#pragma once

#include <iosfwd>
#include <string>

#include "nnmr/network.hpp"

namespace nnmr {

// Versioned JSON network format.
//
// Version 1 (uniform activation per layer):
//   {"format": 1, "input_dim": 2,
//    "layers": [{"weights": [[...], ...], "bias": [...], "activation": "relu"}]}
//
// Version 2 additionally allows a per-neuron activation array:
//   "activation": ["relu", "relu", "linear"]
//
// Numbers are written as shortest round-trip decimals, so save/load is
// value-exact. save_network picks version 1 when every layer is uniform and
// version 2 otherwise.

Network load_network(const std::string& path);
Network parse_network(std::istream& in, const std::string& context);

void save_network(const Network& net, const std::string& path);
void write_network(const Network& net, std::ostream& out);

}  // namespace nnmr
