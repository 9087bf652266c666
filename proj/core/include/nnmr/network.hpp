#pragma once

#include <Eigen/Dense>

#include <string>
#include <vector>

#include "nnmr/interval.hpp"

namespace nnmr {

enum class Activation { relu, linear };

const char* to_string(Activation a);

inline double apply(Activation a, double x) {
  return a == Activation::relu ? (x > 0.0 ? x : 0.0) : x;
}

// Both activations are monotone, so the interval image is the image of the
// endpoints.
inline Interval apply(Activation a, const Interval& x) {
  return a == Activation::relu
             ? Interval{x.lo > 0.0 ? x.lo : 0.0, x.hi > 0.0 ? x.hi : 0.0}
             : x;
}

// Dense layer y = act(W x + b). Activations are stored per neuron so that
// layers mixing relu rows with linear pass-through rows are first-class
// values rather than a special case.
struct Layer {
  Eigen::MatrixXd weights;
  Eigen::VectorXd bias;
  std::vector<Activation> activations;

  Layer() = default;
  Layer(Eigen::MatrixXd w, Eigen::VectorXd b, Activation uniform);
  Layer(Eigen::MatrixXd w, Eigen::VectorXd b, std::vector<Activation> acts);

  Eigen::Index in_dim() const { return weights.cols(); }
  Eigen::Index out_dim() const { return weights.rows(); }
  bool uniform_activation() const;
};

// Feedforward network: ordered layers plus the declared input width.
struct Network {
  Eigen::Index input_dim = 0;
  std::vector<Layer> layers;

  Network() = default;
  Network(Eigen::Index in_dim, std::vector<Layer> ls)
      : input_dim(in_dim), layers(std::move(ls)) {}

  Eigen::Index layer_count() const {
    return static_cast<Eigen::Index>(layers.size());
  }
  Eigen::Index output_dim() const {
    return layers.empty() ? 0 : layers.back().out_dim();
  }
};

// Forward pass. Throws ShapeError when x does not match input_dim.
Eigen::VectorXd eval(const Network& net, const Eigen::VectorXd& x);

struct ValidationFinding {
  std::string where;  // "layers[2].bias" etc.
  std::string what;
};

// Empty report == well-formed. Never throws, even on badly malformed values.
using ValidationReport = std::vector<ValidationFinding>;
ValidationReport validate(const Network& net);

// Upper bound on the inf-norm Lipschitz constant: product of max absolute
// row sums. relu and linear are both 1-Lipschitz componentwise.
double lipschitz_upper_bound(const Network& net);

}  // namespace nnmr
