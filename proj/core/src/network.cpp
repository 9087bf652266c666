#include "nnmr/network.hpp"

#include <cmath>
#include <string>

#include "nnmr/errors.hpp"

namespace nnmr {

const char* to_string(Activation a) {
  return a == Activation::relu ? "relu" : "linear";
}

Layer::Layer(Eigen::MatrixXd w, Eigen::VectorXd b, Activation uniform)
    : weights(std::move(w)),
      bias(std::move(b)),
      activations(static_cast<std::size_t>(weights.rows()), uniform) {}

Layer::Layer(Eigen::MatrixXd w, Eigen::VectorXd b,
             std::vector<Activation> acts)
    : weights(std::move(w)), bias(std::move(b)), activations(std::move(acts)) {}

bool Layer::uniform_activation() const {
  for (std::size_t i = 1; i < activations.size(); ++i)
    if (activations[i] != activations[0]) return false;
  return true;
}

Eigen::VectorXd eval(const Network& net, const Eigen::VectorXd& x) {
  if (x.size() != net.input_dim)
    throw ShapeError("eval: input has length " + std::to_string(x.size()) +
                     ", network expects " + std::to_string(net.input_dim));
  Eigen::VectorXd v = x;
  for (const Layer& layer : net.layers) {
    if (layer.weights.cols() != v.size())
      throw ShapeError("eval: layer expects width " +
                       std::to_string(layer.weights.cols()) + ", got " +
                       std::to_string(v.size()));
    Eigen::VectorXd z = layer.weights * v + layer.bias;
    for (Eigen::Index i = 0; i < z.size(); ++i)
      z[i] = apply(layer.activations[static_cast<std::size_t>(i)], z[i]);
    v = std::move(z);
  }
  return v;
}

namespace {

bool all_finite(const Eigen::MatrixXd& m) {
  return m.allFinite();
}

}  // namespace

ValidationReport validate(const Network& net) {
  ValidationReport report;
  auto flag = [&report](std::string where, std::string what) {
    report.push_back({std::move(where), std::move(what)});
  };

  if (net.input_dim <= 0) flag("input_dim", "must be positive");
  if (net.layers.empty()) flag("layers", "network needs at least one layer");

  Eigen::Index expected_cols = net.input_dim;
  for (std::size_t k = 0; k < net.layers.size(); ++k) {
    const Layer& layer = net.layers[k];
    const std::string where = "layers[" + std::to_string(k) + "]";
    if (layer.weights.rows() == 0)
      flag(where + ".weights", "layer has no rows");
    if (layer.bias.size() != layer.weights.rows())
      flag(where + ".bias",
           "length " + std::to_string(layer.bias.size()) + " does not match " +
               std::to_string(layer.weights.rows()) + " weight rows");
    if (static_cast<Eigen::Index>(layer.activations.size()) !=
        layer.weights.rows())
      flag(where + ".activations",
           "length " + std::to_string(layer.activations.size()) +
               " does not match " + std::to_string(layer.weights.rows()) +
               " weight rows");
    if (layer.weights.cols() != expected_cols)
      flag(where + ".weights",
           "expects input width " + std::to_string(expected_cols) + ", has " +
               std::to_string(layer.weights.cols()) + " columns");
    if (!all_finite(layer.weights))
      flag(where + ".weights", "contains NaN or Inf");
    if (!all_finite(layer.bias)) flag(where + ".bias", "contains NaN or Inf");
    expected_cols = layer.weights.rows();
  }
  return report;
}

double lipschitz_upper_bound(const Network& net) {
  double bound = 1.0;
  for (const Layer& layer : net.layers)
    bound *= layer.weights.cwiseAbs().rowwise().sum().maxCoeff();
  return bound;
}

}  // namespace nnmr
