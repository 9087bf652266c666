#include "nnmr/distill.hpp"

#include <cmath>
#include <random>
#include <string>

#include "nnmr/errors.hpp"

namespace nnmr {

namespace {

struct AdamState {
  std::vector<Eigen::MatrixXd> mw, vw;
  std::vector<Eigen::VectorXd> mb, vb;
};

Network glorot_init(Eigen::Index input_dim, const std::vector<int>& hidden,
                    Eigen::Index output_dim, std::mt19937& rng) {
  Network net;
  net.input_dim = input_dim;
  Eigen::Index fan_in = input_dim;
  auto draw = [&rng](Eigen::Index rows, Eigen::Index cols, double scale) {
    std::uniform_real_distribution<double> dist(-scale, scale);
    Eigen::MatrixXd m(rows, cols);
    for (Eigen::Index r = 0; r < rows; ++r)
      for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = dist(rng);
    return m;
  };
  for (int width : hidden) {
    const double scale = std::sqrt(6.0 / static_cast<double>(fan_in + width));
    net.layers.emplace_back(draw(width, fan_in, scale),
                            Eigen::VectorXd::Zero(width), Activation::relu);
    fan_in = width;
  }
  const double scale =
      std::sqrt(6.0 / static_cast<double>(fan_in + output_dim));
  net.layers.emplace_back(draw(output_dim, fan_in, scale),
                          Eigen::VectorXd::Zero(output_dim),
                          Activation::linear);
  return net;
}

double mse(const Eigen::MatrixXd& pred, const Eigen::MatrixXd& target) {
  return (pred - target).squaredNorm() /
         static_cast<double>(pred.rows() * pred.cols());
}

// Forward pass over a batch (one sample per column), keeping pre-activation
// signs for the backward pass.
Eigen::MatrixXd forward(const Network& net, const Eigen::MatrixXd& x,
                        std::vector<Eigen::MatrixXd>* post,
                        std::vector<Eigen::MatrixXd>* mask) {
  Eigen::MatrixXd a = x;
  post->clear();
  mask->clear();
  post->push_back(a);
  for (const Layer& layer : net.layers) {
    Eigen::MatrixXd z =
        (layer.weights * a).colwise() + layer.bias;
    Eigen::MatrixXd m = Eigen::MatrixXd::Ones(z.rows(), z.cols());
    for (Eigen::Index r = 0; r < z.rows(); ++r) {
      if (layer.activations[static_cast<std::size_t>(r)] != Activation::relu)
        continue;
      for (Eigen::Index c = 0; c < z.cols(); ++c) {
        if (z(r, c) <= 0.0) {
          z(r, c) = 0.0;
          m(r, c) = 0.0;
        }
      }
    }
    mask->push_back(std::move(m));
    a = std::move(z);
    post->push_back(a);
  }
  return a;
}

}  // namespace

DistillResult distill(const Network& teacher,
                      const std::vector<int>& hidden_dims,
                      const IntervalBox& train_box, int sample_count,
                      unsigned seed, const DistillOptions& opts) {
  if (sample_count <= 0)
    throw PreconditionError("distill: sample_count must be positive");
  if (train_box.dim() != teacher.input_dim)
    throw PreconditionError("distill: train_box dimension " +
                            std::to_string(train_box.dim()) +
                            " does not match teacher input " +
                            std::to_string(teacher.input_dim));
  for (int w : hidden_dims)
    if (w <= 0)
      throw PreconditionError("distill: hidden widths must be positive");
  const auto student_depth = static_cast<Eigen::Index>(hidden_dims.size()) + 1;
  if (student_depth > teacher.layer_count())
    throw PreconditionError(
        "distill: student would have " + std::to_string(student_depth) +
        " layers, teacher has " + std::to_string(teacher.layer_count()));

  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  const Eigen::Index in_dim = teacher.input_dim;
  const Eigen::Index out_dim = teacher.output_dim();

  // Training runs in normalized coordinates x' = (x - c) / r so random
  // initialization behaves the same at any physical input scale. The scale r
  // is snapped to powers of two so folding the transform back into the first
  // layer afterwards multiplies by exactly representable factors.
  Eigen::VectorXd center = train_box.center();
  Eigen::VectorXd scale(in_dim);
  for (Eigen::Index i = 0; i < in_dim; ++i) {
    const double hw = 0.5 * (train_box.upper[i] - train_box.lower[i]);
    scale[i] = hw > 0.0 ? std::exp2(std::round(std::log2(hw))) : 1.0;
  }

  Eigen::MatrixXd inputs(in_dim, sample_count);  // normalized
  Eigen::MatrixXd targets(out_dim, sample_count);
  for (int s = 0; s < sample_count; ++s) {
    Eigen::VectorXd x(in_dim);
    for (Eigen::Index i = 0; i < in_dim; ++i)
      x[i] = train_box.lower[i] +
             (train_box.upper[i] - train_box.lower[i]) * unit(rng);
    targets.col(s) = eval(teacher, x);
    inputs.col(s) = (x - center).cwiseQuotient(scale);
  }

  Network student;
  if (opts.init) {
    student = *opts.init;
    if (student.input_dim != in_dim || student.output_dim() != out_dim ||
        student.layer_count() != student_depth)
      throw PreconditionError(
          "distill: init network does not match the requested architecture");
    // Re-express the initial first layer in normalized coordinates.
    Layer& first = student.layers.front();
    first.bias += first.weights * center;
    first.weights = first.weights * scale.asDiagonal();
  } else {
    student = glorot_init(in_dim, hidden_dims, out_dim, rng);
  }

  const std::size_t nlayers = student.layers.size();
  AdamState adam;
  adam.mw.resize(nlayers);
  adam.vw.resize(nlayers);
  adam.mb.resize(nlayers);
  adam.vb.resize(nlayers);
  for (std::size_t l = 0; l < nlayers; ++l) {
    adam.mw[l] = Eigen::MatrixXd::Zero(student.layers[l].weights.rows(),
                                       student.layers[l].weights.cols());
    adam.vw[l] = adam.mw[l];
    adam.mb[l] = Eigen::VectorXd::Zero(student.layers[l].bias.size());
    adam.vb[l] = adam.mb[l];
  }

  const double beta1 = 0.9, beta2 = 0.999, eps = 1e-8;
  std::vector<Eigen::MatrixXd> post, mask;

  DistillResult result;
  result.initial_mse = mse(forward(student, inputs, &post, &mask), targets);

  double lr = opts.learning_rate;
  const int decay_every =
      opts.lr_decay_steps > 0 ? std::max(1, opts.epochs / (opts.lr_decay_steps + 1))
                              : opts.epochs + 1;
  double last = result.initial_mse;
  const double denom = static_cast<double>(sample_count * out_dim);

  int epochs_run = 0;
  for (int epoch = 1; epoch <= opts.epochs; ++epoch) {
    const Eigen::MatrixXd pred = forward(student, inputs, &post, &mask);
    last = mse(pred, targets);
    if (!std::isfinite(last))
      throw TrainingError("distill: loss became non-finite at epoch " +
                          std::to_string(epoch));
    if (last <= opts.convergence_mse) break;
    epochs_run = epoch;

    Eigen::MatrixXd delta = 2.0 * (pred - targets) / denom;
    for (auto l = static_cast<Eigen::Index>(nlayers) - 1; l >= 0; --l) {
      const auto lu = static_cast<std::size_t>(l);
      delta = delta.cwiseProduct(mask[lu]);
      const Eigen::MatrixXd grad_w = delta * post[lu].transpose();
      const Eigen::VectorXd grad_b = delta.rowwise().sum();
      if (l > 0) delta = student.layers[lu].weights.transpose() * delta;

      const double bc1 = 1.0 - std::pow(beta1, epoch);
      const double bc2 = 1.0 - std::pow(beta2, epoch);
      adam.mw[lu] = beta1 * adam.mw[lu] + (1.0 - beta1) * grad_w;
      adam.vw[lu] =
          beta2 * adam.vw[lu] + (1.0 - beta2) * grad_w.cwiseProduct(grad_w);
      adam.mb[lu] = beta1 * adam.mb[lu] + (1.0 - beta1) * grad_b;
      adam.vb[lu] =
          beta2 * adam.vb[lu] + (1.0 - beta2) * grad_b.cwiseProduct(grad_b);

      student.layers[lu].weights -=
          lr * (adam.mw[lu] / bc1)
                   .cwiseQuotient(((adam.vw[lu] / bc2).cwiseSqrt().array() + eps)
                                      .matrix());
      student.layers[lu].bias -=
          lr * (adam.mb[lu] / bc1)
                   .cwiseQuotient(((adam.vb[lu] / bc2).cwiseSqrt().array() + eps)
                                      .matrix());
    }
    if (epoch % decay_every == 0) lr *= 0.5;
  }

  result.final_mse = mse(forward(student, inputs, &post, &mask), targets);
  result.epochs_run = epochs_run;
  // Divergence gate: a run that ends meaningfully above where it started has
  // failed. The absolute floor ignores optimizer noise around an already
  // perfect initialization.
  if (!std::isfinite(result.final_mse) ||
      (opts.epochs > 0 &&
       result.final_mse > 1.001 * result.initial_mse + 1e-12))
    throw TrainingError(
        "distill: loss did not decrease (initial " +
        std::to_string(result.initial_mse) + ", final " +
        std::to_string(result.final_mse) +
        "); lower the learning rate or increase sample_count");

  // Fold the input normalization back so the returned network takes raw
  // inputs.
  Layer& first = student.layers.front();
  first.weights = first.weights * scale.cwiseInverse().asDiagonal();
  first.bias -= first.weights * center;
  result.net = std::move(student);
  return result;
}

}  // namespace nnmr
