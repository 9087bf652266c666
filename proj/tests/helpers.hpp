#pragma once

#include <Eigen/Dense>

#include <random>
#include <vector>

#include "nnmr/interval.hpp"
#include "nnmr/network.hpp"

namespace nnmr::testing {

inline Eigen::MatrixXd random_matrix(std::mt19937& rng, Eigen::Index rows,
                                     Eigen::Index cols, double scale = 1.0) {
  std::uniform_real_distribution<double> dist(-scale, scale);
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r)
    for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = dist(rng);
  return m;
}

inline Eigen::VectorXd random_vector(std::mt19937& rng, Eigen::Index n,
                                     double scale = 1.0) {
  return random_matrix(rng, n, 1, scale).col(0);
}

// Random relu-hidden / linear-output network with the given layer widths
// (input, hidden..., output).
inline Network random_network(std::mt19937& rng,
                              const std::vector<int>& widths,
                              double scale = 1.0) {
  Network net;
  net.input_dim = widths.front();
  for (std::size_t l = 1; l < widths.size(); ++l) {
    const bool last = l + 1 == widths.size();
    net.layers.emplace_back(
        random_matrix(rng, widths[l], widths[l - 1], scale),
        random_vector(rng, widths[l], scale),
        last ? Activation::linear : Activation::relu);
  }
  return net;
}

// Random architecture pair satisfying the augmentation preconditions: shared
// input and output widths, reduced depth <= full depth.
inline std::pair<Network, Network> random_network_pair(std::mt19937& rng,
                                                       int max_hidden = 3,
                                                       int max_width = 5) {
  std::uniform_int_distribution<int> dim(1, max_width);
  std::uniform_int_distribution<int> hidden(1, max_hidden);
  const int in = dim(rng);
  const int out = dim(rng);
  const int full_hidden = hidden(rng);
  std::uniform_int_distribution<int> reduced_hidden_dist(1, full_hidden);
  const int reduced_hidden = reduced_hidden_dist(rng);

  std::vector<int> full_widths{in};
  for (int i = 0; i < full_hidden; ++i) full_widths.push_back(dim(rng));
  full_widths.push_back(out);
  std::vector<int> reduced_widths{in};
  for (int i = 0; i < reduced_hidden; ++i) reduced_widths.push_back(dim(rng));
  reduced_widths.push_back(out);

  return {random_network(rng, full_widths), random_network(rng, reduced_widths)};
}

inline IntervalBox random_box(std::mt19937& rng, Eigen::Index dim,
                              double center_scale = 1.0,
                              double max_halfwidth = 1.0) {
  std::uniform_real_distribution<double> cdist(-center_scale, center_scale);
  std::uniform_real_distribution<double> rdist(0.0, max_halfwidth);
  Eigen::VectorXd lo(dim), hi(dim);
  for (Eigen::Index i = 0; i < dim; ++i) {
    const double c = cdist(rng);
    const double r = rdist(rng);
    lo[i] = c - r;
    hi[i] = c + r;
  }
  return IntervalBox(std::move(lo), std::move(hi));
}

inline Eigen::VectorXd sample_box(std::mt19937& rng, const IntervalBox& box) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  Eigen::VectorXd x(box.dim());
  for (Eigen::Index i = 0; i < box.dim(); ++i)
    x[i] = box.lower[i] + (box.upper[i] - box.lower[i]) * unit(rng);
  return x;
}

inline Eigen::VectorXd vec(std::initializer_list<double> vals) {
  Eigen::VectorXd v(static_cast<Eigen::Index>(vals.size()));
  Eigen::Index i = 0;
  for (double x : vals) v[i++] = x;
  return v;
}

inline Eigen::MatrixXd mat(std::initializer_list<std::initializer_list<double>> rows) {
  const auto r = static_cast<Eigen::Index>(rows.size());
  const auto c = static_cast<Eigen::Index>(rows.begin()->size());
  Eigen::MatrixXd m(r, c);
  Eigen::Index i = 0;
  for (const auto& row : rows) {
    Eigen::Index j = 0;
    for (double x : row) m(i, j++) = x;
    ++i;
  }
  return m;
}

inline bool same_vector(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  return a.size() == b.size() && (a.array() == b.array()).all();
}

inline bool same_box(const IntervalBox& a, const IntervalBox& b) {
  return same_vector(a.lower, b.lower) && same_vector(a.upper, b.upper);
}

}  // namespace nnmr::testing
