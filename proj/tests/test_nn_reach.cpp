#include <doctest.h>

#include <random>

#include "helpers.hpp"
#include "nnmr/errors.hpp"
#include "nnmr/nn_reach.hpp"

using namespace nnmr;
using namespace nnmr::testing;

TEST_CASE("interval_layer: relu clamps the box at zero") {
  const Layer layer(mat({{1.0}}), vec({0.0}), Activation::relu);
  const IntervalBox out = interval_layer(layer, IntervalBox(vec({-1.0}), vec({2.0})));
  CHECK(out.lower[0] == 0.0);
  CHECK(out.upper[0] == 2.0);
}

TEST_CASE("interval_layer: mixed-sign row attains corner bounds") {
  const Layer layer(mat({{1.0, -1.0}}), vec({0.0}), Activation::linear);
  const IntervalBox in(vec({0.0, 0.0}), vec({1.0, 1.0}));
  const IntervalBox out = interval_layer(layer, in);
  CHECK(out.lower[0] == -1.0);
  CHECK(out.upper[0] == 1.0);

  // Brute-force corner oracle.
  double lo = 1e300, hi = -1e300;
  for (double a : {0.0, 1.0})
    for (double b : {0.0, 1.0}) {
      const double v = a - b;
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
  CHECK(out.lower[0] == lo);
  CHECK(out.upper[0] == hi);
}

TEST_CASE("interval_layer: affine image") {
  const Layer layer(mat({{2.0}}), vec({1.0}), Activation::linear);
  const IntervalBox out = interval_layer(layer, IntervalBox(vec({-1.0}), vec({1.0})));
  CHECK(out.lower[0] == -1.0);
  CHECK(out.upper[0] == 3.0);
}

TEST_CASE("reach_nn: identity net, one cell") {
  Network net(1, {Layer(mat({{1.0}}), vec({0.0}), Activation::linear)});
  const BoxUnion out =
      reach_nn(net, IntervalBox(vec({0.0}), vec({1.0})), PartitionConfig{});
  REQUIRE(out.size() == 1);
  CHECK(out.boxes[0].lower[0] == 0.0);
  CHECK(out.boxes[0].upper[0] == 1.0);
}

TEST_CASE("reach_nn: dependency loss on one cell, recovered hull with four") {
  Network net(1, {Layer(mat({{2.0}, {1.0}}), vec({0.0, 0.0}), Activation::linear),
                  Layer(mat({{1.0, -1.0}}), vec({0.0}), Activation::linear)});
  const IntervalBox input(vec({-1.0}), vec({1.0}));

  const BoxUnion one = reach_nn(net, input, PartitionConfig{});
  REQUIRE(one.size() == 1);
  CHECK(one.boxes[0].lower[0] == -3.0);
  CHECK(one.boxes[0].upper[0] == 3.0);

  const BoxUnion four =
      reach_nn(net, input, PartitionConfig::uniform_splits({4}));
  REQUIRE(four.size() == 4);
  const IntervalBox h = hull(four);
  CHECK(h.lower[0] == -1.5);
  CHECK(h.upper[0] == 1.5);
}

TEST_CASE("hull of box unions") {
  const IntervalBox a(vec({0.0}), vec({1.0}));
  CHECK(same_box(hull(BoxUnion({a})), a));

  const IntervalBox b(vec({2.0}), vec({3.0}));
  const IntervalBox h1 = hull(BoxUnion({a, b}));
  CHECK(h1.lower[0] == 0.0);
  CHECK(h1.upper[0] == 3.0);

  const IntervalBox c(vec({-1.0, 0.0}), vec({0.0, 1.0}));
  const IntervalBox d(vec({0.0, -1.0}), vec({2.0, 0.0}));
  const IntervalBox h2 = hull(BoxUnion({c, d}));
  CHECK(same_box(h2, IntervalBox(vec({-1.0, -1.0}), vec({2.0, 1.0}))));

  CHECK_THROWS_AS(hull(BoxUnion{}), ShapeError);
}

TEST_CASE("partition: cap, degenerate dims, broadcast, modes") {
  const IntervalBox box(vec({0.0, 1.0, -1.0}), vec({1.0, 1.0, 1.0}));

  PartitionConfig cfg = PartitionConfig::uniform_splits({10});
  CHECK(partition_counts(box, cfg) == std::vector<int>{10, 1, 10});

  cfg = PartitionConfig::uniform_splits({2, 5, 3});
  CHECK(partition_counts(box, cfg) == std::vector<int>{2, 1, 3});

  cfg = PartitionConfig::width_driven(0.4);
  CHECK(partition_counts(box, cfg) == std::vector<int>{3, 1, 5});

  cfg = PartitionConfig::bisection_to_depth(2);
  CHECK(partition_counts(box, cfg) == std::vector<int>{4, 1, 4});

  cfg = PartitionConfig::uniform_splits({2000, 1, 2000});
  cfg.cell_cap = 1000000;
  CHECK_THROWS_AS(partition_counts(box, cfg), BudgetError);
}

TEST_CASE("partition cells tile the box in lexicographic order") {
  const IntervalBox box(vec({0.0, 10.0}), vec({1.0, 14.0}));
  const std::vector<int> counts{2, 4};
  // Cell 0 starts at the lower corner; the last cell ends at the upper one.
  const IntervalBox first = partition_cell(box, counts, 0);
  CHECK(first.lower[0] == 0.0);
  CHECK(first.lower[1] == 10.0);
  const IntervalBox last = partition_cell(box, counts, 7);
  CHECK(last.upper[0] == 1.0);
  CHECK(last.upper[1] == 14.0);
  // Dimension 0 is the most significant digit.
  const IntervalBox second = partition_cell(box, counts, 1);
  CHECK(second.lower[0] == 0.0);
  CHECK(second.lower[1] == 11.0);
  // Adjacent cells share boundaries exactly.
  for (std::size_t flat = 0; flat + 1 < 8; ++flat) {
    const IntervalBox cur = partition_cell(box, counts, flat);
    const IntervalBox nxt = partition_cell(box, counts, flat + 1);
    if (flat % 4 != 3) CHECK(cur.upper[1] == nxt.lower[1]);
  }
}

TEST_CASE("soundness fuzz: sampled evals stay inside their cell box") {
  std::mt19937 rng(11);
  std::uniform_int_distribution<int> dim(1, 4);
  for (int trial = 0; trial < 12; ++trial) {
    const int in = dim(rng);
    const Network net = random_network(rng, {in, dim(rng), dim(rng)}, 2.0);
    const IntervalBox input = random_box(rng, in, 2.0, 1.5);
    const std::vector<int> counts =
        partition_counts(input, PartitionConfig::uniform_splits({2}));
    const BoxUnion out = reach_nn(net, input, PartitionConfig::uniform_splits({2}));
    for (std::size_t flat = 0; flat < out.size(); ++flat) {
      const IntervalBox cell = partition_cell(input, counts, flat);
      std::size_t inside = 0;
      for (int s = 0; s < 10000; ++s)
        inside += out.boxes[flat].contains(eval(net, sample_box(rng, cell)));
      CHECK(inside == 10000);
    }
  }
}

TEST_CASE("refinement monotonicity: bisection never grows boxes") {
  std::mt19937 rng(13);
  std::uniform_int_distribution<int> dim(1, 3);
  for (int trial = 0; trial < 25; ++trial) {
    const int in = dim(rng);
    const Network net = random_network(rng, {in, dim(rng), dim(rng)}, 2.0);
    const IntervalBox input = random_box(rng, in, 1.0, 1.0);

    IntervalBox prev_hull =
        hull(reach_nn(net, input, PartitionConfig::bisection_to_depth(0)));
    for (int depth = 1; depth <= 2; ++depth) {
      const IntervalBox h = hull(
          reach_nn(net, input, PartitionConfig::bisection_to_depth(depth)));
      CHECK(prev_hull.contains(h));
      prev_hull = h;
    }
  }
}

TEST_CASE("bisected children land inside the parent cell's output box") {
  std::mt19937 rng(17);
  for (int trial = 0; trial < 20; ++trial) {
    std::uniform_int_distribution<int> dim(1, 3);
    const int in = dim(rng);
    const Network net = random_network(rng, {in, dim(rng), dim(rng)}, 2.0);
    const IntervalBox input = random_box(rng, in, 1.0, 1.0);

    const BoxUnion parent = reach_nn(net, input, PartitionConfig{});
    const BoxUnion children =
        reach_nn(net, input, PartitionConfig::bisection_to_depth(1));
    for (const IntervalBox& child : children.boxes)
      CHECK(parent.boxes[0].contains(child));
  }
}

TEST_CASE("single affine layer is exact against corner enumeration") {
  std::mt19937 rng(19);
  for (int trial = 0; trial < 25; ++trial) {
    std::uniform_int_distribution<int> dim(1, 4);
    const int in = dim(rng);
    const bool use_relu = trial % 2 == 0;
    Network net(in, {Layer(random_matrix(rng, 1, in, 2.0),
                           random_vector(rng, 1, 1.0),
                           use_relu ? Activation::relu : Activation::linear)});
    const IntervalBox input = random_box(rng, in, 1.0, 1.0);
    const BoxUnion out = reach_nn(net, input, PartitionConfig{});

    double lo = 1e300, hi = -1e300;
    for (unsigned corner = 0; corner < (1u << in); ++corner) {
      Eigen::VectorXd x(in);
      for (int i = 0; i < in; ++i)
        x[i] = (corner >> i) & 1 ? input.upper[i] : input.lower[i];
      const double v = eval(net, x)[0];
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    CHECK(out.boxes[0].lower[0] == doctest::Approx(lo).epsilon(1e-12));
    CHECK(out.boxes[0].upper[0] == doctest::Approx(hi).epsilon(1e-12));
  }
}

TEST_CASE("reach_nn rejects mismatched input dimension") {
  std::mt19937 rng(23);
  const Network net = random_network(rng, {2, 2, 1});
  CHECK_THROWS_AS(
      reach_nn(net, IntervalBox(vec({0.0}), vec({1.0})), PartitionConfig{}),
      ShapeError);
}
