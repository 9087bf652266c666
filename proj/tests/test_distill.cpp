#include <doctest.h>

#include <random>

#include "helpers.hpp"
#include "nnmr/acc.hpp"
#include "nnmr/distill.hpp"
#include "nnmr/errors.hpp"
#include "nnmr/reduction.hpp"

using namespace nnmr;
using namespace nnmr::testing;

TEST_CASE("self-distillation: init at the teacher keeps zero loss") {
  std::mt19937 rng(71);
  const Network teacher = random_network(rng, {2, 4, 4, 1}, 1.0);
  const IntervalBox box = random_box(rng, 2, 1.0, 1.0);

  DistillOptions opts;
  opts.epochs = 200;
  opts.init = teacher;
  const DistillResult result = distill(teacher, {4, 4}, box, 256, 5, opts);
  CHECK(result.final_mse <= 1e-18);

  double sampled = 0.0;
  for (int s = 0; s < 500; ++s) {
    const Eigen::VectorXd x = sample_box(rng, box);
    sampled = std::max(sampled, (eval(teacher, x) - eval(result.net, x))
                                    .lpNorm<Eigen::Infinity>());
  }
  CHECK(sampled <= 1e-9);
  CHECK(compute_precision(teacher, result.net, box,
                          PartitionConfig::uniform_splits({8}))
            .rho >= 0.0);
}

TEST_CASE("distilling the synthesized wide controller into two hidden layers") {
  AccScenarioOptions opts;
  const Network teacher = acc_reference_controller(opts);
  REQUIRE(teacher.layer_count() == 6);  // five hidden layers plus output

  // Operating-envelope box: v_set, t_gap fixed, plant outputs varied.
  const IntervalBox box(vec({30.0, 1.4, 20.0, 40.0, -15.0}),
                        vec({30.0, 1.4, 45.0, 100.0, 10.0}));
  DistillOptions dopts;
  dopts.epochs = 400;
  const DistillResult result = distill(teacher, {5, 5}, box, 1024, 7, dopts);
  REQUIRE(result.net.layer_count() == 3);
  CHECK(result.net.input_dim == 5);
  CHECK(result.net.output_dim() == 1);
  CHECK(std::isfinite(result.final_mse));
  CHECK(result.final_mse < result.initial_mse);
  CHECK(validate(result.net).empty());
}

TEST_CASE("distill rejects bad arguments") {
  std::mt19937 rng(73);
  const Network teacher = random_network(rng, {2, 3, 1});
  const IntervalBox box = random_box(rng, 2, 1.0, 1.0);
  CHECK_THROWS_AS(distill(teacher, {3}, box, 0, 1), PreconditionError);
  CHECK_THROWS_AS(distill(teacher, {3, 3, 3}, box, 16, 1), PreconditionError);
  CHECK_THROWS_AS(distill(teacher, {0}, box, 16, 1), PreconditionError);
}

TEST_CASE("distill flags divergence") {
  std::mt19937 rng(79);
  const Network teacher = random_network(rng, {2, 4, 1}, 2.0);
  const IntervalBox box = random_box(rng, 2, 2.0, 2.0);
  DistillOptions opts;
  opts.epochs = 50;
  opts.learning_rate = 1e12;  // guaranteed blowup
  CHECK_THROWS_AS(distill(teacher, {3}, box, 64, 3, opts), TrainingError);
}

TEST_CASE("distillation is deterministic for a fixed seed") {
  std::mt19937 rng(83);
  const Network teacher = random_network(rng, {2, 4, 1}, 1.0);
  const IntervalBox box = random_box(rng, 2, 1.0, 1.0);
  DistillOptions opts;
  opts.epochs = 100;
  const DistillResult a = distill(teacher, {3}, box, 128, 9, opts);
  const DistillResult b = distill(teacher, {3}, box, 128, 9, opts);
  CHECK(a.final_mse == b.final_mse);
  for (Eigen::Index l = 0; l < a.net.layer_count(); ++l)
    CHECK((a.net.layers[static_cast<std::size_t>(l)].weights.array() ==
           b.net.layers[static_cast<std::size_t>(l)].weights.array())
              .all());
}
