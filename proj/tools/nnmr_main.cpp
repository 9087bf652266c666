// nnmr: guaranteed neural network model reduction and closed-loop
// reachability verification.
//
// Exit codes: 0 ok/safe, 1 verdict unknown, 2 precondition violation,
// 3 refinement budget exceeded, 4 bad config/file, 5 numeric failure.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "nnmr/acc.hpp"
#include "nnmr/errors.hpp"
#include "nnmr/network_io.hpp"
#include "nnmr/pipeline.hpp"
#include "nnmr/reduction.hpp"
#include "nnmr/scenario.hpp"
#include "nnmr/version.hpp"

namespace {

using nlohmann::json;

constexpr int kExitSafe = 0;
constexpr int kExitUnknown = 1;
constexpr int kExitPrecondition = 2;
constexpr int kExitBudget = 3;
constexpr int kExitConfig = 4;
constexpr int kExitNumeric = 5;

std::string default_out_dir() {
  if (const char* env = std::getenv("NNMR_OUT_DIR")) return env;
  return "nnmr_out";
}

Eigen::VectorXd parse_vector(const std::vector<double>& vals) {
  return Eigen::Map<const Eigen::VectorXd>(
      vals.data(), static_cast<Eigen::Index>(vals.size()));
}

struct AugmentArgs {
  std::string full_path, reduced_path, out_path;
  std::string out_dir = default_out_dir();
};

int cmd_augment(const AugmentArgs& args) {
  const nnmr::Network full = nnmr::load_network(args.full_path);
  const nnmr::Network reduced = nnmr::load_network(args.reduced_path);
  const nnmr::Network combined = nnmr::augment(full, reduced);
  nnmr::save_network(combined, args.out_path);

  std::cout << "layer  shape      activations\n";
  for (std::size_t l = 0; l < combined.layers.size(); ++l) {
    const nnmr::Layer& layer = combined.layers[l];
    int relu = 0;
    for (nnmr::Activation a : layer.activations)
      relu += a == nnmr::Activation::relu;
    std::ostringstream shape;
    shape << layer.out_dim() << "x" << layer.in_dim();
    std::cout << "  " << l + 1 << "    " << shape.str();
    for (std::size_t pad = shape.str().size(); pad < 11; ++pad)
      std::cout << ' ';
    std::cout << relu << " relu / "
              << (layer.out_dim() - relu) << " linear\n";
  }
  std::cout << "wrote " << args.out_path << "\n";

  json resolved = {{"full", args.full_path},
                   {"reduced", args.reduced_path},
                   {"out", args.out_path}};
  nnmr::write_manifest(args.out_dir, "augment", resolved.dump());
  return kExitSafe;
}

struct PrecisionArgs {
  std::string full_path, reduced_path;
  std::vector<double> lower, upper;
  std::vector<int> splits;
  int bisection_depth = -1;
  std::size_t cell_cap = 1000000;
  int samples = 1000;
  unsigned seed = 0;
  std::string out_path;
  std::string boxes_path;
  std::string out_dir = default_out_dir();
};

int cmd_precision(const PrecisionArgs& args) {
  const nnmr::Network full = nnmr::load_network(args.full_path);
  const nnmr::Network reduced = nnmr::load_network(args.reduced_path);
  if (args.lower.size() != args.upper.size())
    throw nnmr::ConfigError("--lower and --upper need the same length");
  const nnmr::IntervalBox input(parse_vector(args.lower),
                                parse_vector(args.upper));

  nnmr::PartitionConfig cfg;
  if (args.bisection_depth >= 0)
    cfg = nnmr::PartitionConfig::bisection_to_depth(args.bisection_depth);
  else if (!args.splits.empty())
    cfg = nnmr::PartitionConfig::uniform_splits(args.splits);
  cfg.cell_cap = args.cell_cap;

  const nnmr::PrecisionReport report = nnmr::precision_report(
      full, reduced, input, cfg, args.samples, args.seed);

  if (!args.boxes_path.empty()) {
    // Per-cell output boxes of the difference network, for plots and audits.
    const nnmr::BoxUnion cells =
        nnmr::reach_nn(nnmr::augment(full, reduced), input, cfg);
    std::ofstream boxes(args.boxes_path);
    if (!boxes)
      throw nnmr::ConfigError(args.boxes_path + ": cannot open for writing");
    nnmr::write_csv(cells, boxes);
  }

  std::cout << "rho = " << nnmr::format_double(report.precision.rho)
            << " (inf norm, " << report.cell_count << " cells)\n"
            << "sampled lower bound = "
            << nnmr::format_double(report.sampled_lower_bound) << "\n"
            << "wall time = " << nnmr::format_double(report.wall_seconds)
            << " s\n";

  const std::string out_path =
      args.out_path.empty()
          ? (std::filesystem::path(args.out_dir) / "precision.json").string()
          : args.out_path;
  std::filesystem::create_directories(
      std::filesystem::path(out_path).parent_path());
  nnmr::save_precision_report(report, out_path);
  std::cout << "wrote " << out_path << "\n";

  json resolved = {{"full", args.full_path},
                   {"reduced", args.reduced_path},
                   {"lower", args.lower},
                   {"upper", args.upper},
                   {"splits", args.splits},
                   {"bisection_depth", args.bisection_depth},
                   {"samples", args.samples},
                   {"seed", args.seed},
                   {"out", out_path},
                   {"boxes_out", args.boxes_path}};
  nnmr::write_manifest(args.out_dir, "precision", resolved.dump());
  return kExitSafe;
}

struct VerifyArgs {
  std::string config_path;
  std::string out_dir = default_out_dir();
  std::string inflation;  // optional override
  std::vector<int> splits;
  double dt = 0.0;
};

int cmd_verify(const VerifyArgs& args) {
  nnmr::ScenarioConfig cfg = nnmr::load_scenario_config(args.config_path);
  if (!args.inflation.empty()) {
    nnmr::parse_inflation_mode(args.inflation);
    cfg.inflation = args.inflation;
  }
  if (!args.splits.empty()) cfg.controller_splits = args.splits;
  if (args.dt > 0.0) cfg.dt = args.dt;

  const nnmr::VerifyRun run = nnmr::run_verify(cfg, args.out_dir);

  auto print_row = [](const char* name, const nnmr::ReachStats& stats) {
    std::cout << "  " << name << ": controller "
              << nnmr::format_double(stats.controller_reach_seconds)
              << " s, ode " << nnmr::format_double(stats.ode_reach_seconds)
              << " s, total " << nnmr::format_double(stats.total_seconds)
              << " s\n";
  };
  std::cout << "reachable set calculation times\n";
  print_row("original controller", run.original.stats);
  if (run.reduced) print_row("reduced controller ", run.reduced->stats);
  std::cout << "verdict: " << nnmr::to_string(run.headline_verdict()) << "\n";
  if (run.reduced && run.reduced->first_violation)
    std::cout << "first possible violation in ["
              << nnmr::format_double(run.reduced->first_violation->t_begin)
              << ", " << nnmr::format_double(run.reduced->first_violation->t_end)
              << "]: " << run.reduced->first_violation->description << "\n";

  json resolved = {{"config", args.config_path},
                   {"out_dir", args.out_dir},
                   {"inflation", cfg.inflation},
                   {"controller_splits", cfg.controller_splits},
                   {"dt", cfg.dt}};
  nnmr::write_manifest(args.out_dir, "verify", resolved.dump());
  return run.headline_verdict() == nnmr::Verdict::safe ? kExitSafe
                                                       : kExitUnknown;
}

struct SimulateArgs {
  std::string config_path;
  std::string out_dir = default_out_dir();
  std::string tube_path;
  int count = 100;
  unsigned seed = 0;
};

int cmd_simulate(const SimulateArgs& args) {
  const nnmr::ScenarioConfig cfg = nnmr::load_scenario_config(args.config_path);
  const nnmr::SimulateRun run = nnmr::run_simulate(
      cfg, args.out_dir, args.count, args.seed, args.tube_path);
  std::cout << run.trajectories << " trajectories, "
            << run.audit.checked_points << " points checked, "
            << run.audit.violations.size() << " containment violations\n";
  if (!run.audit.violations.empty())
    std::cout << "note: violations refute the tube only under mode \"sound\"; "
                 "mode here is \"" << cfg.inflation << "\"\n";

  json resolved = {{"config", args.config_path},
                   {"out_dir", args.out_dir},
                   {"count", args.count},
                   {"seed", args.seed},
                   {"tube", args.tube_path}};
  nnmr::write_manifest(args.out_dir, "simulate", resolved.dump());
  return kExitSafe;
}

struct AccArgs {
  std::string out_dir = default_out_dir();
  unsigned seed = 7;
  double horizon = 3.0;
  double lead_accel = -2.0;
  double v_set = 30.0;
  std::vector<int> splits = {1, 1, 16, 16, 1};
  double dt = 0.0025;
  std::vector<int> reduced_hidden = {5, 5};
  int distill_samples = 4096;
  int distill_epochs = 3000;
  std::vector<int> precision_splits;
};

int cmd_acc_scenario(const AccArgs& args) {
  nnmr::AccGenerateOptions opts;
  opts.scenario.horizon = args.horizon;
  opts.scenario.lead_accel = args.lead_accel;
  opts.scenario.v_set = args.v_set;
  opts.controller_splits = args.splits;
  opts.dt = args.dt;
  opts.reduction.reduced_hidden = args.reduced_hidden;
  opts.reduction.distill_samples = args.distill_samples;
  opts.reduction.distill_epochs = args.distill_epochs;
  if (!args.precision_splits.empty())
    opts.reduction.precision_splits = args.precision_splits;

  const nnmr::AccGenerateResult result =
      nnmr::generate_acc_assets(opts, args.out_dir, args.seed);
  std::cout << "distillation mse: initial "
            << nnmr::format_double(result.distill.initial_mse) << ", final "
            << nnmr::format_double(result.distill.final_mse) << "\n"
            << "rho = " << nnmr::format_double(result.precision.precision.rho)
            << " (sampled lower bound "
            << nnmr::format_double(result.precision.sampled_lower_bound)
            << ", " << result.precision.cell_count << " cells)\n"
            << "domain rounds: " << result.domain_rounds << "\n"
            << "wrote " << result.config_path << "\n";

  json resolved = {{"out_dir", args.out_dir},
                   {"seed", args.seed},
                   {"horizon", args.horizon},
                   {"lead_accel", args.lead_accel},
                   {"v_set", args.v_set},
                   {"controller_splits", args.splits},
                   {"dt", args.dt},
                   {"reduced_hidden", args.reduced_hidden},
                   {"distill_samples", args.distill_samples},
                   {"distill_epochs", args.distill_epochs}};
  nnmr::write_manifest(args.out_dir, "acc-scenario", resolved.dump());
  return kExitSafe;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"guaranteed neural network model reduction + closed-loop "
               "reachability verification"};
  app.set_version_flag("--version", nnmr::kVersion);
  app.require_subcommand(1);

  AugmentArgs aug;
  CLI::App* augment = app.add_subcommand(
      "augment", "combine two networks into their output-difference network");
  augment->add_option("--full", aug.full_path, "full network file")->required();
  augment->add_option("--reduced", aug.reduced_path, "reduced network file")
      ->required();
  augment->add_option("--out", aug.out_path, "output network file")->required();
  augment->add_option("--out-dir", aug.out_dir, "manifest directory");

  PrecisionArgs prec;
  CLI::App* precision = app.add_subcommand(
      "precision", "guaranteed bound on the output distance of two networks");
  precision->add_option("--full", prec.full_path)->required();
  precision->add_option("--reduced", prec.reduced_path)->required();
  precision->add_option("--lower", prec.lower, "input box lower bounds")
      ->required();
  precision->add_option("--upper", prec.upper, "input box upper bounds")
      ->required();
  precision->add_option("--splits", prec.splits,
                        "uniform splits per dimension (one value broadcasts)");
  precision->add_option("--bisect", prec.bisection_depth,
                        "bisection refinement depth (overrides --splits)");
  precision->add_option("--cell-cap", prec.cell_cap, "partition cell cap");
  precision->add_option("--samples", prec.samples,
                        "probes for the sampled lower bound");
  precision->add_option("--seed", prec.seed);
  precision->add_option("--out", prec.out_path, "report file");
  precision->add_option("--boxes-out", prec.boxes_path,
                        "per-cell difference box CSV");
  precision->add_option("--out-dir", prec.out_dir);

  VerifyArgs ver;
  CLI::App* verify = app.add_subcommand(
      "verify", "closed-loop reachability + safety check from a scenario");
  verify->add_option("--config", ver.config_path, "scenario config")->required();
  verify->add_option("--out-dir", ver.out_dir);
  verify->add_option("--inflation", ver.inflation, "sound | paper");
  verify->add_option("--splits", ver.splits, "controller partition override");
  verify->add_option("--dt", ver.dt, "integrator substep override");

  SimulateArgs sim;
  CLI::App* simulate = app.add_subcommand(
      "simulate", "reference simulations + tube containment audit");
  simulate->add_option("--config", sim.config_path)->required();
  simulate->add_option("--out-dir", sim.out_dir);
  simulate->add_option("--tube", sim.tube_path, "tube csv to audit against");
  simulate->add_option("-n,--count", sim.count, "number of trajectories");
  simulate->add_option("--seed", sim.seed);

  AccArgs acc;
  CLI::App* acc_cmd = app.add_subcommand(
      "acc-scenario", "generate the adaptive cruise control benchmark assets");
  acc_cmd->add_option("--out-dir", acc.out_dir);
  acc_cmd->add_option("--seed", acc.seed);
  acc_cmd->add_option("--horizon", acc.horizon);
  acc_cmd->add_option("--lead-accel", acc.lead_accel,
                      "lead car command (negative = braking)");
  acc_cmd->add_option("--v-set", acc.v_set, "cruise set speed");
  acc_cmd->add_option("--splits", acc.splits);
  acc_cmd->add_option("--dt", acc.dt);
  acc_cmd->add_option("--reduced-hidden", acc.reduced_hidden);
  acc_cmd->add_option("--distill-samples", acc.distill_samples);
  acc_cmd->add_option("--distill-epochs", acc.distill_epochs);
  acc_cmd->add_option("--precision-splits", acc.precision_splits,
                      "precision partition splits per tau dimension");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (*augment) return cmd_augment(aug);
    if (*precision) return cmd_precision(prec);
    if (*verify) return cmd_verify(ver);
    if (*simulate) return cmd_simulate(sim);
    if (*acc_cmd) return cmd_acc_scenario(acc);
  } catch (const nnmr::BudgetError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitBudget;
  } catch (const nnmr::ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const nnmr::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const nnmr::PreconditionError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitPrecondition;
  } catch (const nnmr::ShapeError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitPrecondition;
  } catch (const nnmr::PrecisionDomainError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitPrecondition;
  } catch (const nnmr::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNumeric;
  }
  return kExitConfig;
}
