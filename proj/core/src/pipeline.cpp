#include "nnmr/pipeline.hpp"

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include <json.hpp>

#include "nnmr/errors.hpp"
#include "nnmr/network_io.hpp"
#include "nnmr/version.hpp"

namespace nnmr {

namespace {

using nlohmann::json;
namespace fs = std::filesystem;

void ensure_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw ConfigError(dir + ": cannot create directory");
}

void write_text(const std::string& path, const std::string& content) {
  std::ofstream out(path);
  if (!out) throw ConfigError(path + ": cannot open for writing");
  out << content;
}

json stats_to_json(const ReachStats& stats) {
  return {{"controller_reach_seconds", stats.controller_reach_seconds},
          {"ode_reach_seconds", stats.ode_reach_seconds},
          {"total_seconds", stats.total_seconds},
          {"controller_cells", stats.controller_cells},
          {"intervals", stats.intervals}};
}

json result_to_json(const VerificationResult& res) {
  json j;
  j["verdict"] = to_string(res.verdict);
  if (res.first_violation) {
    j["first_violation"] = {{"t_begin", res.first_violation->t_begin},
                            {"t_end", res.first_violation->t_end},
                            {"region", res.first_violation->region},
                            {"description", res.first_violation->description}};
  } else {
    j["first_violation"] = nullptr;
  }
  j["stats"] = stats_to_json(res.stats);
  return j;
}

ReachNncsConfig reach_config(const ScenarioConfig& cfg) {
  ReachNncsConfig rc;
  rc.controller_partition =
      cfg.controller_splits.empty()
          ? PartitionConfig::single_cell()
          : PartitionConfig::uniform_splits(cfg.controller_splits);
  rc.controller_partition.cell_cap = cfg.cell_cap;
  rc.step.dt = cfg.dt;
  rc.inflation = parse_inflation_mode(cfg.inflation);
  return rc;
}

std::string tube_to_csv(const ReachTube& tube) {
  std::ostringstream os;
  write_csv(tube, os);
  return os.str();
}

}  // namespace

void write_manifest(const std::string& out_dir, const std::string& subcommand,
                    const std::string& resolved_json) {
  ensure_dir(out_dir);
  json doc;
  doc["tool"] = "nnmr";
  doc["version"] = kVersion;
  doc["subcommand"] = subcommand;
  doc["resolved"] = json::parse(resolved_json);
  write_text((fs::path(out_dir) / "manifest.json").string(),
             doc.dump(1) + "\n");
}

VerifyRun run_verify(const ScenarioConfig& cfg, const std::string& out_dir) {
  ensure_dir(out_dir);
  const Scenario scenario = instantiate_scenario(cfg);
  const ReachNncsConfig rc = reach_config(cfg);

  VerifyRun run;

  // Original-controller pass: strip the reduced side.
  {
    SampledNNCS original = scenario.system;
    original.reduced_controller.reset();
    original.precision.reset();
    run.original_reach =
        reach_nncs(original, scenario.initial_set, scenario.horizon, rc);
    run.original = verify(run.original_reach.tube, scenario.safety);
    run.original.stats = run.original_reach.stats;
  }
  run.tube_original_csv =
      (fs::path(out_dir) / "tube_original.csv").string();
  write_text(run.tube_original_csv, tube_to_csv(run.original_reach.tube));

  if (scenario.system.reduced_controller) {
    run.reduced_reach =
        reach_nncs(scenario.system, scenario.initial_set, scenario.horizon, rc);
    VerificationResult res = verify(run.reduced_reach->tube, scenario.safety);
    res.stats = run.reduced_reach->stats;
    run.reduced = res;
    run.tube_reduced_csv = (fs::path(out_dir) / "tube_reduced.csv").string();
    write_text(run.tube_reduced_csv, tube_to_csv(run.reduced_reach->tube));
  }

  json doc;
  doc["scenario"] = cfg.plant_id;
  doc["horizon"] = cfg.horizon;
  doc["sampling_period"] = cfg.sampling_period;
  doc["inflation"] = cfg.inflation;
  doc["original"] = result_to_json(run.original);
  if (run.reduced) doc["reduced"] = result_to_json(*run.reduced);
  doc["verdict"] = to_string(run.headline_verdict());
  run.verdict_json = (fs::path(out_dir) / "verdict.json").string();
  write_text(run.verdict_json, doc.dump(1) + "\n");

  if (run.reduced) {
    // Two-row comparison of reachable set calculation times.
    std::ostringstream table;
    table << "system,controller_reach_seconds,ode_reach_seconds,total_seconds\n";
    table << "original controller,"
          << format_double(run.original.stats.controller_reach_seconds) << ','
          << format_double(run.original.stats.ode_reach_seconds) << ','
          << format_double(run.original.stats.total_seconds) << "\n";
    table << "reduced controller,"
          << format_double(run.reduced->stats.controller_reach_seconds) << ','
          << format_double(run.reduced->stats.ode_reach_seconds) << ','
          << format_double(run.reduced->stats.total_seconds) << "\n";
    run.timing_table_csv = (fs::path(out_dir) / "timing_table.csv").string();
    write_text(run.timing_table_csv, table.str());
  }
  return run;
}

SimulateRun run_simulate(const ScenarioConfig& cfg, const std::string& out_dir,
                         int trajectory_count, unsigned seed,
                         const std::string& tube_csv) {
  if (trajectory_count <= 0)
    throw PreconditionError("simulate: trajectory count must be positive");
  ensure_dir(out_dir);
  const Scenario scenario = instantiate_scenario(cfg);

  std::string tube_path = tube_csv;
  if (tube_path.empty()) {
    const fs::path reduced = fs::path(out_dir) / "tube_reduced.csv";
    const fs::path original = fs::path(out_dir) / "tube_original.csv";
    if (fs::exists(reduced))
      tube_path = reduced.string();
    else if (fs::exists(original))
      tube_path = original.string();
    else
      throw ConfigError(
          "simulate: no tube CSV found in " + out_dir +
          "; run verify first or pass an explicit tube path");
  }
  std::ifstream tube_in(tube_path);
  if (!tube_in) throw ConfigError(tube_path + ": cannot open for reading");
  const ReachTube tube = read_tube_csv(tube_in);

  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  auto sample_box = [&](const IntervalBox& box) {
    Eigen::VectorXd x(box.dim());
    for (Eigen::Index i = 0; i < box.dim(); ++i)
      x[i] = box.lower[i] + (box.upper[i] - box.lower[i]) * unit(rng);
    return x;
  };

  std::vector<Trajectory> trajectories;
  trajectories.reserve(static_cast<std::size_t>(trajectory_count));
  std::ostringstream all_csv;
  for (int i = 0; i < trajectory_count; ++i) {
    const Eigen::VectorXd x0 = sample_box(scenario.initial_set);
    const Eigen::VectorXd r = sample_box(scenario.system.reference_box);
    Trajectory traj =
        simulate(scenario.system, x0, r, scenario.horizon, SimulateOptions{});
    std::ostringstream one;
    write_csv(traj, one);
    // Prefix each row with the trajectory id; keep one header.
    std::istringstream lines(one.str());
    std::string line;
    bool header = true;
    while (std::getline(lines, line)) {
      if (header) {
        if (i == 0) all_csv << "trajectory," << line << "\n";
        header = false;
      } else {
        all_csv << i << ',' << line << "\n";
      }
    }
    trajectories.push_back(std::move(traj));
  }

  SimulateRun run;
  run.trajectories = trajectories.size();
  run.audit = containment_audit(trajectories, tube);
  run.trajectories_csv = (fs::path(out_dir) / "trajectories.csv").string();
  write_text(run.trajectories_csv, all_csv.str());

  json doc;
  doc["note"] =
      "reference integration is not validated arithmetic: it can refute a "
      "tube, never certify one";
  doc["tube"] = tube_path;
  doc["inflation"] = cfg.inflation;
  doc["trajectories"] = run.trajectories;
  doc["checked_points"] = run.audit.checked_points;
  json viols = json::array();
  for (const ContainmentViolation& v : run.audit.violations)
    viols.push_back({{"trajectory", v.trajectory},
                     {"time", v.time},
                     {"component", v.component},
                     {"margin", v.margin}});
  doc["violations"] = std::move(viols);
  run.audit_json = (fs::path(out_dir) / "audit.json").string();
  write_text(run.audit_json, doc.dump(1) + "\n");
  return run;
}

AccGenerateResult generate_acc_assets(const AccGenerateOptions& opts,
                                      const std::string& out_dir,
                                      unsigned seed) {
  ensure_dir(out_dir);
  Scenario scenario = acc_scenario(opts.scenario);

  AccReductionOptions reduction = opts.reduction;
  reduction.seed = seed;
  if (reduction.domain.dim() != 5)
    reduction.domain = acc_default_precision_domain(opts.scenario);

  AccGenerateResult result;
  AccReduction red;
  int round = 1;
  for (;; ++round) {
    Scenario trial = scenario;
    red = attach_reduced_acc_controller(trial, reduction);
    ReachNncsConfig rc;
    rc.controller_partition =
        PartitionConfig::uniform_splits(opts.controller_splits);
    rc.step.dt = opts.dt;
    try {
      reach_nncs(trial.system, trial.initial_set, trial.horizon, rc);
      scenario = trial;
      break;
    } catch (const PrecisionDomainError&) {
      if (round >= opts.max_domain_rounds) throw;
      // Rerun with the original controller to see where the inputs went,
      // then grow the domain around that hull.
      SampledNNCS probe = trial.system;
      probe.reduced_controller.reset();
      probe.precision.reset();
      NncsReachResult free_run =
          reach_nncs(probe, trial.initial_set, trial.horizon, rc);
      IntervalBox tau_hull = assemble_controller_input(
          trial.system.input_layout,
          reach_ode_y(trial.system.plant, free_run.instants[0]),
          trial.system.reference_box);
      for (const IntervalBox& instant : free_run.instants)
        tau_hull = hull(tau_hull,
                        assemble_controller_input(
                            trial.system.input_layout,
                            reach_ode_y(trial.system.plant, instant),
                            trial.system.reference_box));
      // Half-width growth: double the hull's extent, then join the previous
      // domain so rounds only ever grow.
      Eigen::VectorXd c = tau_hull.center();
      Eigen::VectorXd r = 2.0 * (tau_hull.upper - tau_hull.lower);
      reduction.domain =
          hull(reduction.domain, IntervalBox(c - r, c + r));
    }
  }

  result.domain_rounds = round;
  result.distill = red.distill;
  result.precision = red.precision;

  const std::string controller_path =
      (fs::path(out_dir) / "controller.json").string();
  const std::string reduced_path =
      (fs::path(out_dir) / "controller_reduced.json").string();
  const std::string precision_path =
      (fs::path(out_dir) / "precision.json").string();
  save_network(scenario.system.controller, controller_path);
  save_network(*scenario.system.reduced_controller, reduced_path);
  save_precision_report(red.precision, precision_path);

  ScenarioConfig cfg;
  cfg.plant_id = "acc";
  cfg.plant_mu = opts.scenario.mu;
  cfg.lead_accel = opts.scenario.lead_accel;
  cfg.controller_path = controller_path;
  cfg.reduced_controller_path = reduced_path;
  cfg.precision_path = precision_path;
  cfg.inflation = "sound";
  cfg.sampling_period = opts.scenario.sampling_period;
  cfg.horizon = opts.scenario.horizon;
  cfg.initial_set = scenario.initial_set;
  cfg.reference_set = scenario.system.reference_box;
  cfg.layout = scenario.system.input_layout;
  cfg.safety = scenario.safety;
  cfg.controller_splits = opts.controller_splits;
  cfg.dt = opts.dt;

  result.config_path = (fs::path(out_dir) / "scenario.json").string();
  save_scenario_config(cfg, result.config_path);
  result.config = cfg;
  return result;
}

}  // namespace nnmr
