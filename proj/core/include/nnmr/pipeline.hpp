#pragma once

#include <optional>
#include <string>

#include "nnmr/acc.hpp"
#include "nnmr/scenario.hpp"
#include "nnmr/sim_oracle.hpp"

namespace nnmr {

// Orchestration shared by the command line tool and the integration tests:
// each run writes its outputs plus a manifest echoing the resolved
// configuration, so identical manifests reproduce identical numeric outputs.

struct RunPaths {
  std::string out_dir;
  std::string manifest;
};

// One closed-loop verification run per configured controller. The original
// controller always runs; the reduced one runs when the config names it. The
// two-row timing comparison is written whenever both ran.
struct VerifyRun {
  VerificationResult original;
  NncsReachResult original_reach;
  std::optional<VerificationResult> reduced;
  std::optional<NncsReachResult> reduced_reach;

  Verdict headline_verdict() const {
    return reduced ? reduced->verdict : original.verdict;
  }

  std::string tube_original_csv;
  std::string tube_reduced_csv;  // empty when no reduced controller
  std::string verdict_json;
  std::string timing_table_csv;  // empty when no reduced controller
};

VerifyRun run_verify(const ScenarioConfig& cfg, const std::string& out_dir);

struct SimulateRun {
  AuditReport audit;
  std::size_t trajectories = 0;
  std::string trajectories_csv;
  std::string audit_json;
};

// Fans out n seeded closed-loop simulations with the original controller and
// audits them against the tube CSV (defaults to the reduced tube of a prior
// verify run in the same directory, falling back to the original tube).
SimulateRun run_simulate(const ScenarioConfig& cfg, const std::string& out_dir,
                         int trajectory_count, unsigned seed,
                         const std::string& tube_csv = "");

struct AccGenerateOptions {
  AccScenarioOptions scenario;
  AccReductionOptions reduction;
  std::vector<int> controller_splits = {1, 1, 16, 16, 1};
  double dt = 0.0025;
  // Rounds of precision-domain enlargement if a trial tube escapes it.
  int max_domain_rounds = 4;
};

// Synthesizes the benchmark assets into out_dir: controller and reduced
// controller files, precision report, scenario config. When the trial
// reduced-controller tube leaves the precision domain, the domain is grown to
// cover it and the precision recomputed.
struct AccGenerateResult {
  ScenarioConfig config;
  std::string config_path;
  PrecisionReport precision;
  DistillResult distill;
  int domain_rounds = 1;
};

AccGenerateResult generate_acc_assets(const AccGenerateOptions& opts,
                                      const std::string& out_dir,
                                      unsigned seed);

void write_manifest(const std::string& out_dir, const std::string& subcommand,
                    const std::string& resolved_json);

}  // namespace nnmr
