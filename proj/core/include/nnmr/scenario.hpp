#pragma once

#include <optional>
#include <string>
#include <vector>

#include "nnmr/acc.hpp"
#include "nnmr/closed_loop.hpp"
#include "nnmr/reduction.hpp"

namespace nnmr {

// On-disk scenario description (versioned JSON). Paths are resolved relative
// to the config file's directory.
struct ScenarioConfig {
  int format = 1;

  std::string plant_id = "acc";
  double plant_mu = 0.001;
  double lead_accel = -2.0;

  std::string controller_path;
  std::optional<std::string> reduced_controller_path;
  std::optional<std::string> precision_path;
  std::string inflation = "sound";  // "sound" | "paper"

  double sampling_period = 0.01;
  double horizon = 3.0;
  IntervalBox initial_set;
  IntervalBox reference_set;
  ControllerInputLayout layout;
  SafetySpec safety;

  std::vector<int> controller_splits;  // per controller-input dimension
  double dt = 0.0025;
  std::size_t cell_cap = 1000000;
};

ScenarioConfig load_scenario_config(const std::string& path);
void save_scenario_config(const ScenarioConfig& cfg, const std::string& path);

// Loads the referenced networks and precision file and assembles the runnable
// scenario. Throws ConfigError with field context on any inconsistency.
Scenario instantiate_scenario(const ScenarioConfig& cfg);

InflationMode parse_inflation_mode(const std::string& name);
const char* to_string(InflationMode mode);

// Precision report files ({rho, norm, cell_count, sampled_lower_bound,
// wall_time_seconds, input_set, partition}).
void save_precision_report(const PrecisionReport& report,
                           const std::string& path);
PrecisionReport load_precision_report(const std::string& path);

}  // namespace nnmr
