#include "nnmr/scenario.hpp"

#include <filesystem>
#include <fstream>

#include <json.hpp>

#include "nnmr/errors.hpp"
#include "nnmr/network_io.hpp"

namespace nnmr {

namespace {

using nlohmann::json;
namespace fs = std::filesystem;

json box_to_json(const IntervalBox& box) {
  json j;
  j["lower"] = std::vector<double>(box.lower.data(),
                                   box.lower.data() + box.lower.size());
  j["upper"] = std::vector<double>(box.upper.data(),
                                   box.upper.data() + box.upper.size());
  return j;
}

IntervalBox box_from_json(const json& j, const std::string& where) {
  if (!j.is_object() || !j.contains("lower") || !j.contains("upper"))
    throw ConfigError(where + ": expected {lower: [...], upper: [...]}");
  const auto lo = j["lower"].get<std::vector<double>>();
  const auto hi = j["upper"].get<std::vector<double>>();
  if (lo.size() != hi.size())
    throw ConfigError(where + ": lower/upper lengths differ");
  try {
    return IntervalBox(
        Eigen::Map<const Eigen::VectorXd>(lo.data(),
                                          static_cast<Eigen::Index>(lo.size())),
        Eigen::Map<const Eigen::VectorXd>(
            hi.data(), static_cast<Eigen::Index>(hi.size())));
  } catch (const ShapeError& e) {
    throw ConfigError(where + ": " + e.what());
  }
}

json partition_to_json(const PartitionConfig& cfg) {
  json j;
  j["mode"] = cfg.mode == PartitionConfig::Mode::uniform ? "uniform"
                                                         : "bisection";
  if (!cfg.splits_per_dim.empty()) j["splits_per_dim"] = cfg.splits_per_dim;
  if (cfg.max_cell_width) j["max_cell_width"] = *cfg.max_cell_width;
  if (cfg.mode == PartitionConfig::Mode::bisection)
    j["depth"] = cfg.bisection_depth;
  j["cell_cap"] = cfg.cell_cap;
  return j;
}

PartitionConfig partition_from_json(const json& j, const std::string& where) {
  PartitionConfig cfg;
  if (!j.is_object()) throw ConfigError(where + ": expected an object");
  const std::string mode = j.value("mode", "uniform");
  if (mode == "uniform") {
    cfg.mode = PartitionConfig::Mode::uniform;
  } else if (mode == "bisection") {
    cfg.mode = PartitionConfig::Mode::bisection;
    cfg.bisection_depth = j.value("depth", 0);
  } else {
    throw ConfigError(where + ".mode: unknown mode \"" + mode + "\"");
  }
  if (j.contains("splits_per_dim"))
    cfg.splits_per_dim = j["splits_per_dim"].get<std::vector<int>>();
  if (j.contains("max_cell_width"))
    cfg.max_cell_width = j["max_cell_width"].get<double>();
  if (j.contains("cell_cap")) cfg.cell_cap = j["cell_cap"].get<std::size_t>();
  return cfg;
}

json load_json_file(const std::string& path, const char* what) {
  std::ifstream in(path);
  if (!in) throw ConfigError(std::string(what) + " " + path +
                             ": cannot open for reading");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string(what) + " " + path + ": " + e.what());
  }
}

std::string resolve_relative(const std::string& base_file,
                             const std::string& path) {
  const fs::path p(path);
  if (p.is_absolute()) return path;
  return (fs::path(base_file).parent_path() / p).string();
}

}  // namespace

InflationMode parse_inflation_mode(const std::string& name) {
  if (name == "sound") return InflationMode::sound_full_rho;
  if (name == "paper") return InflationMode::paper_half_rho;
  throw ConfigError("inflation: expected \"sound\" or \"paper\", got \"" +
                    name + "\"");
}

const char* to_string(InflationMode mode) {
  return mode == InflationMode::sound_full_rho ? "sound" : "paper";
}

ScenarioConfig load_scenario_config(const std::string& path) {
  const json doc = load_json_file(path, "scenario config");
  if (!doc.is_object())
    throw ConfigError(path + ": expected a JSON object");

  ScenarioConfig cfg;
  try {
    cfg.format = doc.value("format", 0);
    if (cfg.format != 1)
      throw ConfigError("format: unsupported scenario format " +
                        std::to_string(cfg.format));

    if (!doc.contains("plant") || !doc["plant"].is_object())
      throw ConfigError("plant: missing object");
    const json& plant = doc["plant"];
    cfg.plant_id = plant.value("id", "");
    cfg.plant_mu = plant.value("mu", 0.001);
    cfg.lead_accel = plant.value("lead_accel", -2.0);

    if (!doc.contains("controller") || !doc["controller"].is_string())
      throw ConfigError("controller: missing path");
    cfg.controller_path = resolve_relative(path, doc["controller"]);
    if (doc.contains("reduced_controller") &&
        !doc["reduced_controller"].is_null())
      cfg.reduced_controller_path =
          resolve_relative(path, doc["reduced_controller"].get<std::string>());
    if (doc.contains("precision") && !doc["precision"].is_null())
      cfg.precision_path =
          resolve_relative(path, doc["precision"].get<std::string>());
    cfg.inflation = doc.value("inflation", "sound");
    parse_inflation_mode(cfg.inflation);  // validates

    cfg.sampling_period = doc.value("sampling_period", 0.01);
    cfg.horizon = doc.value("horizon", 1.0);
    cfg.initial_set = box_from_json(doc.at("initial_set"), "initial_set");
    cfg.reference_set = box_from_json(doc.at("reference_set"), "reference_set");

    if (!doc.contains("controller_inputs") ||
        !doc["controller_inputs"].is_array())
      throw ConfigError("controller_inputs: missing array");
    for (std::size_t i = 0; i < doc["controller_inputs"].size(); ++i) {
      const json& jc = doc["controller_inputs"][i];
      const std::string where =
          "controller_inputs[" + std::to_string(i) + "]";
      const std::string source = jc.value("source", "");
      TauComponent c;
      if (source == "output")
        c.source = TauComponent::Source::output;
      else if (source == "reference")
        c.source = TauComponent::Source::reference;
      else
        throw ConfigError(where +
                          ".source: expected \"output\" or \"reference\"");
      if (!jc.contains("index") || !jc["index"].is_number_integer())
        throw ConfigError(where + ".index: missing integer");
      c.index = jc["index"].get<int>();
      cfg.layout.push_back(c);
    }

    if (doc.contains("unsafe")) {
      for (std::size_t r = 0; r < doc["unsafe"].size(); ++r) {
        const json& jr = doc["unsafe"][r];
        const std::string where = "unsafe[" + std::to_string(r) + "]";
        UnsafeRegion region;
        region.description = jr.value("description", "");
        if (!jr.contains("inequalities") || !jr["inequalities"].is_array() ||
            jr["inequalities"].empty())
          throw ConfigError(where + ".inequalities: missing non-empty array");
        for (std::size_t q = 0; q < jr["inequalities"].size(); ++q) {
          const json& ji = jr["inequalities"][q];
          if (!ji.contains("coeffs") || !ji.contains("bound"))
            throw ConfigError(where + ".inequalities[" + std::to_string(q) +
                              "]: expected {coeffs, bound}");
          const auto coeffs = ji["coeffs"].get<std::vector<double>>();
          LinearInequality ineq;
          ineq.coeffs = Eigen::Map<const Eigen::VectorXd>(
              coeffs.data(), static_cast<Eigen::Index>(coeffs.size()));
          ineq.bound = ji["bound"].get<double>();
          region.inequalities.push_back(std::move(ineq));
        }
        cfg.safety.unsafe.push_back(std::move(region));
      }
    }

    if (doc.contains("controller_splits"))
      cfg.controller_splits = doc["controller_splits"].get<std::vector<int>>();
    cfg.dt = doc.value("dt", cfg.sampling_period / 4.0);
    cfg.cell_cap = doc.value("cell_cap", std::size_t{1000000});
  } catch (const json::exception& e) {
    throw ConfigError(path + ": " + e.what());
  }
  return cfg;
}

void save_scenario_config(const ScenarioConfig& cfg, const std::string& path) {
  json doc;
  doc["format"] = 1;
  doc["plant"] = {{"id", cfg.plant_id},
                  {"mu", cfg.plant_mu},
                  {"lead_accel", cfg.lead_accel}};
  // Paths are stored relative to the config file when possible.
  const fs::path base = fs::path(path).parent_path();
  auto relativize = [&base](const std::string& p) {
    const fs::path fp(p);
    std::error_code ec;
    const fs::path rel = fs::relative(fp, base, ec);
    return ec || rel.empty() ? fp.string() : rel.string();
  };
  doc["controller"] = relativize(cfg.controller_path);
  if (cfg.reduced_controller_path)
    doc["reduced_controller"] = relativize(*cfg.reduced_controller_path);
  if (cfg.precision_path) doc["precision"] = relativize(*cfg.precision_path);
  doc["inflation"] = cfg.inflation;
  doc["sampling_period"] = cfg.sampling_period;
  doc["horizon"] = cfg.horizon;
  doc["initial_set"] = box_to_json(cfg.initial_set);
  doc["reference_set"] = box_to_json(cfg.reference_set);
  json inputs = json::array();
  for (const TauComponent& c : cfg.layout)
    inputs.push_back(
        {{"source",
          c.source == TauComponent::Source::output ? "output" : "reference"},
         {"index", c.index}});
  doc["controller_inputs"] = std::move(inputs);
  json unsafe = json::array();
  for (const UnsafeRegion& region : cfg.safety.unsafe) {
    json jr;
    jr["description"] = region.description;
    json ineqs = json::array();
    for (const LinearInequality& ineq : region.inequalities) {
      json ji;
      ji["coeffs"] = std::vector<double>(
          ineq.coeffs.data(), ineq.coeffs.data() + ineq.coeffs.size());
      ji["bound"] = ineq.bound;
      ineqs.push_back(std::move(ji));
    }
    jr["inequalities"] = std::move(ineqs);
    unsafe.push_back(std::move(jr));
  }
  doc["unsafe"] = std::move(unsafe);
  doc["controller_splits"] = cfg.controller_splits;
  doc["dt"] = cfg.dt;
  doc["cell_cap"] = cfg.cell_cap;

  std::ofstream out(path);
  if (!out) throw ConfigError(path + ": cannot open for writing");
  out << doc.dump(1) << "\n";
}

Scenario instantiate_scenario(const ScenarioConfig& cfg) {
  Scenario sc;
  if (cfg.plant_id == "acc") {
    sc.system.plant = acc_plant_fixed_lead(cfg.plant_mu, cfg.lead_accel);
  } else {
    throw ConfigError("plant.id: unknown plant \"" + cfg.plant_id + "\"");
  }

  try {
    sc.system.controller = load_network(cfg.controller_path);
  } catch (const ParseError& e) {
    throw ConfigError(std::string("controller: ") + e.what());
  }
  if (cfg.reduced_controller_path) {
    try {
      sc.system.reduced_controller = load_network(*cfg.reduced_controller_path);
    } catch (const ParseError& e) {
      throw ConfigError(std::string("reduced_controller: ") + e.what());
    }
    if (!cfg.precision_path)
      throw ConfigError(
          "precision: required when reduced_controller is configured");
    sc.system.precision = load_precision_report(*cfg.precision_path).precision;
  }

  sc.system.sampling_period = cfg.sampling_period;
  sc.system.reference_box = cfg.reference_set;
  sc.system.input_layout = cfg.layout;
  sc.initial_set = cfg.initial_set;
  sc.safety = cfg.safety;
  sc.horizon = cfg.horizon;

  if (static_cast<Eigen::Index>(cfg.layout.size()) !=
      sc.system.controller.input_dim)
    throw ConfigError("controller_inputs: " +
                      std::to_string(cfg.layout.size()) +
                      " entries for a controller with input width " +
                      std::to_string(sc.system.controller.input_dim));
  if (sc.initial_set.dim() != sc.system.plant.state_dim)
    throw ConfigError("initial_set: dimension " +
                      std::to_string(sc.initial_set.dim()) +
                      " does not match plant state dimension " +
                      std::to_string(sc.system.plant.state_dim));
  return sc;
}

void save_precision_report(const PrecisionReport& report,
                           const std::string& path) {
  json doc;
  doc["rho"] = report.precision.rho;
  doc["norm"] = "inf";
  doc["cell_count"] = report.cell_count;
  doc["sampled_lower_bound"] = report.sampled_lower_bound;
  doc["wall_time_seconds"] = report.wall_seconds;
  doc["input_set"] = box_to_json(report.precision.input_set);
  doc["partition"] = partition_to_json(report.precision.partition_used);
  std::ofstream out(path);
  if (!out) throw ConfigError(path + ": cannot open for writing");
  out << doc.dump(1) << "\n";
}

PrecisionReport load_precision_report(const std::string& path) {
  const json doc = load_json_file(path, "precision report");
  PrecisionReport report;
  try {
    report.precision.rho = doc.at("rho").get<double>();
    if (doc.value("norm", "inf") != std::string("inf"))
      throw ConfigError(path + ": unsupported norm");
    report.cell_count = doc.value("cell_count", std::size_t{0});
    report.sampled_lower_bound = doc.value("sampled_lower_bound", 0.0);
    report.wall_seconds = doc.value("wall_time_seconds", 0.0);
    report.precision.input_set = box_from_json(doc.at("input_set"), "input_set");
    if (doc.contains("partition"))
      report.precision.partition_used =
          partition_from_json(doc["partition"], "partition");
  } catch (const json::exception& e) {
    throw ConfigError(path + ": " + e.what());
  }
  if (report.precision.rho < 0.0 || !std::isfinite(report.precision.rho))
    throw ConfigError(path + ": rho must be finite and nonnegative");
  return report;
}

}  // namespace nnmr
