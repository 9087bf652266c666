#include "nnmr/network_io.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "nnmr/errors.hpp"

namespace nnmr {

namespace {

using nlohmann::json;

Activation parse_activation(const json& j, const std::string& where) {
  if (!j.is_string())
    throw ParseError(where + ": activation must be a string");
  const std::string name = j.get<std::string>();
  if (name == "relu") return Activation::relu;
  if (name == "linear") return Activation::linear;
  throw ParseError(where + ": unknown activation \"" + name + "\"");
}

std::vector<Activation> parse_activations(const json& j, Eigen::Index rows,
                                          const std::string& where) {
  if (j.is_string())
    return std::vector<Activation>(static_cast<std::size_t>(rows),
                                   parse_activation(j, where));
  if (j.is_array()) {
    if (static_cast<Eigen::Index>(j.size()) != rows)
      throw ParseError(where + ": activation list has " +
                       std::to_string(j.size()) + " entries for " +
                       std::to_string(rows) + " rows");
    std::vector<Activation> acts;
    acts.reserve(j.size());
    for (std::size_t i = 0; i < j.size(); ++i)
      acts.push_back(
          parse_activation(j[i], where + "[" + std::to_string(i) + "]"));
    return acts;
  }
  throw ParseError(where + ": activation must be a string or list of strings");
}

double parse_number(const json& j, const std::string& where) {
  if (!j.is_number()) throw ParseError(where + ": expected a number");
  return j.get<double>();
}

Layer parse_layer(const json& j, const std::string& where) {
  if (!j.is_object()) throw ParseError(where + ": expected an object");
  if (!j.contains("weights") || !j["weights"].is_array() ||
      j["weights"].empty())
    throw ParseError(where + ".weights: expected a non-empty array of rows");
  if (!j.contains("bias") || !j["bias"].is_array())
    throw ParseError(where + ".bias: expected an array");
  if (!j.contains("activation"))
    throw ParseError(where + ".activation: missing");

  const json& w = j["weights"];
  const auto rows = static_cast<Eigen::Index>(w.size());
  if (!w[0].is_array())
    throw ParseError(where + ".weights row 0: expected an array");
  const auto cols = static_cast<Eigen::Index>(w[0].size());

  Eigen::MatrixXd weights(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    const json& row = w[static_cast<std::size_t>(r)];
    const std::string row_where =
        where + ".weights row " + std::to_string(r);
    if (!row.is_array()) throw ParseError(row_where + ": expected an array");
    if (static_cast<Eigen::Index>(row.size()) != cols)
      throw ParseError(row_where + ": has " + std::to_string(row.size()) +
                       " entries, row 0 has " + std::to_string(cols));
    for (Eigen::Index c = 0; c < cols; ++c)
      weights(r, c) = parse_number(row[static_cast<std::size_t>(c)],
                                   row_where + " col " + std::to_string(c));
  }

  const json& b = j["bias"];
  Eigen::VectorXd bias(static_cast<Eigen::Index>(b.size()));
  for (Eigen::Index i = 0; i < bias.size(); ++i)
    bias[i] = parse_number(b[static_cast<std::size_t>(i)],
                           where + ".bias[" + std::to_string(i) + "]");

  return Layer(std::move(weights), std::move(bias),
               parse_activations(j["activation"], rows, where + ".activation"));
}

std::string findings_to_message(const ValidationReport& report) {
  std::ostringstream os;
  os << "network fails validation:";
  for (const auto& f : report) os << "\n  " << f.where << ": " << f.what;
  return os.str();
}

}  // namespace

Network parse_network(std::istream& in, const std::string& context) {
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ParseError(context + ": " + e.what());
  }
  if (!doc.is_object()) throw ParseError(context + ": expected a JSON object");
  if (!doc.contains("format") || !doc["format"].is_number_integer())
    throw ParseError(context + ": missing integer \"format\"");
  const int format = doc["format"].get<int>();
  if (format != 1 && format != 2)
    throw ParseError(context + ": unsupported format " +
                     std::to_string(format));
  if (!doc.contains("input_dim") || !doc["input_dim"].is_number_integer())
    throw ParseError(context + ": missing integer \"input_dim\"");
  if (!doc.contains("layers") || !doc["layers"].is_array() ||
      doc["layers"].empty())
    throw ParseError(context + ": missing non-empty \"layers\" array");

  Network net;
  net.input_dim = doc["input_dim"].get<Eigen::Index>();
  const json& layers = doc["layers"];
  net.layers.reserve(layers.size());
  for (std::size_t k = 0; k < layers.size(); ++k)
    net.layers.push_back(
        parse_layer(layers[k], "layers[" + std::to_string(k) + "]"));

  if (const ValidationReport report = validate(net); !report.empty())
    throw ParseError(context + ": " + findings_to_message(report));
  return net;
}

Network load_network(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(path + ": cannot open for reading");
  return parse_network(in, path);
}

void write_network(const Network& net, std::ostream& out) {
  bool uniform = true;
  for (const Layer& layer : net.layers) uniform &= layer.uniform_activation();

  json doc;
  doc["format"] = uniform ? 1 : 2;
  doc["input_dim"] = net.input_dim;
  json layers = json::array();
  for (const Layer& layer : net.layers) {
    json jl;
    json rows = json::array();
    for (Eigen::Index r = 0; r < layer.weights.rows(); ++r) {
      json row = json::array();
      for (Eigen::Index c = 0; c < layer.weights.cols(); ++c)
        row.push_back(layer.weights(r, c));
      rows.push_back(std::move(row));
    }
    jl["weights"] = std::move(rows);
    json bias = json::array();
    for (Eigen::Index i = 0; i < layer.bias.size(); ++i)
      bias.push_back(layer.bias[i]);
    jl["bias"] = std::move(bias);
    if (layer.uniform_activation()) {
      jl["activation"] = to_string(layer.activations.empty()
                                       ? Activation::linear
                                       : layer.activations[0]);
    } else {
      json acts = json::array();
      for (Activation a : layer.activations) acts.push_back(to_string(a));
      jl["activation"] = std::move(acts);
    }
    layers.push_back(std::move(jl));
  }
  doc["layers"] = std::move(layers);
  out << doc.dump(1) << "\n";
}

void save_network(const Network& net, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ParseError(path + ": cannot open for writing");
  write_network(net, out);
  if (!out) throw ParseError(path + ": write failed");
}

}  // namespace nnmr
