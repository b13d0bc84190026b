#include "hardnet/network_io.hpp"

namespace hardnet {

using nlohmann::json;
using nlohmann::ordered_json;

namespace {

std::string pointer(const std::string& base, std::size_t index) { return base + "/" + std::to_string(index); }

Rational rational_at(const json& value, const std::string& where) {
  if (!value.is_string()) throw ParseError(where, "expected a \"num/den\" string");
  try {
    return parse_rational(value.get<std::string>());
  } catch (const std::invalid_argument& e) {
    throw ParseError(where, e.what());
  }
}

const json& member(const json& obj, const char* key, const std::string& where) {
  if (!obj.is_object()) throw ParseError(where, "expected an object");
  auto it = obj.find(key);
  if (it == obj.end()) throw ParseError(where, std::string("missing field '") + key + "'");
  return *it;
}

}  // namespace

ordered_json network_to_json(const ReluNetwork& net) {
  ordered_json doc;
  doc["input_dim"] = net.input_dim();
  ordered_json layers = ordered_json::array();
  for (const auto& layer : net.layers()) {
    ordered_json weights = ordered_json::array();
    for (std::size_t r = 0; r < layer.weights.rows(); ++r) {
      ordered_json row = ordered_json::array();
      for (const auto& w : layer.weights.row(r)) row.push_back(to_string(w));
      weights.push_back(std::move(row));
    }
    ordered_json bias = ordered_json::array();
    for (const auto& b : layer.bias) bias.push_back(to_string(b));
    ordered_json entry;
    entry["weights"] = std::move(weights);
    entry["bias"] = std::move(bias);
    entry["activation"] = layer.activation == Activation::kRelu ? "relu" : "linear";
    layers.push_back(std::move(entry));
  }
  doc["layers"] = std::move(layers);
  ordered_json meta;
  meta["hidden_layers"] = net.meta().hidden_layers;
  meta["unit_count"] = net.meta().unit_count;
  meta["weight_bound"] = to_string(net.meta().weight_bound);
  doc["meta"] = std::move(meta);
  return doc;
}

ReluNetwork network_from_json(const json& doc) {
  const json& dim = member(doc, "input_dim", "");
  if (!dim.is_number_unsigned() || dim.get<std::uint64_t>() == 0) {
    throw ParseError("/input_dim", "expected a positive integer");
  }
  const auto input_dim = dim.get<std::size_t>();
  const json& layers_doc = member(doc, "layers", "");
  if (!layers_doc.is_array() || layers_doc.empty()) throw ParseError("/layers", "expected a nonempty array");

  std::vector<AffineLayer> layers;
  std::size_t width = input_dim;
  for (std::size_t i = 0; i < layers_doc.size(); ++i) {
    const std::string here = pointer("/layers", i);
    const json& weights = member(layers_doc[i], "weights", here);
    const json& bias = member(layers_doc[i], "bias", here);
    const json& activation = member(layers_doc[i], "activation", here);
    if (!weights.is_array() || weights.empty()) throw ParseError(here + "/weights", "expected a nonempty array");
    if (!bias.is_array()) throw ParseError(here + "/bias", "expected an array");
    if (bias.size() != weights.size()) {
      throw ParseError(here + "/bias", "length " + std::to_string(bias.size()) + " != row count " +
                                           std::to_string(weights.size()));
    }
    AffineLayer layer{RationalMatrix(weights.size(), width), {}, Activation::kRelu};
    for (std::size_t r = 0; r < weights.size(); ++r) {
      const std::string row_at = pointer(here + "/weights", r);
      const json& row = weights[r];
      if (!row.is_array()) throw ParseError(row_at, "expected an array");
      if (row.size() != width) {
        throw ParseError(row_at, "row width " + std::to_string(row.size()) + " != expected input width " +
                                     std::to_string(width));
      }
      for (std::size_t c = 0; c < width; ++c) layer.weights(r, c) = rational_at(row[c], pointer(row_at, c));
    }
    for (std::size_t r = 0; r < bias.size(); ++r) layer.bias.push_back(rational_at(bias[r], pointer(here + "/bias", r)));
    if (activation == "relu") {
      layer.activation = Activation::kRelu;
    } else if (activation == "linear") {
      layer.activation = Activation::kLinear;
    } else {
      throw ParseError(here + "/activation", "expected \"relu\" or \"linear\"");
    }
    width = layer.output_width();
    layers.push_back(std::move(layer));
  }
  try {
    return ReluNetwork::create(input_dim, std::move(layers));
  } catch (const NetworkError& e) {
    throw ParseError(e.layer_index() ? pointer("/layers", *e.layer_index()) : "", e.what());
  }
}

std::string serialize(const ReluNetwork& net) { return network_to_json(net).dump(2) + "\n"; }

ReluNetwork deserialize(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError("", std::string("invalid JSON: ") + e.what());
  }
  return network_from_json(doc);
}

ReluNetwork round_trip(const ReluNetwork& net) { return deserialize(serialize(net)); }

}  // namespace hardnet
