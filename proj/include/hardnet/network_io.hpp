#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

#include <json.hpp>

#include "hardnet/relu_ir.hpp"

namespace hardnet {

/// Malformed network document. `location()` is a JSON pointer to the
/// offending value ("" for the document root).
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& location, const std::string& message)
      : std::runtime_error(location.empty() ? message : location + ": " + message), location_(location) {}
  const std::string& location() const { return location_; }

 private:
  std::string location_;
};

nlohmann::ordered_json network_to_json(const ReluNetwork& net);
ReluNetwork network_from_json(const nlohmann::json& doc);

/// Canonical text: fixed key order, two-space indentation, trailing newline.
std::string serialize(const ReluNetwork& net);
ReluNetwork deserialize(std::string_view text);
ReluNetwork round_trip(const ReluNetwork& net);

}  // namespace hardnet
