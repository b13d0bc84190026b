#pragma once

#include <string>

#include <json.hpp>

#include "hardnet/rational.hpp"

namespace hardnet {

/// obj[key] = "num/den" and obj[key + "_f64"] = nearest binary64.
inline void put_rational(nlohmann::ordered_json& obj, const std::string& key, const Rational& value) {
  obj[key] = to_string(value);
  obj[key + "_f64"] = to_double(value);
}

}  // namespace hardnet
