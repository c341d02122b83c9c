#pragma once

#include <string>

#include "cfrecs/error.hpp"
#include "cfrecs/graph.hpp"
#include "json.hpp"

namespace cfrecs::detail {

inline nlohmann::json schema_to_json(const Schema& schema) {
  nlohmann::json attrs = nlohmann::json::array();
  for (const AttributeSpec& a : schema.attributes)
    attrs.push_back({{"name", a.name}, {"vocab_size", a.vocab_size}});
  return {{"attributes", attrs},
          {"price_log_mean", schema.price_log_mean},
          {"price_log_std", schema.price_log_std}};
}

inline Schema schema_from_json(const nlohmann::json& j, const std::string& where) {
  Schema schema;
  try {
    for (const nlohmann::json& ja : j.at("attributes"))
      schema.attributes.push_back(
          {ja.at("name").get<std::string>(), ja.at("vocab_size").get<int>()});
    schema.price_log_mean = j.at("price_log_mean").get<double>();
    schema.price_log_std = j.at("price_log_std").get<double>();
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(where + ": malformed schema: " + e.what());
  }
  if (schema.attributes.empty()) throw ValidationError(where + ": schema has no attributes");
  for (const AttributeSpec& a : schema.attributes)
    if (a.vocab_size < 1)
      throw ValidationError(where + ": attribute '" + a.name + "' has empty vocabulary");
  if (!(schema.price_log_std > 0.0))
    throw ValidationError(where + ": price_log_std must be positive");
  return schema;
}

}  // namespace cfrecs::detail
