#pragma once

#include <string>

#include <nlohmann/json.hpp>

#include "ssod/errors.hpp"

namespace ssod::detail {

inline const nlohmann::json& require_field(const nlohmann::json& j,
                                           const char* key,
                                           const std::string& ctx) {
  auto it = j.find(key);
  if (it == j.end())
    throw ValidationError(ctx + ": missing field '" + key + "'");
  return *it;
}

inline std::string require_string(const nlohmann::json& j, const char* key,
                                  const std::string& ctx) {
  const auto& v = require_field(j, key, ctx);
  if (!v.is_string())
    throw ValidationError(ctx + ": field '" + key + "' must be a string");
  return v.get<std::string>();
}

inline int require_int(const nlohmann::json& j, const char* key,
                       const std::string& ctx) {
  const auto& v = require_field(j, key, ctx);
  if (!v.is_number_integer())
    throw ValidationError(ctx + ": field '" + key + "' must be an integer");
  return v.get<int>();
}

inline double require_double(const nlohmann::json& j, const char* key,
                             const std::string& ctx) {
  const auto& v = require_field(j, key, ctx);
  if (!v.is_number())
    throw ValidationError(ctx + ": field '" + key + "' must be a number");
  return v.get<double>();
}

}  // namespace ssod::detail
