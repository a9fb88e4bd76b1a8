#pragma once

#include <memory>
#include <set>
#include <string>

#include <json.hpp>

#include "elastcert/energy.hpp"
#include "elastcert/errors.hpp"

namespace elastcert {

namespace detail {

inline void reject_unknown_keys(const nlohmann::json& obj, const std::set<std::string>& allowed,
                                const std::string& where) {
  for (const auto& item : obj.items()) {
    if (!allowed.count(item.key()))
      throw ConfigError(where + ": unknown key \"" + item.key() + "\"");
  }
}

inline double require_number(const nlohmann::json& obj, const std::string& key,
                             const std::string& where) {
  if (!obj.contains(key) || !obj[key].is_number())
    throw ConfigError(where + ": missing numeric \"" + key + "\"");
  return obj[key].get<double>();
}

}  // namespace detail

/// Scalar triple from config: "neg_log", "zero", or {"pow": exponent}.
inline ScalarC2Function scalar_function_from_config(const nlohmann::json& node,
                                                    const std::string& where) {
  if (node.is_string()) {
    const std::string name = node.get<std::string>();
    if (name == "neg_log") return neg_log_function();
    if (name == "zero") return zero_function();
    throw ConfigError(where + ": unknown scalar function \"" + name + "\"");
  }
  if (node.is_object()) {
    detail::reject_unknown_keys(node, {"pow"}, where);
    if (node.contains("pow") && node["pow"].is_number())
      return power_function(node["pow"].get<double>());
  }
  throw ConfigError(where + ": expected \"neg_log\", \"zero\" or {\"pow\": p}");
}

/// Model factory for the structured-text configuration format:
///   {"name": "quad_log",       "alpha": a, "beta": b, "unconstrained"?: bool}
///   {"name": "trace_log",      "alpha": a, "beta": b, "unconstrained"?: bool}
///   {"name": "neo_hooke",      "mu": m, "alpha": a, "beta": b}
///   {"name": "svk",            "mu": m, "lambda": l}
///   {"name": "det_function",   "f": <scalar>}
///   {"name": "valanis_landel", "w": <scalar>, "g"?: <scalar>}
inline std::shared_ptr<EnergyModel> model_from_config(const nlohmann::json& node) {
  if (!node.is_object() || !node.contains("name") || !node["name"].is_string())
    throw ConfigError("model: expected an object with a \"name\" string");
  const std::string name = node["name"].get<std::string>();
  try {
    if (name == "quad_log" || name == "trace_log") {
      detail::reject_unknown_keys(node, {"name", "alpha", "beta", "unconstrained"}, name);
      const double a = detail::require_number(node, "alpha", name);
      const double b = detail::require_number(node, "beta", name);
      const bool unconstrained = node.value("unconstrained", false);
      if (name == "quad_log")
        return unconstrained
                   ? std::make_shared<QuadLogModel>(QuadLogModel::unconstrained(a, b))
                   : std::make_shared<QuadLogModel>(a, b);
      return unconstrained
                 ? std::make_shared<TraceLogModel>(TraceLogModel::unconstrained(a, b))
                 : std::make_shared<TraceLogModel>(a, b);
    }
    if (name == "neo_hooke") {
      detail::reject_unknown_keys(node, {"name", "mu", "alpha", "beta"}, name);
      return std::make_shared<NeoHookeModel>(detail::require_number(node, "mu", name),
                                             detail::require_number(node, "alpha", name),
                                             detail::require_number(node, "beta", name));
    }
    if (name == "svk") {
      detail::reject_unknown_keys(node, {"name", "mu", "lambda"}, name);
      return std::make_shared<SaintVenantKirchhoffModel>(
          detail::require_number(node, "mu", name),
          detail::require_number(node, "lambda", name));
    }
    if (name == "det_function") {
      detail::reject_unknown_keys(node, {"name", "f"}, name);
      if (!node.contains("f")) throw ConfigError("det_function: missing \"f\"");
      return std::make_shared<DetFunctionModel>(
          scalar_function_from_config(node["f"], "det_function.f"));
    }
    if (name == "valanis_landel") {
      detail::reject_unknown_keys(node, {"name", "w", "g"}, name);
      if (!node.contains("w")) throw ConfigError("valanis_landel: missing \"w\"");
      ScalarC2Function w = scalar_function_from_config(node["w"], "valanis_landel.w");
      if (node.contains("g"))
        return std::make_shared<ValanisLandelModel>(
            std::move(w), scalar_function_from_config(node["g"], "valanis_landel.g"));
      return std::make_shared<ValanisLandelModel>(std::move(w));
    }
  } catch (const std::invalid_argument& e) {
    // parameter-constraint violations surface as configuration errors
    throw ConfigError(std::string("model: ") + e.what());
  }
  throw ConfigError("model: unknown model name \"" + name + "\"");
}

}  // namespace elastcert
