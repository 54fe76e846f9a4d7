#pragma once

// Scenario <-> JSON. Keys follow the model's parameter names:
//
//   {"T": 168, "N": 10, "s": 5, "delta": 8, "beta": 8, "d_max": 10, "a": 2,
//    "c_veh": 10, "demand_model": "envelope_sinusoid", "boundary": "zero_padded"}
//
// "c_veh" defaults to N. "demand_model" is one of envelope_sinusoid,
// offset_sinusoid or explicit; explicit needs "demand", an array of T numbers.

#include <nlohmann/json.hpp>

#include <stdexcept>
#include <string>

#include "shiftplan/domain.hpp"

namespace shiftplan::io {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline std::string to_string(DemandModel m) {
  switch (m) {
    case DemandModel::EnvelopeSinusoid: return "envelope_sinusoid";
    case DemandModel::OffsetSinusoid: return "offset_sinusoid";
    case DemandModel::Explicit: return "explicit";
  }
  return "unknown";
}

inline std::string to_string(Boundary b) { return b == Boundary::ZeroPadded ? "zero_padded" : "circular"; }

namespace detail {

template <class T>
T required(const nlohmann::json& j, const char* key) {
  if (!j.contains(key)) throw ConfigError(std::string("scenario: missing key \"") + key + "\"");
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw ConfigError(std::string("scenario: key \"") + key + "\" has the wrong type");
  }
}

inline int required_int(const nlohmann::json& j, const char* key) {
  if (!j.contains(key)) throw ConfigError(std::string("scenario: missing key \"") + key + "\"");
  const auto& v = j.at(key);
  if (v.is_number_integer()) return v.get<int>();
  if (v.is_number_float()) {
    const double d = v.get<double>();
    if (d == static_cast<double>(static_cast<int>(d))) return static_cast<int>(d);
  }
  throw ConfigError(std::string("scenario: key \"") + key + "\" must be an integer");
}

}  // namespace detail

inline const char* const kScenarioKeys[] = {"T", "N", "s", "delta", "beta", "d_max", "a",
                                            "c_veh", "demand_model", "demand", "boundary"};

inline Scenario scenario_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw ConfigError("scenario: expected a JSON object");
  for (const auto& [key, value] : j.items()) {
    bool known = false;
    for (const char* k : kScenarioKeys) known = known || key == k;
    if (!known) throw ConfigError("scenario: unknown key \"" + key + "\"");
  }
  Scenario sc;
  sc.horizon = detail::required_int(j, "T");
  sc.drivers = detail::required_int(j, "N");
  sc.shifts_per_driver = detail::required_int(j, "s");
  sc.shift_length = detail::required_int(j, "delta");
  sc.min_break = detail::required_int(j, "beta");
  sc.peak_demand = j.contains("d_max") ? detail::required<double>(j, "d_max") : 0.0;
  sc.steepness = detail::required<double>(j, "a");
  sc.vehicle_cap = j.contains("c_veh") ? detail::required_int(j, "c_veh") : sc.drivers;

  const std::string model = j.contains("demand_model") ? detail::required<std::string>(j, "demand_model")
                                                       : std::string("envelope_sinusoid");
  if (model == "envelope_sinusoid") sc.demand_model = DemandModel::EnvelopeSinusoid;
  else if (model == "offset_sinusoid") sc.demand_model = DemandModel::OffsetSinusoid;
  else if (model == "explicit") sc.demand_model = DemandModel::Explicit;
  else throw ConfigError("scenario: unknown demand_model \"" + model + "\"");
  if (sc.demand_model == DemandModel::Explicit) {
    sc.demand = detail::required<std::vector<double>>(j, "demand");
  } else if (j.contains("demand")) {
    throw ConfigError("scenario: \"demand\" is only allowed with demand_model \"explicit\"");
  } else if (!j.contains("d_max")) {
    throw ConfigError("scenario: missing key \"d_max\"");
  }

  const std::string boundary = j.contains("boundary") ? detail::required<std::string>(j, "boundary")
                                                      : std::string("zero_padded");
  if (boundary == "zero_padded") sc.boundary = Boundary::ZeroPadded;
  else if (boundary == "circular") sc.boundary = Boundary::Circular;
  else throw ConfigError("scenario: unknown boundary \"" + boundary + "\"");

  try {
    sc.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  return sc;
}

inline nlohmann::json scenario_to_json(const Scenario& sc) {
  nlohmann::json j = {{"T", sc.horizon},       {"N", sc.drivers},         {"s", sc.shifts_per_driver},
                      {"delta", sc.shift_length}, {"beta", sc.min_break}, {"d_max", sc.peak_demand},
                      {"a", sc.steepness},     {"c_veh", sc.vehicle_cap}, {"demand_model", to_string(sc.demand_model)},
                      {"boundary", to_string(sc.boundary)}};
  if (sc.demand_model == DemandModel::Explicit) j["demand"] = sc.demand;
  return j;
}

}  // namespace shiftplan::io
