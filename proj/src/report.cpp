#include "corespect/report.hpp"

#include <fstream>

#include "corespect/errors.hpp"

namespace corespect {

json report_envelope(const std::string& command, std::uint64_t seed,
                     const json& params, int n, int dim) {
  json j;
  j["command"] = command;
  j["seed"] = seed;
  j["params"] = params;
  j["data"] = {{"n", n}, {"dim", dim}};
  j["timings_sec"] = json::object();
  j["results"] = json::object();
  return j;
}

json timings_json(const StageSeconds& s) {
  return json{{"density", s.density},
              {"flowrank", s.flowrank},
              {"core", s.core},
              {"cdnn", s.cdnn},
              {"expansion", s.expansion}};
}

namespace {

bool type_matches(const json& value, const std::string& type) {
  if (type == "object") return value.is_object();
  if (type == "array") return value.is_array();
  if (type == "string") return value.is_string();
  if (type == "boolean") return value.is_boolean();
  if (type == "integer") return value.is_number_integer();
  if (type == "number") return value.is_number();
  if (type == "null") return value.is_null();
  return false;
}

std::string validate_node(const json& value, const json& schema,
                          const std::string& path) {
  if (schema.contains("type")) {
    const std::string type = schema["type"].get<std::string>();
    if (!type_matches(value, type))
      return path + ": expected " + type + ", got " +
             std::string(value.type_name());
  }
  if (schema.contains("enum")) {
    bool hit = false;
    for (const auto& option : schema["enum"])
      if (option == value) hit = true;
    if (!hit) return path + ": value not in enum";
  }
  if (schema.contains("required") && value.is_object()) {
    for (const auto& key : schema["required"]) {
      if (!value.contains(key.get<std::string>()))
        return path + ": missing required key '" + key.get<std::string>() +
               "'";
    }
  }
  if (schema.contains("properties") && value.is_object()) {
    for (auto it = schema["properties"].begin();
         it != schema["properties"].end(); ++it) {
      if (!value.contains(it.key())) continue;
      std::string err =
          validate_node(value[it.key()], it.value(), path + "." + it.key());
      if (!err.empty()) return err;
    }
  }
  if (schema.contains("items") && value.is_array()) {
    for (std::size_t i = 0; i < value.size(); ++i) {
      std::string err = validate_node(value[i], schema["items"],
                                      path + "[" + std::to_string(i) + "]");
      if (!err.empty()) return err;
    }
  }
  return "";
}

}  // namespace

std::string validate_report(const json& report, const json& schema) {
  return validate_node(report, schema, "$");
}

json builtin_report_schema() {
  // Mirror of schema/report.schema.json so the CLI can validate without
  // knowing where the source tree lives.
  return json::parse(R"({
    "$schema": "http://json-schema.org/draft-07/schema#",
    "title": "corespect report",
    "type": "object",
    "required": ["command", "seed", "params", "data", "timings_sec", "results"],
    "properties": {
      "command": {
        "type": "string",
        "enum": ["cluster", "rank", "synth", "eval", "noise-sweep", "fraction-curve", "diagnose"]
      },
      "seed": { "type": "integer" },
      "params": { "type": "object" },
      "data": {
        "type": "object",
        "required": ["n", "dim"],
        "properties": {
          "n": { "type": "integer" },
          "dim": { "type": "integer" }
        }
      },
      "timings_sec": { "type": "object" },
      "results": { "type": "object" }
    }
  })");
}

void write_json_file(const json& j, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw data_error("cannot open '" + path + "' for writing");
  out << j.dump(2) << '\n';
  if (!out) throw data_error("write failed for '" + path + "'");
}

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw data_error("cannot open '" + path + "' for reading");
  json j;
  try {
    in >> j;
  } catch (const std::exception& ex) {
    throw data_error("'" + path + "': invalid JSON (" + ex.what() + ")");
  }
  return j;
}

}  // namespace corespect
