#pragma once

#include <string>

#include <json.hpp>

#include "corespect/pipeline.hpp"

namespace corespect {

using json = nlohmann::json;

// Shared envelope for every CLI report:
//   { command, seed, params: {...}, data: {n, dim}, timings_sec: {...},
//     results: {...} }
// Command-specific content lives under results.
json report_envelope(const std::string& command, std::uint64_t seed,
                     const json& params, int n, int dim);

// Stage timings for pipeline-driven commands.
json timings_json(const StageSeconds& s);

// Structural validation against the shipped schema (schema/report.schema.json):
// checks `type`, `required`, `properties`, `enum` and `items` recursively.
// Returns an empty string when valid, else a human-readable reason.
std::string validate_report(const json& report, const json& schema);

// Loads schema/report.schema.json relative to the executable's idea of the
// project (the path is passed in; the CLI embeds a fallback copy).
json builtin_report_schema();

void write_json_file(const json& j, const std::string& path);
json read_json_file(const std::string& path);

}  // namespace corespect
