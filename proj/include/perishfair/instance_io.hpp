#pragma once

#include <string>

#include <json.hpp>

#include "perishfair/core.hpp"

namespace perishfair {

// Builds an instance from a parsed JSON/TOML tree. Errors name the offending
// key path, e.g. "demand.sd: expected a number".
ProblemInstance instance_from_json(const nlohmann::json& doc);

// Reads a .toml or .json file (by extension; otherwise sniffed from the
// first non-blank character).
ProblemInstance load_instance(const std::string& path);

// Parses instance text; `toml` selects the reader.
ProblemInstance parse_instance(const std::string& text, bool toml);

}  // namespace perishfair
