#pragma once

#include <string>

#include <json.hpp>

namespace perishfair {

// Reads the TOML subset used by instance files into a JSON tree:
// [table] and [[array-of-tables]] headers, dotted keys, basic and literal
// strings, integers, floats (including inf/nan), booleans, multi-line arrays
// and inline tables. Dates and multi-line strings are rejected.
// Throws Error(kParse) with the line number on malformed input.
nlohmann::json parse_toml(const std::string& text);

}  // namespace perishfair
