#pragma once

#include "harris/fixtures.hpp"

#include <string>

namespace harris {

/// Loads and validates a model JSON file into a Fixture. Unknown fields are
/// rejected with a path-precise message (std::invalid_argument).
Fixture load_model(const std::string& path);
Fixture parse_model(const std::string& json_text, const std::string& origin = "<inline>");

/// Writes a Fixture out in the model schema (used to ship the fixture
/// library as files).
std::string model_to_json(const Fixture& f);

}  // namespace harris
