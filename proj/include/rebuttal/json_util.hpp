#pragma once

#include <nlohmann/json.hpp>

#include <optional>
#include <string>
#include <string_view>

namespace rebuttal {

using json = nlohmann::json;

/// First balanced top-level {...} in `text`, skipping braces inside strings.
/// Models often wrap the JSON they were asked for in prose or code fences.
std::optional<std::string_view> first_balanced_object(std::string_view text);

/// Inserts the comma that is missing when a member value is followed by a
/// newline and another quoted key, e.g. `"x": "y"\n"z": 1`. Raw newlines can
/// not occur inside JSON strings, so the rewrite never touches string data.
std::string repair_missing_commas(std::string_view text);

/// Recovers a JSON object from model output: first balanced object, parsed
/// strictly, then once more after comma repair. nullopt when both fail.
std::optional<json> recover_json_object(std::string_view text);

}  // namespace rebuttal
