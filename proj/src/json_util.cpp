#include "rebuttal/json_util.hpp"

#include <regex>

namespace rebuttal {

std::optional<std::string_view> first_balanced_object(std::string_view text) {
  for (auto start = text.find('{'); start != std::string_view::npos;
       start = text.find('{', start + 1)) {
    int depth = 0;
    bool in_string = false;
    bool escaped = false;
    for (std::size_t i = start; i < text.size(); ++i) {
      const char c = text[i];
      if (in_string) {
        if (escaped) {
          escaped = false;
        } else if (c == '\\') {
          escaped = true;
        } else if (c == '"') {
          in_string = false;
        }
        continue;
      }
      if (c == '"') {
        in_string = true;
      } else if (c == '{') {
        ++depth;
      } else if (c == '}') {
        if (--depth == 0) return text.substr(start, i - start + 1);
      }
    }
  }
  return std::nullopt;
}

std::string repair_missing_commas(std::string_view text) {
  static const std::regex kMissingComma(
      R"re(("|\d|true|false|null|\}|\])([ \t]*\r?\n\s*)("))re");
  return std::regex_replace(std::string(text), kMissingComma, "$1,$2$3");
}

std::optional<json> recover_json_object(std::string_view text) {
  const auto object = first_balanced_object(text);
  if (!object) return std::nullopt;
  auto parsed = json::parse(*object, nullptr, /*allow_exceptions=*/false);
  if (parsed.is_discarded()) {
    parsed = json::parse(repair_missing_commas(*object), nullptr, false);
  }
  if (parsed.is_discarded() || !parsed.is_object()) return std::nullopt;
  return parsed;
}

}  // namespace rebuttal
