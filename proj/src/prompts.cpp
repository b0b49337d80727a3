#include "rebuttal/prompts.hpp"

#include <algorithm>
#include <map>
#include <mutex>

#include "rebuttal/errors.hpp"
#include "rebuttal/json_util.hpp"
#include "rebuttal/text.hpp"

namespace rebuttal::prompts {

std::string section(std::string_view name, std::string_view text) {
  return std::string(name) + ":\n<<<\n" + std::string(text) + "\n>>>\n";
}

std::string_view get(std::string_view name) {
  for (const auto& a : detail::assets()) {
    if (a.name == name) return a.text;
  }
  throw Error(ErrorKind::kPrecondition, "unknown prompt asset: " + std::string(name));
}

std::string template_hash(std::string_view name) {
  static std::mutex mu;
  static std::map<std::string, std::string, std::less<>> memo;
  std::lock_guard lock(mu);
  if (auto it = memo.find(name); it != memo.end()) return it->second;
  auto h = sha256_hex(get(name));
  memo.emplace(std::string(name), h);
  return h;
}

std::vector<std::string> default_negatives() {
  return json::parse(get("negatives")).get<std::vector<std::string>>();
}

std::vector<std::string> names() {
  std::vector<std::string> out;
  for (const auto& a : detail::assets()) out.emplace_back(a.name);
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace rebuttal::prompts
