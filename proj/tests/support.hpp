#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "rebuttal/json_util.hpp"

namespace testsupport {

std::filesystem::path fixture(const std::string& name);
std::string read_fixture(const std::string& name);
rebuttal::json load_schema(const std::string& name);

// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  TempDir();
  ~TempDir();
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

// Checks `instance` against the subset of JSON Schema the published schemas
// use: type, enum, required, properties, additionalProperties (bool),
// items, minItems, minimum, maximum, oneOf and local $ref. Returns one
// message per violation.
std::vector<std::string> schema_errors(const rebuttal::json& schema, const rebuttal::json& instance);

}  // namespace testsupport
