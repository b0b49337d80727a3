#include "support.hpp"

#include <random>

#include "rebuttal/text.hpp"

namespace testsupport {

namespace fs = std::filesystem;
using rebuttal::json;

fs::path fixture(const std::string& name) { return fs::path(REBUTTAL_FIXTURE_DIR) / name; }

std::string read_fixture(const std::string& name) { return rebuttal::read_file(fixture(name)); }

json load_schema(const std::string& name) {
  return json::parse(rebuttal::read_file(fs::path(REBUTTAL_SCHEMA_DIR) / (name + ".json")));
}

TempDir::TempDir() {
  std::random_device rd;
  for (int i = 0; i < 100; ++i) {
    auto p = fs::temp_directory_path() / ("rebuttal-test-" + std::to_string(rd()));
    if (fs::create_directory(p)) {
      path_ = p;
      return;
    }
  }
  throw std::runtime_error("cannot create temp dir");
}

TempDir::~TempDir() {
  std::error_code ec;
  fs::remove_all(path_, ec);
}

namespace {

bool type_matches(const std::string& type, const json& v) {
  if (type == "object") return v.is_object();
  if (type == "array") return v.is_array();
  if (type == "string") return v.is_string();
  if (type == "integer") return v.is_number_integer();
  if (type == "number") return v.is_number();
  if (type == "boolean") return v.is_boolean();
  if (type == "null") return v.is_null();
  return false;
}

const json& resolve(const json& root, const json& schema) {
  if (!schema.contains("$ref")) return schema;
  const auto ref = schema.at("$ref").get<std::string>();
  const std::string prefix = "#/definitions/";
  if (ref.rfind(prefix, 0) != 0) throw std::runtime_error("unsupported $ref " + ref);
  return root.at("definitions").at(ref.substr(prefix.size()));
}

void check(const json& root, const json& schema_in, const json& v, const std::string& at,
           std::vector<std::string>& errors) {
  const json& schema = resolve(root, schema_in);
  if (schema.contains("type")) {
    const auto& t = schema.at("type");
    bool ok = false;
    if (t.is_string()) {
      ok = type_matches(t.get<std::string>(), v);
    } else {
      for (const auto& one : t) ok = ok || type_matches(one.get<std::string>(), v);
    }
    if (!ok) {
      errors.push_back(at + ": expected type " + t.dump() + ", got " + v.type_name());
      return;
    }
  }
  if (schema.contains("enum")) {
    bool ok = false;
    for (const auto& e : schema.at("enum")) ok = ok || e == v;
    if (!ok) errors.push_back(at + ": " + v.dump() + " not in enum");
  }
  if (schema.contains("oneOf")) {
    int matches = 0;
    for (const auto& alt : schema.at("oneOf")) {
      std::vector<std::string> sub;
      check(root, alt, v, at, sub);
      if (sub.empty()) ++matches;
    }
    if (matches != 1) errors.push_back(at + ": matches " + std::to_string(matches) + " oneOf branches");
  }
  if (v.is_number()) {
    if (schema.contains("minimum") && v.get<double>() < schema.at("minimum").get<double>()) {
      errors.push_back(at + ": below minimum");
    }
    if (schema.contains("maximum") && v.get<double>() > schema.at("maximum").get<double>()) {
      errors.push_back(at + ": above maximum");
    }
  }
  if (v.is_object()) {
    if (schema.contains("required")) {
      for (const auto& r : schema.at("required")) {
        if (!v.contains(r.get<std::string>())) errors.push_back(at + ": missing " + r.get<std::string>());
      }
    }
    const bool closed = schema.contains("additionalProperties") &&
                        schema.at("additionalProperties") == false;
    for (auto it = v.begin(); it != v.end(); ++it) {
      if (schema.contains("properties") && schema.at("properties").contains(it.key())) {
        check(root, schema.at("properties").at(it.key()), *it, at + "." + it.key(), errors);
      } else if (closed) {
        errors.push_back(at + ": unexpected property " + it.key());
      }
    }
  }
  if (v.is_array()) {
    if (schema.contains("minItems") && v.size() < schema.at("minItems").get<std::size_t>()) {
      errors.push_back(at + ": fewer than minItems");
    }
    if (schema.contains("items")) {
      for (std::size_t i = 0; i < v.size(); ++i) {
        check(root, schema.at("items"), v[i], at + "[" + std::to_string(i) + "]", errors);
      }
    }
  }
}

}  // namespace

std::vector<std::string> schema_errors(const json& schema, const json& instance) {
  std::vector<std::string> errors;
  check(schema, schema, instance, "$", errors);
  return errors;
}

}  // namespace testsupport
