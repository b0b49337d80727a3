#pragma once

// Application settings, resolved in layers: built-in default, then the
// key-value config file, then REBUTTAL_* environment variables, then
// command-line flags. Each key remembers which layer set it.

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "rebuttal/provider.hpp"
#include "rebuttal/reward.hpp"

namespace rebuttal {

struct AppConfig {
  ProviderConfig provider;
  // Judge model; falls back to `provider` when no judge.* key is set.
  std::optional<ProviderConfig> judge;
  std::filesystem::path data_dir = "rebuttal-data";
  std::optional<std::filesystem::path> cache_dir;
  std::string host = "127.0.0.1";
  int port = 8080;
  std::size_t workers = 2;
  std::size_t queue_limit = 64;
  std::size_t k = 3;
  std::size_t group_size = kDefaultGroupSize;
  RewardWeights weights;
  std::uint64_t seed = 0;

  const ProviderConfig& judge_provider() const { return judge ? *judge : provider; }
};

enum class ConfigSource { kDefault, kFile, kEnv, kCli };
std::string_view to_string(ConfigSource source);

struct ResolvedConfig {
  AppConfig config;
  std::map<std::string, std::pair<std::string, ConfigSource>> values;  // key -> (value, layer)
};

/// Every accepted key with its default value, in documentation order.
const std::vector<std::pair<std::string, std::string>>& config_keys();

/// "REBUTTAL_" + key upper-cased with '.' replaced by '_'.
std::string env_var_for(std::string_view key);

/// Parses "key = value" lines; '#' starts a comment, blank lines are
/// ignored. Unknown keys and inline secrets are kPrecondition.
std::map<std::string, std::string> parse_config_text(std::string_view text);

using EnvLookup = std::function<std::optional<std::string>(const std::string&)>;
std::optional<std::string> process_env(const std::string& name);

/// Builds the layered config. `cli` holds flag overrides by key.
ResolvedConfig resolve_config(const std::optional<std::filesystem::path>& config_file,
                              const std::map<std::string, std::string>& cli,
                              const EnvLookup& env = process_env);

}  // namespace rebuttal
