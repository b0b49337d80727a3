#include "rebuttal/app_config.hpp"

#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <sstream>

#include "rebuttal/errors.hpp"
#include "rebuttal/text.hpp"

namespace rebuttal {

namespace {

const std::vector<std::string> kProviderFields = {
    "endpoint",    "model_id",  "embedding_model_id", "api_key_env", "secrets_file",
    "temperature", "timeout_ms", "max_retries",       "rate_limit",  "embed_batch_limit",
    "backoff_ms"};

std::vector<std::pair<std::string, std::string>> build_keys() {
  const ProviderConfig p;
  const AppConfig a;
  std::vector<std::pair<std::string, std::string>> keys = {
      {"provider.endpoint", p.endpoint},
      {"provider.model_id", p.model_id},
      {"provider.embedding_model_id", p.embedding_model_id},
      {"provider.api_key_env", p.api_key_env},
      {"provider.secrets_file", ""},
      {"provider.temperature", "0"},
      {"provider.timeout_ms", std::to_string(p.timeout.count())},
      {"provider.max_retries", std::to_string(p.max_retries)},
      {"provider.rate_limit", "0"},
      {"provider.embed_batch_limit", std::to_string(p.embed_batch_limit)},
      {"provider.backoff_ms", std::to_string(p.backoff_base.count())},
  };
  for (const auto& f : kProviderFields) keys.emplace_back("judge." + f, "");
  keys.insert(keys.end(), {
                              {"data_dir", a.data_dir.string()},
                              {"cache_dir", ""},
                              {"serve.host", a.host},
                              {"serve.port", std::to_string(a.port)},
                              {"serve.workers", std::to_string(a.workers)},
                              {"serve.queue_limit", std::to_string(a.queue_limit)},
                              {"tsr.k", std::to_string(a.k)},
                              {"candidates.group_size", std::to_string(a.group_size)},
                              {"reward.weights", "0.1,0.3,0.3,0.3"},
                              {"seed", "0"},
                          });
  return keys;
}

bool known_key(std::string_view key) {
  const auto& keys = config_keys();
  return std::any_of(keys.begin(), keys.end(), [&](const auto& kv) { return kv.first == key; });
}

bool is_secret_key(std::string_view key) {
  const auto dot = key.rfind('.');
  const auto leaf = dot == std::string_view::npos ? key : key.substr(dot + 1);
  return leaf == "api_key" || leaf == "key" || leaf == "token" || leaf == "password";
}

template <class T>
T parse_number(const std::string& key, const std::string& value) {
  std::istringstream in(value);
  T out{};
  in >> out;
  if (!in || !in.eof()) {
    throw Error(ErrorKind::kPrecondition, "config " + key + ": not a number: " + value);
  }
  return out;
}

RewardWeights parse_weights(const std::string& value) {
  std::vector<double> w;
  std::istringstream in(value);
  std::string part;
  while (std::getline(in, part, ',')) {
    w.push_back(parse_number<double>("reward.weights", std::string(trim(part))));
  }
  if (w.size() != 4) {
    throw Error(ErrorKind::kPrecondition, "reward.weights needs four comma-separated numbers");
  }
  RewardWeights out{w[0], w[1], w[2], w[3]};
  out.validate();
  return out;
}

void apply_provider_field(ProviderConfig& p, const std::string& key, const std::string& field,
                          const std::string& v) {
  if (field == "endpoint") p.endpoint = v;
  else if (field == "model_id") p.model_id = v;
  else if (field == "embedding_model_id") p.embedding_model_id = v;
  else if (field == "api_key_env") p.api_key_env = v;
  else if (field == "secrets_file") p.secrets_file = v;
  else if (field == "temperature") p.temperature = parse_number<double>(key, v);
  else if (field == "timeout_ms") p.timeout = std::chrono::milliseconds(parse_number<long>(key, v));
  else if (field == "max_retries") p.max_retries = parse_number<int>(key, v);
  else if (field == "rate_limit") p.rate_limit = parse_number<double>(key, v);
  else if (field == "embed_batch_limit") p.embed_batch_limit = parse_number<std::size_t>(key, v);
  else if (field == "backoff_ms") p.backoff_base = std::chrono::milliseconds(parse_number<long>(key, v));
}

}  // namespace

std::string_view to_string(ConfigSource source) {
  switch (source) {
    case ConfigSource::kDefault: return "default";
    case ConfigSource::kFile: return "file";
    case ConfigSource::kEnv: return "env";
    case ConfigSource::kCli: return "cli";
  }
  return "?";
}

const std::vector<std::pair<std::string, std::string>>& config_keys() {
  static const auto keys = build_keys();
  return keys;
}

std::string env_var_for(std::string_view key) {
  std::string out = "REBUTTAL_";
  for (char c : key) {
    out += c == '.' ? '_' : static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  }
  return out;
}

std::map<std::string, std::string> parse_config_text(std::string_view text) {
  std::map<std::string, std::string> out;
  std::istringstream in{std::string(text)};
  std::string line;
  int n = 0;
  while (std::getline(in, line)) {
    ++n;
    const auto hash = line.find('#');
    const auto body = trim(std::string_view(line).substr(0, hash));
    if (body.empty()) continue;
    const auto eq = body.find('=');
    if (eq == std::string_view::npos) {
      throw Error(ErrorKind::kPrecondition, "config line " + std::to_string(n) + ": expected key = value");
    }
    const std::string key(trim(body.substr(0, eq)));
    const std::string value(trim(body.substr(eq + 1)));
    if (is_secret_key(key)) {
      throw Error(ErrorKind::kPrecondition,
                  "config line " + std::to_string(n) + ": secrets do not belong in the config " +
                      "file; set provider.api_key_env or provider.secrets_file");
    }
    if (!known_key(key)) {
      throw Error(ErrorKind::kPrecondition,
                  "config line " + std::to_string(n) + ": unknown key " + key);
    }
    out[key] = value;
  }
  return out;
}

std::optional<std::string> process_env(const std::string& name) {
  if (const char* v = std::getenv(name.c_str())) return std::string(v);
  return std::nullopt;
}

ResolvedConfig resolve_config(const std::optional<std::filesystem::path>& config_file,
                              const std::map<std::string, std::string>& cli,
                              const EnvLookup& env) {
  ResolvedConfig r;
  for (const auto& [k, v] : config_keys()) r.values[k] = {v, ConfigSource::kDefault};
  if (config_file) {
    for (const auto& [k, v] : parse_config_text(read_file(*config_file))) {
      r.values[k] = {v, ConfigSource::kFile};
    }
  }
  for (const auto& [k, v] : config_keys()) {
    if (auto e = env(env_var_for(k))) r.values[k] = {*e, ConfigSource::kEnv};
  }
  for (const auto& [k, v] : cli) {
    if (is_secret_key(k)) throw Error(ErrorKind::kUsage, "secrets can not be passed as flags");
    if (!known_key(k)) throw Error(ErrorKind::kUsage, "unknown config key " + k);
    r.values[k] = {v, ConfigSource::kCli};
  }

  auto& c = r.config;
  bool judge_set = false;
  ProviderConfig judge;
  for (const auto& [key, entry] : r.values) {
    const auto& v = entry.first;
    if (key.rfind("provider.", 0) == 0) {
      apply_provider_field(c.provider, key, key.substr(9), v);
    } else if (key.rfind("judge.", 0) == 0) {
      // judge.* layers over the resolved provider block below.
    } else if (key == "data_dir") {
      c.data_dir = v;
    } else if (key == "cache_dir") {
      if (!v.empty()) c.cache_dir = v;
    } else if (key == "serve.host") {
      c.host = v;
    } else if (key == "serve.port") {
      c.port = parse_number<int>(key, v);
    } else if (key == "serve.workers") {
      c.workers = parse_number<std::size_t>(key, v);
    } else if (key == "serve.queue_limit") {
      c.queue_limit = parse_number<std::size_t>(key, v);
    } else if (key == "tsr.k") {
      c.k = parse_number<std::size_t>(key, v);
    } else if (key == "candidates.group_size") {
      c.group_size = parse_number<std::size_t>(key, v);
    } else if (key == "reward.weights") {
      c.weights = parse_weights(v);
    } else if (key == "seed") {
      c.seed = parse_number<std::uint64_t>(key, v);
    }
  }
  judge = c.provider;
  for (const auto& f : kProviderFields) {
    const auto& entry = r.values["judge." + f];
    if (entry.first.empty()) continue;
    judge_set = true;
    apply_provider_field(judge, "judge." + f, f, entry.first);
  }
  if (judge_set) c.judge = judge;
  c.provider.validate();
  if (c.judge) c.judge->validate();
  if (c.k == 0) throw Error(ErrorKind::kPrecondition, "tsr.k must be positive");
  if (c.group_size < 2) throw Error(ErrorKind::kPrecondition, "candidates.group_size must be >= 2");
  if (c.workers == 0) throw Error(ErrorKind::kPrecondition, "serve.workers must be positive");
  return r;
}

}  // namespace rebuttal
