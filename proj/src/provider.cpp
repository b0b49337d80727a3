#include "rebuttal/provider.hpp"

#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <regex>
#include <sstream>
#include <thread>

#include "rebuttal/errors.hpp"
#include "rebuttal/json_util.hpp"
#include "rebuttal/text.hpp"

namespace rebuttal {

void ProviderConfig::validate() const {
  static const std::regex kUrl(R"(^(https?://[A-Za-z0-9.\-]+(:\d+)?(/[^\s]*)?|mock://.*)$)");
  if (!std::regex_match(endpoint, kUrl)) {
    throw Error(ErrorKind::kPrecondition, "malformed provider endpoint: " + endpoint);
  }
  if (model_id.empty()) throw Error(ErrorKind::kPrecondition, "model_id is empty");
  if (max_retries < 0) throw Error(ErrorKind::kPrecondition, "max_retries must be >= 0");
  if (temperature < 0) throw Error(ErrorKind::kPrecondition, "temperature must be >= 0");
  if (rate_limit < 0) throw Error(ErrorKind::kPrecondition, "rate_limit must be >= 0");
  if (embed_batch_limit == 0) {
    throw Error(ErrorKind::kPrecondition, "embed_batch_limit must be positive");
  }
}

ProviderConfig provider_config_from_json(const json& j) {
  if (!j.is_object()) throw Error(ErrorKind::kSchemaMismatch, "provider config must be an object");
  ProviderConfig c;
  for (auto it = j.begin(); it != j.end(); ++it) {
    const auto& k = it.key();
    const auto& v = *it;
    try {
      if (k == "endpoint") c.endpoint = v.get<std::string>();
      else if (k == "model_id") c.model_id = v.get<std::string>();
      else if (k == "embedding_model_id") c.embedding_model_id = v.get<std::string>();
      else if (k == "api_key_env") c.api_key_env = v.get<std::string>();
      else if (k == "secrets_file") c.secrets_file = v.get<std::string>();
      else if (k == "temperature") c.temperature = v.get<double>();
      else if (k == "seed") c.seed = v.is_null() ? std::nullopt : std::optional(v.get<std::uint64_t>());
      else if (k == "max_retries") c.max_retries = v.get<int>();
      else if (k == "timeout_ms") c.timeout = std::chrono::milliseconds(v.get<long>());
      else if (k == "rate_limit") c.rate_limit = v.get<double>();
      else if (k == "embed_batch_limit") c.embed_batch_limit = v.get<std::size_t>();
      else if (k == "backoff_ms") c.backoff_base = std::chrono::milliseconds(v.get<long>());
      else if (k == "api_key" || k == "key" || k == "token")
        throw Error(ErrorKind::kPrecondition,
                    "provider config must not contain a secret; use api_key_env or secrets_file");
      else throw Error(ErrorKind::kSchemaMismatch, "unknown provider config field " + k);
    } catch (const json::exception& e) {
      throw Error(ErrorKind::kSchemaMismatch, "bad provider config field " + k + ": " + e.what());
    }
  }
  c.validate();
  return c;
}

json to_json(const ProviderConfig& c) {
  return json{{"endpoint", c.endpoint},
              {"model_id", c.model_id},
              {"embedding_model_id", c.embedding_model_id},
              {"api_key_env", c.api_key_env},
              {"secrets_file", c.secrets_file},
              {"temperature", c.temperature},
              {"seed", c.seed ? json(*c.seed) : json(nullptr)},
              {"max_retries", c.max_retries},
              {"timeout_ms", c.timeout.count()},
              {"rate_limit", c.rate_limit},
              {"embed_batch_limit", c.embed_batch_limit},
              {"backoff_ms", c.backoff_base.count()}};
}

std::string resolve_api_key(const ProviderConfig& config) {
  if (!config.api_key_env.empty()) {
    if (const char* v = std::getenv(config.api_key_env.c_str()); v && *v) return v;
  }
  if (!config.secrets_file.empty()) {
    std::ifstream in(config.secrets_file);
    std::stringstream ss;
    ss << in.rdbuf();
    return std::string(trim(ss.str()));
  }
  return {};
}

std::string_view to_string(CallOutcome outcome) {
  switch (outcome) {
    case CallOutcome::kOk: return "ok";
    case CallOutcome::kRetried: return "retried";
    case CallOutcome::kFailed: return "failed";
  }
  return "unknown";
}

std::string format_timestamp(std::chrono::system_clock::time_point tp) {
  const auto secs = std::chrono::time_point_cast<std::chrono::seconds>(tp);
  const auto ms =
      std::chrono::duration_cast<std::chrono::milliseconds>(tp - secs).count();
  const std::time_t t = std::chrono::system_clock::to_time_t(secs);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[64];
  std::snprintf(buf, sizeof buf, "%04d-%02d-%02dT%02d:%02d:%02d.%03dZ", tm.tm_year + 1900,
                tm.tm_mon + 1, tm.tm_mday, tm.tm_hour, tm.tm_min, tm.tm_sec,
                static_cast<int>(ms));
  return buf;
}

// ---------------------------------------------------------------------------
// ResponseCache
// ---------------------------------------------------------------------------

namespace {

std::string repr(double d) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", d);
  return buf;
}

json key_to_json(const CacheKey& key) {
  return json{{"model_id", key.model_id},
              {"prompt_digest", key.prompt_digest},
              {"temperature", key.temperature},
              {"seed", key.seed ? json(*key.seed) : json(nullptr)}};
}

}  // namespace

std::string CacheKey::address() const {
  return sha256_hex(model_id + '\x1f' + prompt_digest + '\x1f' + repr(temperature) + '\x1f' +
                    (seed ? std::to_string(*seed) : std::string("-")));
}

ResponseCache::ResponseCache(std::optional<std::filesystem::path> dir) : dir_(std::move(dir)) {
  if (dir_) std::filesystem::create_directories(*dir_);
}

std::optional<std::string> ResponseCache::get(const CacheKey& key) const {
  const auto address = key.address();
  {
    std::shared_lock lock(mu_);
    if (auto it = entries_.find(address); it != entries_.end()) {
      if (it->second.key == key) return it->second.reply;
      return std::nullopt;
    }
  }
  if (!dir_) return std::nullopt;

  std::ifstream in(*dir_ / (address + ".json"));
  if (!in) return std::nullopt;
  const auto doc = json::parse(in, nullptr, false);
  if (doc.is_discarded() || !doc.is_object() || !doc.contains("key") ||
      doc["key"] != key_to_json(key) || !doc.contains("reply") || !doc["reply"].is_string()) {
    return std::nullopt;
  }
  auto reply = doc["reply"].get<std::string>();
  std::unique_lock lock(mu_);
  entries_.try_emplace(address, Entry{key, reply});
  return reply;
}

void ResponseCache::put(const CacheKey& key, const std::string& reply) {
  const auto address = key.address();
  std::unique_lock lock(mu_);
  entries_.insert_or_assign(address, Entry{key, reply});
  if (dir_) {
    const auto final_path = *dir_ / (address + ".json");
    const auto tmp_path = *dir_ / (address + ".json.tmp");
    {
      std::ofstream out(tmp_path, std::ios::binary | std::ios::trunc);
      out << json{{"key", key_to_json(key)}, {"reply", reply}}.dump(2) << '\n';
    }
    std::filesystem::rename(tmp_path, final_path);
  }
}

std::size_t ResponseCache::size() const {
  std::shared_lock lock(mu_);
  return entries_.size();
}

// ---------------------------------------------------------------------------
// Gateway
// ---------------------------------------------------------------------------

Gateway::Gateway(ProviderConfig config, std::shared_ptr<ChatBackend> chat,
                 std::shared_ptr<EmbeddingBackend> embedder, GatewayOptions options)
    : config_(std::move(config)),
      chat_(std::move(chat)),
      embedder_(std::move(embedder)),
      options_(std::move(options)) {
  config_.validate();
  if (!options_.clock) options_.clock = [] { return std::chrono::system_clock::now(); };
  if (!options_.sleeper) {
    options_.sleeper = [](std::chrono::milliseconds d) { std::this_thread::sleep_for(d); };
  }
  if (options_.cache_enabled) cache_ = std::make_unique<ResponseCache>(options_.cache_dir);
}

std::string Gateway::now_timestamp() const { return format_timestamp(options_.clock()); }

std::vector<CallTrace> Gateway::traces() const {
  std::lock_guard lock(trace_mu_);
  return traces_;
}

void Gateway::clear_traces() {
  std::lock_guard lock(trace_mu_);
  traces_.clear();
}

void Gateway::record(CallTrace trace) {
  std::lock_guard lock(trace_mu_);
  traces_.push_back(std::move(trace));
}

void Gateway::throttle() {
  if (config_.rate_limit <= 0) return;
  const auto interval = std::chrono::duration_cast<std::chrono::steady_clock::duration>(
      std::chrono::duration<double>(1.0 / config_.rate_limit));
  std::chrono::steady_clock::duration wait{0};
  {
    std::lock_guard lock(rate_mu_);
    const auto now = std::chrono::steady_clock::now();
    if (next_slot_ > now) wait = next_slot_ - now;
    next_slot_ = std::max(now, next_slot_) + interval;
  }
  if (wait > std::chrono::steady_clock::duration::zero()) {
    options_.sleeper(std::chrono::ceil<std::chrono::milliseconds>(wait));
  }
}

template <class Fn>
auto Gateway::with_retries(std::string_view stage, const std::string& model_id,
                           const std::string& digest, Fn&& attempt) -> decltype(attempt()) {
  const int max_attempts = config_.max_retries + 1;
  bool last_was_timeout = false;
  std::string last_message;
  for (int i = 0; i < max_attempts; ++i) {
    if (i > 0) options_.sleeper(config_.backoff_base * (1 << std::min(i - 1, 10)));
    throttle();
    CallTrace trace{std::string(stage), model_id, digest, {}, CallOutcome::kOk, false,
                    now_timestamp()};
    const auto start = std::chrono::steady_clock::now();
    auto elapsed = [&] {
      return std::chrono::duration_cast<std::chrono::microseconds>(
          std::chrono::steady_clock::now() - start);
    };
    try {
      auto result = attempt();
      trace.latency = elapsed();
      record(std::move(trace));
      return result;
    } catch (const TimeoutError& e) {
      last_was_timeout = true;
      last_message = e.what();
    } catch (const TransientError& e) {
      last_was_timeout = false;
      last_message = e.what();
    } catch (Error& e) {
      trace.latency = elapsed();
      trace.outcome = CallOutcome::kFailed;
      record(std::move(trace));
      if (e.stage().empty()) e.with_stage(std::string(stage));
      throw;
    }
    trace.latency = elapsed();
    trace.outcome = (i + 1 < max_attempts) ? CallOutcome::kRetried : CallOutcome::kFailed;
    record(std::move(trace));
  }
  const auto kind = last_was_timeout ? ErrorKind::kTimeout : ErrorKind::kProviderError;
  throw Error(kind, "provider call failed after " + std::to_string(max_attempts) +
                        " attempt(s): " + last_message)
      .with_stage(std::string(stage));
}

ChatResult Gateway::chat(std::string_view stage, std::string_view prompt,
                         const ChatOptions& options) {
  ChatRequest request{config_.model_id, std::string(prompt),
                      options.temperature.value_or(config_.temperature),
                      options.seed ? options.seed : config_.seed, config_.timeout};
  ChatResult result;
  result.prompt_digest = sha256_hex(prompt);
  result.timestamp = now_timestamp();
  const CacheKey key{request.model_id, result.prompt_digest, request.temperature, request.seed};

  if (cache_) {
    if (auto hit = cache_->get(key)) {
      record({std::string(stage), request.model_id, result.prompt_digest, {},
              CallOutcome::kOk, true, result.timestamp});
      result.text = std::move(*hit);
      result.cache_hit = true;
      return result;
    }
  }

  int attempts = 0;
  result.text = with_retries(stage, request.model_id, result.prompt_digest, [&] {
    ++attempts;
    return chat_->complete(request);
  });
  result.attempts = attempts;
  result.outcome = attempts > 1 ? CallOutcome::kRetried : CallOutcome::kOk;
  if (cache_) cache_->put(key, result.text);
  return result;
}

std::vector<Embedding> Gateway::embed(std::span<const std::string> texts, std::string_view stage) {
  if (texts.empty()) throw Error(ErrorKind::kPrecondition, "embed called with no texts");
  std::vector<Embedding> out;
  out.reserve(texts.size());
  for (std::size_t begin = 0; begin < texts.size(); begin += config_.embed_batch_limit) {
    const auto end = std::min(texts.size(), begin + config_.embed_batch_limit);
    EmbedRequest request{config_.embedding_model_id,
                         std::vector<std::string>(texts.begin() + begin, texts.begin() + end),
                         config_.timeout};
    std::string joined;
    for (const auto& t : request.texts) joined += sha256_hex(t);
    auto batch = with_retries(stage, request.model_id, sha256_hex(joined),
                              [&] { return embedder_->embed(request); });
    if (batch.size() != request.texts.size()) {
      throw Error(ErrorKind::kProviderError,
                  "embedding backend returned " + std::to_string(batch.size()) +
                      " vectors for " + std::to_string(request.texts.size()) + " texts");
    }
    for (auto& v : batch) out.push_back(std::move(v));
  }
  const auto dim = out.front().size();
  for (const auto& v : out) {
    if (v.size() != dim) {
      throw Error(ErrorKind::kDimensionMismatch, "embedding batch has mixed dimensionality");
    }
  }
  return out;
}

}  // namespace rebuttal
