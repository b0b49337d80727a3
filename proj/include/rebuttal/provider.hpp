#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "rebuttal/json_util.hpp"
#include "rebuttal/types.hpp"

namespace rebuttal {

// ---------------------------------------------------------------------------
// Configuration
// ---------------------------------------------------------------------------

struct ProviderConfig {
  // Base URL of an OpenAI-compatible API ("https://host/v1"), or "mock://"
  // for the offline backends.
  std::string endpoint = "mock://";
  std::string model_id = "mock-chat";
  std::string embedding_model_id = "mock-embed";
  // Secret references. The key itself never appears in a config.
  std::string api_key_env = "OPENAI_API_KEY";
  std::string secrets_file;
  double temperature = 0.0;
  std::optional<std::uint64_t> seed;
  int max_retries = 3;
  std::chrono::milliseconds timeout{60'000};
  double rate_limit = 0.0;  // requests/second; 0 disables throttling
  std::size_t embed_batch_limit = 64;
  std::chrono::milliseconds backoff_base{250};

  bool is_mock() const { return endpoint.rfind("mock://", 0) == 0; }

  /// Throws kPrecondition on a malformed endpoint or negative limits.
  void validate() const;
};

/// Reads a provider block of a config or job file. Unknown keys are
/// rejected, and so is any inline secret ("api_key"): secrets come only from
/// the environment or a secrets file.
ProviderConfig provider_config_from_json(const nlohmann::json& j);
nlohmann::json to_json(const ProviderConfig& config);

/// Reads the API key from the environment variable named by the config, or
/// from the secrets file. Empty when neither is set.
std::string resolve_api_key(const ProviderConfig& config);

// ---------------------------------------------------------------------------
// Backends: raw transports. They throw TransientError for retryable
// failures and Error(kProviderError) for permanent ones.
// ---------------------------------------------------------------------------

struct ChatRequest {
  std::string model_id;
  std::string prompt;
  double temperature = 0.0;
  std::optional<std::uint64_t> seed;
  std::chrono::milliseconds timeout{60'000};
};

struct EmbedRequest {
  std::string model_id;
  std::vector<std::string> texts;
  std::chrono::milliseconds timeout{60'000};
};

class ChatBackend {
 public:
  virtual ~ChatBackend() = default;
  virtual std::string complete(const ChatRequest& request) = 0;
};

class EmbeddingBackend {
 public:
  virtual ~EmbeddingBackend() = default;
  virtual std::vector<Embedding> embed(const EmbedRequest& request) = 0;
};

// ---------------------------------------------------------------------------
// Tracing
// ---------------------------------------------------------------------------

enum class CallOutcome { kOk, kRetried, kFailed };
std::string_view to_string(CallOutcome outcome);

// One per attempt. A cache hit is recorded as an ok trace with cache_hit set
// and no backend attempt behind it.
struct CallTrace {
  std::string stage;
  std::string model_id;
  std::string prompt_digest;
  std::chrono::microseconds latency{0};
  CallOutcome outcome = CallOutcome::kOk;
  bool cache_hit = false;
  std::string timestamp;
};

struct ChatOptions {
  std::optional<double> temperature;
  std::optional<std::uint64_t> seed;
};

struct ChatResult {
  std::string text;
  std::string prompt_digest;
  std::string timestamp;
  int attempts = 0;  // backend attempts; 0 on a cache hit
  bool cache_hit = false;
  CallOutcome outcome = CallOutcome::kOk;
};

// ---------------------------------------------------------------------------
// Response cache
// ---------------------------------------------------------------------------

struct CacheKey {
  std::string model_id;
  std::string prompt_digest;
  double temperature = 0.0;
  std::optional<std::uint64_t> seed;

  /// Content address of the key: hex SHA-256 over all four fields.
  std::string address() const;
  bool operator==(const CacheKey&) const = default;
};

/// In-memory map, optionally backed by a directory of <address>.json files.
/// Every hit re-checks the stored key fields, so an address collision can not
/// return another key's reply.
class ResponseCache {
 public:
  explicit ResponseCache(std::optional<std::filesystem::path> dir = std::nullopt);

  std::optional<std::string> get(const CacheKey& key) const;
  void put(const CacheKey& key, const std::string& reply);
  std::size_t size() const;

 private:
  struct Entry {
    CacheKey key;
    std::string reply;
  };
  std::optional<std::filesystem::path> dir_;
  mutable std::shared_mutex mu_;
  mutable std::unordered_map<std::string, Entry> entries_;
};

// ---------------------------------------------------------------------------
// Gateway
// ---------------------------------------------------------------------------

using Clock = std::function<std::chrono::system_clock::time_point()>;
using Sleeper = std::function<void(std::chrono::milliseconds)>;

struct GatewayOptions {
  bool cache_enabled = true;
  std::optional<std::filesystem::path> cache_dir;
  Clock clock;      // defaults to system_clock::now
  Sleeper sleeper;  // defaults to this_thread::sleep_for
};

std::string format_timestamp(std::chrono::system_clock::time_point tp);

/// Uniform entry point for every model call: retries with exponential
/// backoff, global rate limiting, response caching and per-attempt tracing.
/// Safe for concurrent use.
class Gateway {
 public:
  Gateway(ProviderConfig config, std::shared_ptr<ChatBackend> chat,
          std::shared_ptr<EmbeddingBackend> embedder, GatewayOptions options = {});

  ChatResult chat(std::string_view stage, std::string_view prompt,
                  const ChatOptions& options = {});

  std::string chat_complete(std::string_view prompt) { return chat("chat", prompt).text; }

  /// One vector per text, in input order, split into requests of at most
  /// embed_batch_limit texts.
  std::vector<Embedding> embed(std::span<const std::string> texts,
                               std::string_view stage = "embed");

  const ProviderConfig& config() const { return config_; }
  std::string now_timestamp() const;
  std::vector<CallTrace> traces() const;
  void clear_traces();

 private:
  template <class Fn>
  auto with_retries(std::string_view stage, const std::string& model_id,
                    const std::string& digest, Fn&& attempt) -> decltype(attempt());
  void throttle();
  void record(CallTrace trace);

  ProviderConfig config_;
  std::shared_ptr<ChatBackend> chat_;
  std::shared_ptr<EmbeddingBackend> embedder_;
  GatewayOptions options_;
  std::unique_ptr<ResponseCache> cache_;

  mutable std::mutex trace_mu_;
  std::vector<CallTrace> traces_;

  std::mutex rate_mu_;
  std::chrono::steady_clock::time_point next_slot_{};
};

}  // namespace rebuttal
