#pragma once

// Backends for OpenAI-compatible HTTP APIs: POST {endpoint}/chat/completions
// and POST {endpoint}/embeddings.

#include <memory>
#include <string>

#include "rebuttal/provider.hpp"

namespace rebuttal {

struct ParsedEndpoint {
  std::string origin;       // "https://host:port"
  std::string path_prefix;  // "/v1", never with a trailing slash
};

/// Splits an http(s) base URL. kPrecondition for anything else.
ParsedEndpoint parse_endpoint(std::string_view url);

/// Status mapping shared by both backends: 408, 429 and 5xx are transient,
/// every other non-2xx status is a permanent kProviderError.
void check_http_status(int status, std::string_view body);

class HttpChatBackend : public ChatBackend {
 public:
  explicit HttpChatBackend(ProviderConfig config);
  std::string complete(const ChatRequest& request) override;

 private:
  ProviderConfig config_;
  ParsedEndpoint endpoint_;
  std::string api_key_;
};

class HttpEmbeddingBackend : public EmbeddingBackend {
 public:
  explicit HttpEmbeddingBackend(ProviderConfig config);
  std::vector<Embedding> embed(const EmbedRequest& request) override;

 private:
  ProviderConfig config_;
  ParsedEndpoint endpoint_;
  std::string api_key_;
};

/// Mock backends for "mock://" endpoints, HTTP backends otherwise.
std::shared_ptr<Gateway> make_gateway(const ProviderConfig& config, GatewayOptions options = {});

}  // namespace rebuttal
