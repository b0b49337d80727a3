#include "rebuttal/http_backend.hpp"

#include <httplib.h>

#include <algorithm>
#include <regex>

#include "rebuttal/errors.hpp"
#include "rebuttal/json_util.hpp"
#include "rebuttal/mock_backends.hpp"

namespace rebuttal {

namespace {

// Bodies are quoted in errors, but never at length.
std::string excerpt(std::string_view body) {
  constexpr std::size_t kMax = 300;
  if (body.size() <= kMax) return std::string(body);
  return std::string(body.substr(0, kMax)) + "...";
}

std::string post_json(const ParsedEndpoint& ep, const std::string& api_key,
                      std::chrono::milliseconds timeout, const std::string& route,
                      const json& body) {
  httplib::Client client(ep.origin);
  const auto secs = timeout.count() / 1000;
  const auto usecs = (timeout.count() % 1000) * 1000;
  client.set_connection_timeout(secs, usecs);
  client.set_read_timeout(secs, usecs);
  client.set_write_timeout(secs, usecs);
  httplib::Headers headers;
  if (!api_key.empty()) headers.emplace("Authorization", "Bearer " + api_key);

  const auto res = client.Post(ep.path_prefix + route, headers, body.dump(), "application/json");
  if (!res) {
    const auto err = res.error();
    const auto msg = ep.origin + route + ": " + httplib::to_string(err);
    if (err == httplib::Error::ConnectionTimeout || err == httplib::Error::Read ||
        err == httplib::Error::Write) {
      throw TimeoutError(msg);
    }
    if (err == httplib::Error::Connection || err == httplib::Error::SSLConnection) {
      throw TransientError(msg);
    }
    throw Error(ErrorKind::kProviderError, msg);
  }
  check_http_status(res->status, res->body);
  return res->body;
}

json parse_body(const std::string& body) {
  try {
    return json::parse(body);
  } catch (const json::exception&) {
    throw Error(ErrorKind::kProviderError, "provider returned non-JSON: " + excerpt(body));
  }
}

}  // namespace

ParsedEndpoint parse_endpoint(std::string_view url) {
  static const std::regex re(R"(^(https?://[^/\s]+)(/[^\s]*)?$)", std::regex::icase);
  std::cmatch m;
  if (!std::regex_match(url.begin(), url.end(), m, re)) {
    throw Error(ErrorKind::kPrecondition, "endpoint is not an http(s) URL: " + std::string(url));
  }
  ParsedEndpoint ep{m[1].str(), m[2].matched ? m[2].str() : std::string()};
  while (!ep.path_prefix.empty() && ep.path_prefix.back() == '/') ep.path_prefix.pop_back();
  return ep;
}

void check_http_status(int status, std::string_view body) {
  if (status >= 200 && status < 300) return;
  const auto msg = "HTTP " + std::to_string(status) + ": " + excerpt(body);
  if (status == 408 || status == 429 || status >= 500) throw TransientError(msg);
  throw Error(ErrorKind::kProviderError, msg);
}

HttpChatBackend::HttpChatBackend(ProviderConfig config)
    : config_(std::move(config)),
      endpoint_(parse_endpoint(config_.endpoint)),
      api_key_(resolve_api_key(config_)) {}

std::string HttpChatBackend::complete(const ChatRequest& request) {
  json body{{"model", request.model_id},
            {"messages", json::array({{{"role", "user"}, {"content", request.prompt}}})},
            {"temperature", request.temperature}};
  if (request.seed) body["seed"] = *request.seed;
  const auto doc = parse_body(
      post_json(endpoint_, api_key_, request.timeout, "/chat/completions", body));
  try {
    const auto& content = doc.at("choices").at(0).at("message").at("content");
    if (!content.is_string()) throw Error(ErrorKind::kProviderError, "chat content is not text");
    return content.get<std::string>();
  } catch (const json::exception&) {
    throw Error(ErrorKind::kProviderError, "unexpected chat reply: " + excerpt(doc.dump()));
  }
}

HttpEmbeddingBackend::HttpEmbeddingBackend(ProviderConfig config)
    : config_(std::move(config)),
      endpoint_(parse_endpoint(config_.endpoint)),
      api_key_(resolve_api_key(config_)) {}

std::vector<Embedding> HttpEmbeddingBackend::embed(const EmbedRequest& request) {
  const json body{{"model", request.model_id}, {"input", request.texts}};
  const auto doc =
      parse_body(post_json(endpoint_, api_key_, request.timeout, "/embeddings", body));
  std::vector<std::pair<std::size_t, Embedding>> rows;
  try {
    for (const auto& item : doc.at("data")) {
      const auto index = item.contains("index") ? item.at("index").get<std::size_t>() : rows.size();
      rows.emplace_back(index, item.at("embedding").get<Embedding>());
    }
  } catch (const json::exception&) {
    throw Error(ErrorKind::kProviderError, "unexpected embedding reply: " + excerpt(doc.dump()));
  }
  std::sort(rows.begin(), rows.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  if (rows.size() != request.texts.size()) {
    throw Error(ErrorKind::kProviderError, "embedding reply has " + std::to_string(rows.size()) +
                                               " vectors for " +
                                               std::to_string(request.texts.size()) + " texts");
  }
  std::vector<Embedding> out;
  out.reserve(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].first != i) throw Error(ErrorKind::kProviderError, "embedding indices are not 0..n-1");
    out.push_back(std::move(rows[i].second));
  }
  return out;
}

std::shared_ptr<Gateway> make_gateway(const ProviderConfig& config, GatewayOptions options) {
  config.validate();
  if (config.is_mock()) return make_mock_gateway(config, std::move(options));
  return std::make_shared<Gateway>(config, std::make_shared<HttpChatBackend>(config),
                                   std::make_shared<HttpEmbeddingBackend>(config),
                                   std::move(options));
}

}  // namespace rebuttal
