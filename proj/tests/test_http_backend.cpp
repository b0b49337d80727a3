#include <gtest/gtest.h>

#include <httplib.h>

#include <atomic>
#include <thread>

#include "rebuttal/errors.hpp"
#include "rebuttal/http_backend.hpp"

using namespace rebuttal;

namespace {

// Local OpenAI-compatible stand-in. `statuses` are returned in order before
// the server starts answering normally.
class FakeApi {
 public:
  FakeApi() {
    server_.Post("/v1/chat/completions", [this](const httplib::Request& req, httplib::Response& res) {
      last_auth_ = req.get_header_value("Authorization");
      last_body_ = req.body;
      if (next_status(res)) return;
      if (delay_ms_ > 0) std::this_thread::sleep_for(std::chrono::milliseconds(delay_ms_));
      auto body = json::parse(req.body);
      json reply = {{"choices", json::array({{{"message",
                                               {{"role", "assistant"},
                                                {"content", "echo: " + body["messages"][0]["content"].get<std::string>()}}}}})}};
      res.set_content(reply.dump(), "application/json");
    });
    server_.Post("/v1/embeddings", [this](const httplib::Request& req, httplib::Response& res) {
      if (next_status(res)) return;
      auto body = json::parse(req.body);
      json data = json::array();
      const auto n = body["input"].size();
      // reversed on purpose: clients must order by index
      for (std::size_t i = n; i-- > 0;) {
        data.push_back({{"index", i}, {"embedding", {static_cast<double>(i), 1.0}}});
      }
      res.set_content(json{{"data", data}}.dump(), "application/json");
    });
    port_ = server_.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }
  ~FakeApi() {
    server_.stop();
    thread_.join();
  }

  ProviderConfig config() const {
    ProviderConfig c;
    c.endpoint = "http://127.0.0.1:" + std::to_string(port_) + "/v1";
    c.model_id = "fake-chat";
    c.api_key_env = "REBUTTAL_TEST_HTTP_KEY";
    c.max_retries = 3;
    c.backoff_base = std::chrono::milliseconds(1);
    c.timeout = std::chrono::milliseconds(2000);
    return c;
  }

  std::vector<int> statuses;
  int delay_ms_ = 0;
  std::string last_auth_;
  std::string last_body_;
  std::atomic<int> calls{0};

 private:
  bool next_status(httplib::Response& res) {
    ++calls;
    std::lock_guard lock(mu_);
    if (statuses.empty()) return false;
    res.status = statuses.front();
    statuses.erase(statuses.begin());
    res.set_content("{\"error\":\"scripted\"}", "application/json");
    return true;
  }

  httplib::Server server_;
  std::thread thread_;
  std::mutex mu_;
  int port_ = 0;
};

GatewayOptions no_cache() {
  GatewayOptions o;
  o.cache_enabled = false;
  o.sleeper = [](std::chrono::milliseconds) {};
  return o;
}

}  // namespace

TEST(HttpBackend, ParseEndpoint) {
  auto e = parse_endpoint("https://api.example.com/v1/");
  EXPECT_EQ(e.origin, "https://api.example.com");
  EXPECT_EQ(e.path_prefix, "/v1");
  EXPECT_EQ(parse_endpoint("http://h:8080").path_prefix, "");
  EXPECT_THROW(parse_endpoint("mock://"), Error);
}

TEST(HttpBackend, StatusMapping) {
  for (int s : {408, 429, 500, 502, 503}) EXPECT_THROW(check_http_status(s, ""), TransientError);
  for (int s : {400, 401, 403, 404}) {
    try {
      check_http_status(s, "");
      FAIL();
    } catch (const Error& e) {
      EXPECT_EQ(e.kind(), ErrorKind::kProviderError);
    }
  }
  EXPECT_NO_THROW(check_http_status(200, ""));
}

TEST(HttpBackend, ChatRoundTripWithBearer) {
  FakeApi api;
  setenv("REBUTTAL_TEST_HTTP_KEY", "sk-test", 1);
  auto g = make_gateway(api.config(), no_cache());
  EXPECT_EQ(g->chat("t", "hi").text, "echo: hi");
  EXPECT_EQ(api.last_auth_, "Bearer sk-test");
  EXPECT_EQ(json::parse(api.last_body_)["model"], "fake-chat");
  unsetenv("REBUTTAL_TEST_HTTP_KEY");
}

TEST(HttpBackend, TransientStatusesRetried) {
  FakeApi api;
  api.statuses = {429, 503};
  auto g = make_gateway(api.config(), no_cache());
  auto r = g->chat("t", "x");
  EXPECT_EQ(r.text, "echo: x");
  EXPECT_EQ(r.attempts, 3);
  EXPECT_EQ(api.calls.load(), 3);
}

TEST(HttpBackend, PermanentStatusNotRetried) {
  FakeApi api;
  api.statuses = {401};
  auto g = make_gateway(api.config(), no_cache());
  try {
    g->chat("t", "x");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kProviderError);
  }
  EXPECT_EQ(api.calls.load(), 1);
}

TEST(HttpBackend, ReadTimeout) {
  FakeApi api;
  api.delay_ms_ = 700;
  auto cfg = api.config();
  cfg.timeout = std::chrono::milliseconds(150);
  cfg.max_retries = 1;
  auto g = make_gateway(cfg, no_cache());
  try {
    g->chat("t", "x");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kTimeout);
  }
}

TEST(HttpBackend, EmbeddingsOrderedByIndex) {
  FakeApi api;
  auto g = make_gateway(api.config(), no_cache());
  std::vector<std::string> texts = {"a", "b", "c"};
  auto v = g->embed(texts);
  ASSERT_EQ(v.size(), 3u);
  for (std::size_t i = 0; i < 3; ++i) EXPECT_EQ(v[i][0], static_cast<float>(i));
}

TEST(HttpBackend, ConnectionRefusedIsProviderError) {
  ProviderConfig c;
  c.endpoint = "http://127.0.0.1:1/v1";
  c.max_retries = 1;
  c.timeout = std::chrono::milliseconds(500);
  auto g = make_gateway(c, no_cache());
  try {
    g->chat("t", "x");
    FAIL();
  } catch (const Error& e) {
    EXPECT_TRUE(e.kind() == ErrorKind::kProviderError || e.kind() == ErrorKind::kTimeout);
  }
}
