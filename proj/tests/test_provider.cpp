#include <gtest/gtest.h>

#include "rebuttal/errors.hpp"
#include "rebuttal/mock_backends.hpp"
#include "rebuttal/prompts.hpp"
#include "rebuttal/provider.hpp"
#include "rebuttal/text.hpp"
#include "support.hpp"

using namespace rebuttal;

namespace {

GatewayOptions quiet(bool cache = true) {
  GatewayOptions o;
  o.cache_enabled = cache;
  o.sleeper = [](std::chrono::milliseconds) {};
  return o;
}

struct Scripted {
  std::shared_ptr<ScriptedChatBackend> chat = std::make_shared<ScriptedChatBackend>();
  std::shared_ptr<HashEmbeddingBackend> embed = std::make_shared<HashEmbeddingBackend>(16);
  Gateway gateway;
  explicit Scripted(ProviderConfig config = {}, GatewayOptions options = quiet())
      : gateway(std::move(config), chat, embed, std::move(options)) {}
};

ErrorKind chat_error(Gateway& g, const std::string& prompt) {
  try {
    g.chat("stage-x", prompt);
  } catch (const Error& e) {
    EXPECT_EQ(e.stage(), "stage-x");
    return e.kind();
  }
  ADD_FAILURE() << "no error";
  return ErrorKind::kUsage;
}

}  // namespace

TEST(Gateway, ScriptedDigestReply) {
  Scripted s;
  s.chat->on_digest(sha256_hex("hello"), "world");
  auto r = s.gateway.chat("t", "hello");
  EXPECT_EQ(r.text, "world");
  EXPECT_EQ(r.outcome, CallOutcome::kOk);
  EXPECT_EQ(r.attempts, 1);
  ASSERT_EQ(s.gateway.traces().size(), 1u);
  EXPECT_EQ(s.gateway.traces()[0].prompt_digest, sha256_hex("hello"));
}

TEST(Gateway, TwoTransientFailuresThenSuccess) {
  Scripted s;
  s.chat->enqueue("ok");
  s.chat->fail_next(2);
  auto r = s.gateway.chat("t", "p");
  EXPECT_EQ(r.text, "ok");
  EXPECT_EQ(r.outcome, CallOutcome::kRetried);
  EXPECT_EQ(r.attempts, 3);
  const auto traces = s.gateway.traces();
  ASSERT_EQ(traces.size(), 3u);
  EXPECT_EQ(traces[0].outcome, CallOutcome::kRetried);
  EXPECT_EQ(traces[1].outcome, CallOutcome::kRetried);
  EXPECT_EQ(traces[2].outcome, CallOutcome::kOk);
}

TEST(Gateway, ExhaustedRetriesAndTimeouts) {
  ProviderConfig cfg;
  cfg.max_retries = 2;
  {
    Scripted s(cfg);
    s.chat->fail_next(3);
    EXPECT_EQ(chat_error(s.gateway, "p"), ErrorKind::kProviderError);
    EXPECT_EQ(s.chat->call_count(), 3u);
    EXPECT_EQ(s.gateway.traces().back().outcome, CallOutcome::kFailed);
  }
  {
    Scripted s(cfg);
    s.chat->fail_next(3, InjectedFailure::kTimeout);
    EXPECT_EQ(chat_error(s.gateway, "p"), ErrorKind::kTimeout);
  }
  {
    Scripted s(cfg);
    s.chat->fail_next(1, InjectedFailure::kPermanent);
    s.chat->enqueue("never");
    EXPECT_EQ(chat_error(s.gateway, "p"), ErrorKind::kProviderError);
    EXPECT_EQ(s.chat->call_count(), 1u);
  }
}

TEST(Gateway, BackoffDoubles) {
  std::vector<long> sleeps;
  GatewayOptions o = quiet();
  o.sleeper = [&](std::chrono::milliseconds d) { sleeps.push_back(d.count()); };
  ProviderConfig cfg;
  cfg.backoff_base = std::chrono::milliseconds(10);
  Scripted s(cfg, o);
  s.chat->fail_next(3);
  s.chat->enqueue("x");
  s.gateway.chat("t", "p");
  EXPECT_EQ(sleeps, (std::vector<long>{10, 20, 40}));
}

TEST(Gateway, CacheHitMakesNoAttempt) {
  Scripted s;
  s.chat->enqueue("first");
  s.chat->enqueue("second");
  auto a = s.gateway.chat("t", "same prompt");
  auto b = s.gateway.chat("t", "same prompt");
  EXPECT_EQ(a.text, b.text);
  EXPECT_TRUE(b.cache_hit);
  EXPECT_EQ(b.attempts, 0);
  EXPECT_EQ(s.chat->call_count(), 1u);
  // a different seed is a different key
  auto c = s.gateway.chat("t", "same prompt", ChatOptions{std::nullopt, 7});
  EXPECT_EQ(c.text, "second");
}

TEST(Gateway, CacheDisabled) {
  Scripted s({}, quiet(false));
  s.chat->enqueue("first");
  s.chat->enqueue("second");
  s.gateway.chat("t", "p");
  EXPECT_EQ(s.gateway.chat("t", "p").text, "second");
}

TEST(ResponseCache, PersistsToDirectory) {
  testsupport::TempDir dir;
  const CacheKey key{"m", sha256_hex("p"), 0.7, 3};
  {
    ResponseCache cache(dir.path());
    cache.put(key, "reply");
  }
  ResponseCache reopened(dir.path());
  EXPECT_EQ(reopened.get(key), "reply");
  EXPECT_FALSE(reopened.get(CacheKey{"m", sha256_hex("p"), 0.7, 4}));
  EXPECT_NE(key.address(), (CacheKey{"m", sha256_hex("p"), 0.0, 3}).address());
}

TEST(ProviderConfig, JsonRoundTripAndRejections) {
  ProviderConfig c;
  c.endpoint = "https://api.example.com/v1";
  c.model_id = "m1";
  c.seed = 9;
  c.temperature = 0.3;
  auto back = provider_config_from_json(to_json(c));
  EXPECT_EQ(back.endpoint, c.endpoint);
  EXPECT_EQ(back.seed, c.seed);
  EXPECT_EQ(back.temperature, c.temperature);

  auto kind = [](const json& j) {
    try {
      provider_config_from_json(j);
    } catch (const Error& e) {
      return e.kind();
    }
    return ErrorKind::kUsage;
  };
  EXPECT_EQ(kind(json{{"api_key", "sk-123"}}), ErrorKind::kPrecondition);
  EXPECT_EQ(kind(json{{"colour", "red"}}), ErrorKind::kSchemaMismatch);
  EXPECT_EQ(kind(json{{"endpoint", "ftp://x"}}), ErrorKind::kPrecondition);
  EXPECT_EQ(kind(json{{"max_retries", -1}}), ErrorKind::kPrecondition);
}

TEST(ProviderConfig, KeyFromSecretsFile) {
  testsupport::TempDir dir;
  write_file_atomic(dir / "key", "sk-from-file\n");
  ProviderConfig c;
  c.api_key_env = "REBUTTAL_TEST_UNSET_KEY_VAR";
  c.secrets_file = (dir / "key").string();
  EXPECT_EQ(resolve_api_key(c), "sk-from-file");
  c.secrets_file.clear();
  EXPECT_EQ(resolve_api_key(c), "");
}

TEST(MockGateway, RuleBasedIsDeterministic) {
  auto a = make_mock_gateway();
  auto b = make_mock_gateway();
  const auto prompt = render_template(prompts::get(prompts::kExtractReview),
                                      {{"REVIEW_TEXT", testsupport::read_fixture("appendix_review.txt")}});
  EXPECT_EQ(a->chat("t", prompt).text, b->chat("t", prompt).text);
  // the rule-based mock refuses prompts it has no rule for
  EXPECT_THROW(a->chat("t", "unrecognised prompt text"), Error);
}
