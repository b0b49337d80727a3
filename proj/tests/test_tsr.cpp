#include <gtest/gtest.h>

#include <cstdlib>

#include "rebuttal/errors.hpp"
#include "rebuttal/mock_backends.hpp"
#include "rebuttal/prompts.hpp"
#include "rebuttal/record_io.hpp"
#include "rebuttal/text.hpp"
#include "rebuttal/tsr.hpp"
#include "support.hpp"

using namespace rebuttal;

namespace {

// Template text up to its first slot; identifies which template a prompt uses.
std::string_view head(std::string_view name) {
  const auto t = prompts::get(name);
  return t.substr(0, t.find("{{"));
}

// Chat backend that answers by template: a stage-specific override when
// given, otherwise the rule-based mock.
class StageBackend : public ChatBackend {
 public:
  std::map<std::string_view, std::string> replies;  // template name -> reply
  std::vector<std::string> prompts_seen;

  std::string complete(const ChatRequest& request) override {
    prompts_seen.push_back(request.prompt);
    for (const auto& [name, reply] : replies) {
      if (request.prompt.rfind(head(name), 0) == 0) return reply;
    }
    return RuleBasedBackend().complete(request);
  }
};

struct Inputs {
  ManuscriptDocument manuscript =
      make_manuscript("cpa", "Patch alignment", testsupport::read_fixture("manuscript.txt"));
  ReviewDocument review{"appendix", "cpa", testsupport::read_fixture("appendix_review.txt"),
                        std::nullopt};
};

std::shared_ptr<Gateway> stage_gateway(std::shared_ptr<StageBackend> backend) {
  GatewayOptions o;
  o.sleeper = [](std::chrono::milliseconds) {};
  return std::make_shared<Gateway>(
      ProviderConfig{}, backend,
      std::make_shared<HashEmbeddingBackend>(256, HashEmbeddingBackend::Mode::kBagOfWords), o);
}

std::vector<std::string> stage_names(const TsrRecord& r) {
  std::vector<std::string> out;
  for (const auto& t : r.provider_trace) out.push_back(t.stage);
  return out;
}

}  // namespace

TEST(Tsr, FullFixtureProducesSchemaValidRecord) {
  Inputs in;
  auto g = make_mock_gateway();
  auto r = run_tsr(in.manuscript, in.review, "2", *g);
  EXPECT_FALSE(r.strategy.steps.empty());
  EXPECT_FALSE(is_blank(r.response.text));
  EXPECT_EQ(r.retrieved_chunk_ids.size(), 3u);
  EXPECT_EQ(stage_names(r), (std::vector<std::string>{"analysis", "retrieval", "strategy", "response"}));
  auto errors = testsupport::schema_errors(testsupport::load_schema("tsr_record"), to_json(r));
  EXPECT_TRUE(errors.empty()) << errors.front();
  // every chat call of the run shows up in a stage trace
  std::set<std::string> traced;
  for (const auto& t : r.provider_trace) traced.insert(t.prompt_digests.begin(), t.prompt_digests.end());
  for (const auto& call : g->traces()) {
    if (call.stage != "retrieval") EXPECT_TRUE(traced.count(call.prompt_digest)) << call.stage;
  }
  // retrieved ids refer to real chunks
  for (const auto& id : r.retrieved_chunk_ids) {
    EXPECT_TRUE(std::any_of(in.manuscript.chunks.begin(), in.manuscript.chunks.end(),
                            [&](const ManuscriptChunk& c) { return c.id == id; }));
  }
}

TEST(Tsr, RecordSerializesLosslessly) {
  Inputs in;
  auto r = run_tsr(in.manuscript, in.review, "3", *make_mock_gateway());
  EXPECT_EQ(tsr_record_from_json(to_json(r)), r);
  EXPECT_EQ(dump_record(tsr_record_from_json(json::parse(dump_record(r)))), dump_record(r));
}

TEST(Tsr, ReplayIsByteIdenticalWithoutTimestamps) {
  Inputs in;
  auto a = run_tsr(in.manuscript, in.review, "2", *make_mock_gateway());
  auto b = run_tsr(in.manuscript, in.review, "2", *make_mock_gateway());
  EXPECT_EQ(strip_timestamps(to_json(a)).dump(2), strip_timestamps(to_json(b)).dump(2));
}

TEST(Tsr, MatchesGoldenRecord) {
  Inputs in;
  auto r = run_tsr(in.manuscript, in.review, "2", *make_mock_gateway());
  const auto got = strip_timestamps(to_json(r)).dump(2) + "\n";
  const auto path = std::filesystem::path(REBUTTAL_GOLDEN_DIR) / "tsr_record.json";
  if (std::getenv("REBUTTAL_UPDATE_GOLDEN")) write_file_atomic(path, got);
  ASSERT_TRUE(std::filesystem::exists(path)) << "run once with REBUTTAL_UPDATE_GOLDEN=1";
  EXPECT_EQ(read_file(path), got);
}

TEST(Tsr, UnknownCommentIsPrecondition) {
  Inputs in;
  try {
    run_tsr(in.manuscript, in.review, "99", *make_mock_gateway());
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kPrecondition);
  }
}

TEST(Tsr, ScriptedStrategyAndEchoedResponse) {
  Inputs in;
  auto backend = std::make_shared<StageBackend>();
  backend->replies[prompts::kTsrStrategy] =
      "<strategy>1. acknowledge gap; 2. cite Table 1; 3. commit to revision</strategy>";
  backend->replies[prompts::kTsrResponse] = "Thinking...\n<response>We added the ResNet-101 row.</response>";
  auto g = stage_gateway(backend);
  auto r = run_tsr(in.manuscript, in.review, "2", *g);
  EXPECT_EQ(r.strategy.steps,
            (std::vector<std::string>{"acknowledge gap", "cite Table 1", "commit to revision"}));
  EXPECT_EQ(r.response.text, "We added the ResNet-101 row.");
}

TEST(Tsr, EmptyStrategyBlockIsMalformed) {
  Inputs in;
  auto backend = std::make_shared<StageBackend>();
  backend->replies[prompts::kTsrStrategy] = "<strategy>   </strategy>";
  auto g = stage_gateway(backend);
  try {
    run_tsr(in.manuscript, in.review, "2", *g);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kMalformedSequence);
    EXPECT_EQ(e.stage(), "strategy");
  }
}

TEST(Tsr, StageEventsInOrder) {
  Inputs in;
  std::vector<std::string> events;
  TsrOptions o;
  o.on_stage = [&](std::string_view s, std::string_view status) {
    events.push_back(std::string(s) + ":" + std::string(status));
  };
  run_tsr(in.manuscript, in.review, "1", *make_mock_gateway(), o);
  EXPECT_EQ(events, (std::vector<std::string>{"analysis:started", "analysis:done", "retrieval:started",
                                              "retrieval:done", "strategy:started", "strategy:done",
                                              "response:started", "response:done"}));
}

TEST(Tsr, EmptyManuscriptMarksNoEvidence) {
  Inputs in;
  auto backend = std::make_shared<StageBackend>();
  auto g = stage_gateway(backend);
  auto empty = make_manuscript("none", "", "");
  auto r = run_tsr(empty, in.review, "3", *g);
  EXPECT_TRUE(r.retrieved_chunk_ids.empty());
  EXPECT_FALSE(is_blank(r.response.text));
  const auto& last = backend->prompts_seen.back();
  EXPECT_NE(last.find(prompts::kNoEvidence), std::string::npos);
}

TEST(Tsr, StrategyOverrideSkipsStrategyCall) {
  Inputs in;
  TsrOptions o;
  o.strategy_override = Strategy{{"concede the point", "promise a clearer figure"}};
  auto r = run_tsr(in.manuscript, in.review, "3", *make_mock_gateway(), o);
  EXPECT_EQ(r.strategy, *o.strategy_override);
  EXPECT_EQ(r.provider_trace[2].model_id, "override");
}

TEST(Tsr, AnalysisCacheSharesOneExtractorCall) {
  Inputs in;
  auto backend = std::make_shared<StageBackend>();
  auto g = stage_gateway(backend);
  AnalysisCache cache;
  TsrOptions o;
  o.analysis_cache = &cache;
  std::vector<Id> ids = {"4", "1", "3", "2"};
  auto records = run_tsr_batch(in.manuscript, in.review, ids, *g, o, 3);
  ASSERT_EQ(records.size(), 4u);
  for (std::size_t i = 0; i < 4; ++i) EXPECT_EQ(records[i].comment_id, std::to_string(i + 1));
  std::size_t extractor_calls = 0;
  for (const auto& p : backend->prompts_seen) {
    extractor_calls += p.rfind(head(prompts::kExtractReview), 0) == 0;
  }
  EXPECT_EQ(extractor_calls, 1u);
}

TEST(Tsr, StrategyIsDeterministic) {
  Inputs in;
  auto a = run_tsr(in.manuscript, in.review, "2", *make_mock_gateway());
  auto b = run_tsr(in.manuscript, in.review, "2", *make_mock_gateway());
  EXPECT_EQ(a.strategy, b.strategy);
}
