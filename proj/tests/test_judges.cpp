#include <gtest/gtest.h>

#include "rebuttal/candidates.hpp"
#include "rebuttal/errors.hpp"
#include "rebuttal/extraction.hpp"
#include "rebuttal/judges.hpp"
#include "rebuttal/mock_backends.hpp"
#include "rebuttal/profile.hpp"
#include "rebuttal/prompts.hpp"
#include "rebuttal/retrieval.hpp"
#include "rebuttal/target_sequence.hpp"
#include "support.hpp"

using namespace rebuttal;

namespace {

GatewayOptions quiet() {
  GatewayOptions o;
  o.sleeper = [](std::chrono::milliseconds) {};
  return o;
}

struct ScriptedJudge {
  std::shared_ptr<ScriptedChatBackend> chat = std::make_shared<ScriptedChatBackend>();
  Gateway gateway{ProviderConfig{}, chat, std::make_shared<HashEmbeddingBackend>(16), quiet()};
};

const char* kComment =
    "Crucially, the authors did not compare their method's performance when using a standard "
    "ResNet-101 backbone, which makes it hard to fairly judge the results against other "
    "publications.";

const char* kGoldResponse =
    "We agree that a ResNet-101 comparison makes the results easier to place. Section 5.2 already "
    "reports this setting: with a ResNet-101 backbone our method reaches 76.1% linear probing "
    "accuracy, 1.3 points above MoCo v3 under the same schedule, and Table 3 lists the numbers "
    "next to the published baselines. We have moved this row into Table 1 of the revision so the "
    "comparison is visible where readers look first.";

}  // namespace

TEST(Judges, ScriptedReasoningScores) {
  ScriptedJudge j;
  j.chat->enqueue("Scores: {\"analysis_score\": 7, \"strategy_score\": 8}");
  auto s = judge_reasoning("a", "s", GoldReference{"ga", "gs"}, "", j.gateway);
  EXPECT_EQ(s.analysis, 7);
  EXPECT_EQ(s.strategy, 8);
}

TEST(Judges, IdenticalToGoldScoresInTopBand) {
  auto g = make_mock_gateway();
  const auto profile = testsupport::read_fixture("appendix_profile.json");
  const std::string strategy = "1. acknowledge gap; 2. cite Table 1; 3. commit to revision";
  auto s = judge_reasoning(profile, strategy, GoldReference{profile, strategy}, kComment, *g);
  EXPECT_GE(s.analysis, 9.5);
  EXPECT_LE(s.analysis, 10.0);
  EXPECT_GE(s.strategy, 9.5);
  EXPECT_LE(s.strategy, 10.0);
}

TEST(Judges, EmptyStrategyInBottomBand) {
  auto g = make_mock_gateway();
  const auto profile = testsupport::read_fixture("appendix_profile.json");
  auto s = judge_reasoning(profile, "", GoldReference{profile, "1. concede; 2. cite Table 1"},
                           kComment, *g);
  EXPECT_GE(s.strategy, 1.0);
  EXPECT_LT(s.strategy, 2.0);
}

TEST(Judges, ScriptedResponseAndDiversity) {
  ScriptedJudge j;
  j.chat->enqueue("{\"response_score\": 6}");
  EXPECT_EQ(judge_response_quality("review", "comment", "", "response", j.gateway), 6);
  j.chat->enqueue("{\"diversity_score\": 6}");
  const std::vector<std::string> neg = {"template"};
  EXPECT_EQ(judge_diversity("a response", neg, j.gateway), 6);
}

TEST(Judges, MalformedThriceIsJudgeParseError) {
  ScriptedJudge j;
  for (int i = 0; i < 3; ++i) j.chat->enqueue("I would give it a solid seven.");
  j.chat->enqueue("{\"response_score\": 9}");
  try {
    judge_response_quality("review", "comment", "", "response", j.gateway);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kJudgeParseError);
    EXPECT_EQ(e.raw_outputs().size(), 3u);
  }
  EXPECT_EQ(j.chat->call_count(), 3u);
}

TEST(Judges, OutOfRangeScoreIsRetried) {
  ScriptedJudge j;
  j.chat->enqueue("{\"response_score\": 14}");
  j.chat->enqueue("{\"response_score\": 9}");
  EXPECT_EQ(judge_response_quality("review", "comment", "", "response", j.gateway), 9);
}

TEST(Judges, GoldResponseAtLeastAcceptable) {
  auto g = make_mock_gateway();
  const auto review = testsupport::read_fixture("appendix_review.txt");
  const int score = judge_response_quality(
      review, kComment, "Table 3 reports ResNet-101 results against MoCo v3.", kGoldResponse, *g);
  EXPECT_GE(score, 4);
}

TEST(Judges, DiversityRubricBands) {
  auto g = make_mock_gateway();
  const auto negatives = prompts::default_negatives();
  ASSERT_FALSE(negatives.empty());
  const int negative = judge_diversity(negatives.front(), negatives, *g);
  EXPECT_GE(negative, 1);
  EXPECT_LE(negative, 2);
  const int narrative =
      judge_diversity(testsupport::read_fixture("case_study_response.txt"), negatives, *g);
  EXPECT_GE(narrative, 7);
  EXPECT_LE(narrative, 10);
}

TEST(Judges, FormatScore) {
  EXPECT_EQ(score_format("<analysis>a</analysis><strategy>s</strategy><response>r</response>"), 1);
  EXPECT_EQ(score_format("<analysis>a</analysis><strategy>s</strategy>"), 0);
  EXPECT_EQ(score_format("<analysis>a</analysis><analysis>a</analysis><strategy>s</strategy>"
                         "<response>r</response>"),
            0);
}

TEST(Scorecard, ScriptedRoundTrip) {
  ScriptedJudge j;
  j.chat->enqueue(R"(Here is my assessment.
{"score": {"Attitude": 9, "Clarity": 9, "Persuasiveness": 8, "Constructiveness": 9},
 "score_explanation": "Polite and specific."})");
  ReviewDocument review{"r", "m", "review text", std::nullopt};
  Comment c{"1", "r", 0, "comment", false};
  auto card = judge_scorecard("", review, c, "response", j.gateway);
  EXPECT_EQ(card, (ScoreCard{9, 9, 8, 9, "Polite and specific.", std::nullopt}));
  auto schema_errors =
      testsupport::schema_errors(testsupport::load_schema("judge"),
                                 json{{"comment_id", "1"},
                                      {"response_score", 7},
                                      {"diversity_score", 8},
                                      {"scorecard", to_json(card)}});
  EXPECT_TRUE(schema_errors.empty()) << schema_errors.front();
}

TEST(Scorecard, ParseRules) {
  EXPECT_FALSE(parse_scorecard("no json"));
  EXPECT_FALSE(parse_scorecard(R"({"Attitude": 11, "Clarity": 1, "Persuasiveness": 1,
                                  "Constructiveness": 1, "explanation": "x"})"));
  EXPECT_FALSE(parse_scorecard(R"({"Attitude": 1, "Clarity": 1, "Persuasiveness": 1,
                                  "Constructiveness": 1, "explanation": " "})"));
  auto card = parse_scorecard(R"({"Attitude": 0, "Clarity": 10, "Persuasiveness": 5,
                                  "Constructiveness": 6, "Overall": 7, "explanation": "ok"})");
  ASSERT_TRUE(card);
  EXPECT_EQ(card->overall, 7);
}

TEST(Candidates, GroupOfFiveScoredAndRanked) {
  auto g = make_mock_gateway();
  ReviewDocument review{"appendix", "cpa", testsupport::read_fixture("appendix_review.txt"),
                        std::nullopt};
  auto analysis = analyze_review(review, *g);
  const auto& comment = analysis.find("2")->first;
  auto chunks = chunk_by_paragraph(testsupport::read_fixture("manuscript.txt"));
  auto context = retrieve_top_k(comment, chunks, 3, *g);
  CandidateOptions o;
  o.base_seed = 10;
  auto report = run_candidates(review, comment, context, *g, *g, o);
  ASSERT_EQ(report.candidates.size(), 5u);
  ASSERT_EQ(report.advantages.size(), 5u);
  std::vector<double> totals;
  for (const auto& c : report.candidates) {
    const auto& b = c.reward;
    EXPECT_EQ(b.format, score_format(c.output));
    EXPECT_NEAR(b.total,
                0.1 * b.format + 0.3 * (b.raw.analysis + b.raw.strategy) / 20.0 +
                    0.3 * b.raw.resp / 10.0 + 0.3 * b.raw.div / 10.0,
                1e-9);
    totals.push_back(b.total);
  }
  EXPECT_EQ(report.best, select_best_of_n(totals));
  EXPECT_EQ(report.advantages, group_advantages(totals));
  EXPECT_EQ(report.candidates[3].seed, 13u);
  auto errors = testsupport::schema_errors(testsupport::load_schema("candidates"), to_json(report));
  EXPECT_TRUE(errors.empty()) << errors.front();
  // the report is reproducible
  auto again = run_candidates(review, comment, context, *make_mock_gateway(), *make_mock_gateway(), o);
  EXPECT_EQ(reward_report_jsonl(again), reward_report_jsonl(report));
}
