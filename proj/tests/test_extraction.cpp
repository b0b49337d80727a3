#include <gtest/gtest.h>

#include "rebuttal/errors.hpp"
#include "rebuttal/extraction.hpp"
#include "rebuttal/heuristics.hpp"
#include "rebuttal/mock_backends.hpp"
#include "rebuttal/prompts.hpp"
#include "rebuttal/text.hpp"
#include "support.hpp"

using namespace rebuttal;

namespace {

GatewayOptions quiet() {
  GatewayOptions o;
  o.sleeper = [](std::chrono::milliseconds) {};
  return o;
}

// Extractor answers from the appendix example; anything else goes to the
// rule-based backend.
struct ScriptedExtractor {
  std::shared_ptr<ScriptedChatBackend> chat = std::make_shared<ScriptedChatBackend>();
  Gateway gateway{ProviderConfig{}, chat, std::make_shared<HashEmbeddingBackend>(16), quiet()};
  ScriptedExtractor() {
    // the extractor template embeds a one-shot example, so match the whole prompt
    const auto prompt = render_template(prompts::get(prompts::kExtractReview),
                                        {{"REVIEW_TEXT", testsupport::read_fixture("appendix_review.txt")}});
    chat->on_digest(sha256_hex(prompt), testsupport::read_fixture("appendix_profile.json"));
    chat->set_fallback(std::make_shared<RuleBasedBackend>());
  }
};

ReviewDocument review(const std::string& id, std::string text) {
  return ReviewDocument{id, "m1", std::move(text), std::nullopt};
}

std::pair<Comment, MicroAnalysis> item(const std::string& id, std::uint32_t ordinal,
                                       const std::string& text) {
  MicroAnalysis m;
  m.comment_id = id;
  m.comment_text = text;
  return {Comment{id, "r1", ordinal, text, false}, m};
}

}  // namespace

TEST(Extraction, AppendixReviewYieldsFourLabelledComments) {
  ScriptedExtractor s;
  auto a = analyze_review(review("appendix", testsupport::read_fixture("appendix_review.txt")), s.gateway);
  ASSERT_EQ(a.items.size(), 4u);
  const std::vector<std::pair<Category, std::string>> want = {
      {Category::kNovelty, "Incremental Contribution"},
      {Category::kExperimentalRigor, "Baselines Missing/Weak"},
      {Category::kPresentation, "Figure/Table Quality"},
      {Category::kMetaCritique, "Unrealistic/Unconstructive Comment"}};
  for (std::size_t i = 0; i < 4; ++i) {
    EXPECT_EQ(a.items[i].second.category, want[i].first);
    EXPECT_EQ(a.items[i].second.sub_category, want[i].second);
    EXPECT_EQ(a.items[i].first.ordinal, i);
    EXPECT_EQ(a.items[i].first.id, std::to_string(i + 1));
  }
  EXPECT_EQ(a.macro.overall_stance, Stance::kProbablyReject);
  EXPECT_EQ(a.attempts, 1);
}

TEST(Extraction, RuleBasedMockAgreesOnAppendixReview) {
  auto g = make_mock_gateway();
  auto a = analyze_review(review("appendix", testsupport::read_fixture("appendix_review.txt")), *g);
  ASSERT_EQ(a.items.size(), 4u);
  EXPECT_EQ(a.items[0].second.sub_category, "Incremental Contribution");
  EXPECT_EQ(a.items[1].second.sub_category, "Baselines Missing/Weak");
  EXPECT_EQ(a.items[2].second.sub_category, "Figure/Table Quality");
  EXPECT_EQ(a.items[3].second.sub_category, "Unrealistic/Unconstructive Comment");
  for (const auto& [c, m] : a.items) EXPECT_FALSE(c.distilled) << c.text;
}

TEST(Extraction, StrengthsOnlyReviewYieldsNothing) {
  ScriptedExtractor s;
  auto a = analyze_review(review("strengths", testsupport::read_fixture("strengths_review.txt")), s.gateway);
  EXPECT_TRUE(a.items.empty());
}

TEST(Extraction, TruncatedJsonFailsAfterRetries) {
  auto chat = std::make_shared<ScriptedChatBackend>();
  chat->on_contains("Review", "{\"global_profile\": {\"overall_stance\": \"Rej");
  Gateway g(ProviderConfig{}, chat, std::make_shared<HashEmbeddingBackend>(16), quiet());
  try {
    analyze_review(review("r", "Review: the method is unclear."), g, ExtractOptions{3, 0});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kExtractionParseError);
    EXPECT_EQ(e.stage(), "analysis");
    EXPECT_EQ(e.raw_outputs().size(), 3u);
  }
  EXPECT_EQ(chat->call_count(), 3u);
}

TEST(Extraction, DistilledCommentsFlagged) {
  auto chat = std::make_shared<ScriptedChatBackend>();
  chat->enqueue(R"({"global_profile": {"overall_stance": "Borderline", "overall_attitude": "Neutral",
    "dominant_concern": "Presentation & Clarity", "reviewer_expertise": "Generalist", "confidence": 5},
    "comment_analysis": [
     {"comment_id": 1, "comment_text": "The axes of figure 2 are unlabeled.", "category": "Presentation & Clarity",
      "sub_category": "Figure/Table Quality", "severity": "Minor", "confidence": 8},
     {"comment_id": 2, "comment_text": "Writing is sloppy overall.", "category": "Presentation & Clarity",
      "sub_category": "Writing Issues/Typos", "severity": "Minor", "confidence": 6}]})");
  Gateway g(ProviderConfig{}, chat, std::make_shared<HashEmbeddingBackend>(16), quiet());
  auto a = analyze_review(review("r", "Weaknesses:\n- The axes of Figure 2 are unlabeled!\n- Many typos."), g);
  ASSERT_EQ(a.items.size(), 2u);
  EXPECT_FALSE(a.items[0].first.distilled);
  EXPECT_TRUE(a.items[1].first.distilled);
}

TEST(Extraction, ReproducibleWithDeterministicMock) {
  const auto text = testsupport::read_fixture("appendix_review.txt");
  auto a = analyze_review(review("x", text), *make_mock_gateway());
  auto b = analyze_review(review("x", text), *make_mock_gateway());
  EXPECT_EQ(to_json(a).dump(), to_json(b).dump());
  EXPECT_EQ(a.raw_outputs, b.raw_outputs);
}

TEST(Extraction, EmptyReviewRejected) {
  EXPECT_THROW(analyze_review(review("r", "  \n"), *make_mock_gateway()), Error);
}

TEST(Filter, KeywordRules) {
  EXPECT_TRUE(heuristics::demands_new_experiments("Compare your method with baseline X."));
  EXPECT_FALSE(heuristics::demands_new_experiments("Figure 3 axes are not clearly labeled."));
  auto r = filter_actionable({item("1", 0, "Compare your method with baseline X."),
                              item("2", 1, "Figure 3 axes are not clearly labeled.")},
                             nullptr, FilterMode::kRules);
  ASSERT_EQ(r.kept.size(), 1u);
  EXPECT_EQ(r.kept[0].first.id, "2");
}

TEST(Filter, ScriptedClassifierKeepsOrder) {
  auto chat = std::make_shared<ScriptedChatBackend>();
  const std::vector<std::string> texts = {
      "The notation in section two is inconsistent.",
      "Run the full method on the Kinetics benchmark too.",
      "The motivation for the temperature choice is missing.",
      "Please add a head-to-head with the transformer variant.",
      "Table 4 duplicates Table 2.",
      "The related work omits prior patch-level objectives."};
  for (std::size_t i = 0; i < texts.size(); ++i) {
    const bool demand = i == 1 || i == 3;
    chat->on_contains(texts[i], std::string("{\"requires_new_experiments\": ") +
                                    (demand ? "true" : "false") + "}");
  }
  Gateway g(ProviderConfig{}, chat, std::make_shared<HashEmbeddingBackend>(16), quiet());
  std::vector<std::pair<Comment, MicroAnalysis>> items;
  for (std::size_t i = 0; i < texts.size(); ++i) {
    items.push_back(item(std::to_string(i + 1), static_cast<std::uint32_t>(i), texts[i]));
  }
  auto r = filter_actionable(items, &g);
  ASSERT_EQ(r.kept.size(), 4u);
  EXPECT_EQ(r.kept[0].first.id, "1");
  EXPECT_EQ(r.kept[1].first.id, "3");
  EXPECT_EQ(r.kept[2].first.id, "5");
  EXPECT_EQ(r.kept[3].first.id, "6");
  for (const auto& d : r.log) EXPECT_EQ(d.source, "model");
  // idempotent
  auto again = filter_actionable(r.kept, &g);
  EXPECT_EQ(again.kept, r.kept);
}

TEST(Filter, UnusableReplyFallsBackToRules) {
  auto chat = std::make_shared<ScriptedChatBackend>();
  chat->on_contains("Comment:", "I think so?");
  Gateway g(ProviderConfig{}, chat, std::make_shared<HashEmbeddingBackend>(16), quiet());
  auto r = filter_actionable({item("1", 0, "Compare your method with baseline X.")}, &g);
  EXPECT_TRUE(r.kept.empty());
  EXPECT_EQ(r.log[0].source, "rules");
}
