#include "rebuttal/judges.hpp"

#include <cmath>
#include <functional>

#include "rebuttal/errors.hpp"
#include "rebuttal/json_util.hpp"
#include "rebuttal/prompts.hpp"
#include "rebuttal/target_sequence.hpp"
#include "rebuttal/text.hpp"

namespace rebuttal {

int score_format(std::string_view rendered) {
  try {
    parse_target_sequence(rendered);
    return 1;
  } catch (const Error&) {
    return 0;
  }
}

namespace {

// Asks the judge until `parse` accepts a reply, at most kJudgeAttempts times.
// Retries restate the output contract so a cached bad reply is not replayed.
template <class T>
T ask_judge(std::string_view stage, const std::string& prompt, Gateway& provider,
            const std::function<std::optional<T>(const json&)>& parse) {
  std::vector<std::string> raw;
  std::string current = prompt;
  for (int attempt = 1; attempt <= kJudgeAttempts; ++attempt) {
    const auto reply = provider.chat(stage, current, ChatOptions{0.0, 0});
    raw.push_back(reply.text);
    if (auto doc = recover_json_object(reply.text)) {
      if (auto value = parse(*doc)) return *value;
    }
    current = prompt + "\n\nYour previous reply did not contain the required JSON object. "
                       "Reply with only that JSON object. (attempt " +
              std::to_string(attempt + 1) + ")\n";
  }
  throw Error(ErrorKind::kJudgeParseError, "judge output unusable after " +
                                               std::to_string(kJudgeAttempts) + " attempts")
      .with_stage(std::string(stage))
      .with_raw_outputs(std::move(raw));
}

std::optional<double> number_in(const json& doc, const char* key, double lo, double hi) {
  if (!doc.contains(key) || !doc[key].is_number()) return std::nullopt;
  const double v = doc[key].get<double>();
  if (!std::isfinite(v) || v < lo || v > hi) return std::nullopt;
  return v;
}

std::optional<int> integer_in(const json& doc, const char* key, int lo, int hi) {
  auto v = number_in(doc, key, lo, hi);
  if (!v || *v != std::floor(*v)) return std::nullopt;
  return static_cast<int>(*v);
}

}  // namespace

ReasoningScores judge_reasoning(std::string_view analysis, std::string_view strategy,
                                const std::optional<GoldReference>& gold,
                                std::string_view comment, Gateway& provider) {
  std::string prompt;
  if (gold) {
    prompt = render_template(prompts::get(prompts::kJudgeReasoningGold),
                             {{"GOLD_ANALYSIS", gold->analysis},
                              {"GOLD_STRATEGY", gold->strategy},
                              {"CANDIDATE_ANALYSIS", std::string(analysis)},
                              {"CANDIDATE_STRATEGY", std::string(strategy)}});
  } else {
    prompt = render_template(prompts::get(prompts::kJudgeReasoningFree),
                             {{"COMMENT", std::string(comment)},
                              {"CANDIDATE_ANALYSIS", std::string(analysis)},
                              {"CANDIDATE_STRATEGY", std::string(strategy)}});
  }
  return ask_judge<ReasoningScores>(
      "judge_reasoning", prompt, provider, [](const json& doc) -> std::optional<ReasoningScores> {
        auto a = number_in(doc, "analysis_score", 1, 10);
        auto s = number_in(doc, "strategy_score", 1, 10);
        if (!a || !s) return std::nullopt;
        return ReasoningScores{*a, *s};
      });
}

int judge_response_quality(std::string_view review, std::string_view comment,
                           std::string_view evidence, std::string_view response,
                           Gateway& provider) {
  const auto prompt = render_template(
      prompts::get(prompts::kJudgeResponse),
      {{"REVIEW", std::string(review)},
       {"COMMENT", std::string(comment)},
       {"EVIDENCE", is_blank(evidence) ? std::string(prompts::kNoEvidence) : std::string(evidence)},
       {"RESPONSE", std::string(response)}});
  return ask_judge<int>("judge_response", prompt, provider, [](const json& doc) {
    return integer_in(doc, "response_score", 1, 10);
  });
}

std::string render_negatives(std::span<const std::string> negatives) {
  std::string out;
  for (std::size_t i = 0; i < negatives.size(); ++i) {
    out += prompts::section("Negative_Example_" + std::to_string(i + 1), negatives[i]);
  }
  return out;
}

int judge_diversity(std::string_view response, std::span<const std::string> negatives,
                    Gateway& provider) {
  if (negatives.empty()) {
    throw Error(ErrorKind::kPrecondition, "diversity judging needs at least one negative sample");
  }
  const auto prompt = render_template(
      prompts::get(prompts::kJudgeDiversity),
      {{"NEGATIVE_EXAMPLES", render_negatives(negatives)}, {"RESPONSE", std::string(response)}});
  return ask_judge<int>("judge_diversity", prompt, provider, [](const json& doc) {
    return integer_in(doc, "diversity_score", 1, 10);
  });
}

std::optional<ScoreCard> parse_scorecard(std::string_view reply) {
  const auto doc = recover_json_object(reply);
  if (!doc) return std::nullopt;
  const json& scores = doc->contains("score") ? (*doc)["score"] : *doc;
  if (!scores.is_object()) return std::nullopt;
  auto dim = [&](const char* name) { return integer_in(scores, name, 0, 10); };
  ScoreCard card;
  auto a = dim("Attitude");
  auto c = dim("Clarity");
  auto p = dim("Persuasiveness");
  auto k = dim("Constructiveness");
  if (!a || !c || !p || !k) return std::nullopt;
  const json* expl = nullptr;
  for (const char* key : {"score_explanation", "ScoreExplanation", "explanation"}) {
    if (doc->contains(key)) expl = &(*doc)[key];
  }
  if (!expl) return std::nullopt;
  if (expl->is_string()) {
    card.explanation = expl->get<std::string>();
  } else if (expl->is_object() || expl->is_array()) {
    card.explanation = expl->dump();
  }
  if (is_blank(card.explanation)) return std::nullopt;
  card.attitude = *a;
  card.clarity = *c;
  card.persuasiveness = *p;
  card.constructiveness = *k;
  card.overall = dim("Overall");
  return card;
}

ScoreCard judge_scorecard(std::string_view evidence, const ReviewDocument& review,
                          const Comment& comment, std::string_view response, Gateway& provider) {
  if (is_blank(response)) throw Error(ErrorKind::kPrecondition, "response to score is empty");
  const auto prompt = render_template(
      prompts::get(prompts::kJudgeScorecard),
      {{"REVIEW", review.raw_text},
       {"EVIDENCE", is_blank(evidence) ? std::string(prompts::kNoEvidence) : std::string(evidence)},
       {"COMMENT", comment.text},
       {"RESPONSE", std::string(response)}});
  return ask_judge<ScoreCard>("judge_scorecard", prompt, provider,
                              [](const json& doc) { return parse_scorecard(doc.dump()); });
}

json to_json(const ScoreCard& card) {
  return json{{"attitude", card.attitude},
              {"clarity", card.clarity},
              {"persuasiveness", card.persuasiveness},
              {"constructiveness", card.constructiveness},
              {"explanation", card.explanation},
              {"overall", card.overall ? json(*card.overall) : json(nullptr)}};
}

}  // namespace rebuttal
