#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "rebuttal/provider.hpp"
#include "rebuttal/types.hpp"

namespace rebuttal {

inline constexpr int kJudgeAttempts = 3;

/// 1 when the text parses as a target sequence, else 0.
int score_format(std::string_view rendered);

struct GoldReference {
  std::string analysis;
  std::string strategy;
};

struct ReasoningScores {
  double analysis = 1;
  double strategy = 1;
};

/// Gold-comparison rubric when `gold` is given, otherwise the reference-free
/// rubric (which also needs the target comment).
ReasoningScores judge_reasoning(std::string_view analysis, std::string_view strategy,
                                const std::optional<GoldReference>& gold,
                                std::string_view comment, Gateway& provider);

int judge_response_quality(std::string_view review, std::string_view comment,
                           std::string_view evidence, std::string_view response,
                           Gateway& provider);

int judge_diversity(std::string_view response, std::span<const std::string> negatives,
                    Gateway& provider);

struct ScoreCard {
  int attitude = 0;
  int clarity = 0;
  int persuasiveness = 0;
  int constructiveness = 0;
  std::string explanation;
  // Holistic 0-10 score, when the judge supplies one.
  std::optional<int> overall;

  bool operator==(const ScoreCard&) const = default;
};

ScoreCard judge_scorecard(std::string_view evidence, const ReviewDocument& review,
                          const Comment& comment, std::string_view response, Gateway& provider);

/// {attitude, clarity, persuasiveness, constructiveness, explanation,
/// overall (null when absent)}
nlohmann::json to_json(const ScoreCard& card);

/// Parses a scorecard reply: the first balanced JSON object with all four
/// dimensions as integers in 0..10 and a non-empty explanation. nullopt
/// otherwise.
std::optional<ScoreCard> parse_scorecard(std::string_view reply);

/// Renders the negatives as numbered prompt sections.
std::string render_negatives(std::span<const std::string> negatives);

}  // namespace rebuttal
