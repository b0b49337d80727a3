#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace rebuttal::prompts {

// Asset names are the file stems under assets/prompts/.
inline constexpr std::string_view kExtractReview = "extract_review";
inline constexpr std::string_view kFilterExperiments = "filter_experiments";
inline constexpr std::string_view kAlignReplies = "align_replies";
inline constexpr std::string_view kTsrStrategy = "tsr_strategy";
inline constexpr std::string_view kTsrResponse = "tsr_response";
inline constexpr std::string_view kTsrPolicy = "tsr_policy";
inline constexpr std::string_view kRefineResponse = "refine_response";
inline constexpr std::string_view kJudgeDiversity = "judge_diversity";
inline constexpr std::string_view kJudgeReasoningGold = "judge_reasoning_gold";
inline constexpr std::string_view kJudgeReasoningFree = "judge_reasoning_free";
inline constexpr std::string_view kJudgeResponse = "judge_response";
inline constexpr std::string_view kJudgeScorecard = "judge_scorecard";

// Stands in for the evidence slot when retrieval found nothing.
inline constexpr std::string_view kNoEvidence =
    "No evidence retrieved: no manuscript passage matched this comment.";

/// Renders one "Name:\n<<<\ntext\n>>>" input section, the layout every
/// template uses for its inputs.
std::string section(std::string_view name, std::string_view text);

/// Template text. Throws kPrecondition for an unknown name.
std::string_view get(std::string_view name);

/// Hex SHA-256 of the template text; recorded in traces so a record names
/// the exact template revision that produced it.
std::string template_hash(std::string_view name);

/// Shipped negative samples for the diversity judge.
std::vector<std::string> default_negatives();

/// Names of all embedded assets, sorted.
std::vector<std::string> names();

namespace detail {
struct Asset {
  std::string_view name;
  std::string_view text;
};
const std::vector<Asset>& assets();
}  // namespace detail

}  // namespace rebuttal::prompts
