#pragma once

// Rule-based text analyzers. They back the offline provider used by `--mock`
// runs and by the rubric-faithful judge mocks in tests, and serve as the
// fallback classifier for experiment-demand filtering. None of them call a
// model.

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "rebuttal/types.hpp"

namespace rebuttal::heuristics {

/// True when answering the comment would require running new experiments
/// (new baselines, datasets, ablations, evaluations).
bool demands_new_experiments(std::string_view comment);

struct CommentLabel {
  Category category = Category::kMethodology;
  std::string sub_category;
  Severity severity = Severity::kMinor;
  int confidence = 5;
};

CommentLabel classify_comment(std::string_view comment);

/// Critical items of a raw review: numbered or bulleted items kept whole,
/// critical sentences of prose paragraphs grouped per paragraph. Sections
/// headed as strengths or as review metadata (confidence, soundness, ...)
/// are skipped.
std::vector<std::string> extract_critical_items(std::string_view review);

MacroProfile infer_macro(std::string_view review, std::span<const CommentLabel> labels);

/// Extractor-schema JSON for a review, as the offline extractor would emit it.
std::string extract_profile_json(std::string_view review);

/// Index of the reply paragraph that answers `comment`, or nullopt.
std::optional<std::size_t> best_reply_paragraph(std::string_view comment,
                                                std::span<const std::string> paragraphs,
                                                std::string_view comment_id);

// --- rubric scorers --------------------------------------------------------

/// 1..10 diversity rubric: near-copies of a negative sample score 1-2,
/// list-splitting with stock phrases 3-4, lists of distinct actions 5-6,
/// narrative prose 7-10.
int diversity_score(std::string_view response, std::span<const std::string> negatives);

/// 1..10 (one decimal) agreement of a candidate analysis/strategy with gold.
double analysis_agreement(std::string_view candidate, std::string_view gold);
double strategy_agreement(std::string_view candidate, std::string_view gold);

/// 1..10 reference-free reasoning scores.
double analysis_quality(std::string_view candidate, std::string_view comment);
double strategy_quality(std::string_view candidate);

/// 1..10 response quality: persuasiveness, clarity, evidence use.
int response_quality(std::string_view comment, std::string_view evidence,
                     std::string_view response);

struct RubricScores {
  int attitude = 0;
  int clarity = 0;
  int persuasiveness = 0;
  int constructiveness = 0;
  std::string explanation;
};

/// 0..10 four-dimension scorecard rubric.
RubricScores scorecard(std::string_view comment, std::string_view evidence,
                       std::string_view response);

// --- generation ------------------------------------------------------------

enum class ResponseStyle { kNarrative, kTemplatedList, kMixed };

std::vector<std::string> plan_strategy(const MicroAnalysis& micro, const MacroProfile& macro,
                                       std::string_view evidence);

std::string write_response(std::string_view comment, std::span<const std::string> steps,
                           std::string_view evidence, std::string_view original_response,
                           ResponseStyle style);

}  // namespace rebuttal::heuristics
