#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "rebuttal/json_util.hpp"
#include "rebuttal/provider.hpp"
#include "rebuttal/types.hpp"

namespace rebuttal {

struct ReviewAnalysis {
  Id review_id;
  MacroProfile macro;
  std::vector<std::pair<Comment, MicroAnalysis>> items;
  // Audit trail: digests of every extractor prompt sent and the raw text of
  // every reply, in attempt order.
  std::vector<std::string> prompt_digests;
  std::vector<std::string> raw_outputs;
  int attempts = 0;
  std::string timestamp;

  ReviewerProfile profile() const;
  const std::pair<Comment, MicroAnalysis>* find(std::string_view comment_id) const;
};

struct ExtractOptions {
  int max_attempts = 3;
  std::uint64_t seed = 0;
};

/// Runs the extractor prompt over the review and validates the reply. A reply
/// that fails validation is retried with the parse error appended to the
/// prompt; after max_attempts the call throws kExtractionParseError carrying
/// every raw reply. Comment ids are the extractor's comment_id values and
/// ordinals follow reply order. A comment whose text is not a normalized
/// substring of the review is kept but flagged `distilled`.
ReviewAnalysis analyze_review(const ReviewDocument& review, Gateway& provider,
                              const ExtractOptions& options = {});

/// {review_id, macro, comments: [{comment_id, ordinal, text, distilled,
/// category, sub_category, severity, confidence}], attempts, prompt_digests}
json to_json(const ReviewAnalysis& analysis);

enum class FilterMode { kModel, kRules };

struct FilterDecision {
  Id comment_id;
  bool requires_new_experiments = false;
  std::string source;  // "model" or "rules"
  std::string note;
};

struct FilterResult {
  std::vector<std::pair<Comment, MicroAnalysis>> kept;
  std::vector<FilterDecision> log;
};

/// Drops comments that could only be answered with new experiments,
/// preserving the order of the rest. kModel asks the classifier prompt and
/// falls back to the keyword rules when its reply is unusable; kRules never
/// calls the provider (which may then be null).
FilterResult filter_actionable(const std::vector<std::pair<Comment, MicroAnalysis>>& items,
                               Gateway* provider, FilterMode mode = FilterMode::kModel);

}  // namespace rebuttal
