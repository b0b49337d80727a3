#include "rebuttal/extraction.hpp"

#include "rebuttal/errors.hpp"
#include "rebuttal/heuristics.hpp"
#include "rebuttal/json_util.hpp"
#include "rebuttal/profile.hpp"
#include "rebuttal/prompts.hpp"
#include "rebuttal/text.hpp"

namespace rebuttal {

ReviewerProfile ReviewAnalysis::profile() const {
  ReviewerProfile p;
  p.macro = macro;
  for (const auto& [c, m] : items) p.per_comment.push_back(m);
  return p;
}

const std::pair<Comment, MicroAnalysis>* ReviewAnalysis::find(std::string_view comment_id) const {
  for (const auto& item : items) {
    if (item.first.id == comment_id) return &item;
  }
  return nullptr;
}

ReviewAnalysis analyze_review(const ReviewDocument& review, Gateway& provider,
                              const ExtractOptions& options) {
  if (is_blank(review.raw_text)) {
    throw Error(ErrorKind::kPrecondition, "review " + review.id + " has no text");
  }
  const auto base = render_template(prompts::get(prompts::kExtractReview),
                                    {{"REVIEW_TEXT", review.raw_text}});
  ReviewAnalysis out;
  out.review_id = review.id;
  out.timestamp = provider.now_timestamp();

  std::string prompt = base;
  for (int attempt = 1; attempt <= options.max_attempts; ++attempt) {
    const auto reply = provider.chat("analysis", prompt, ChatOptions{0.0, options.seed});
    out.prompt_digests.push_back(reply.prompt_digest);
    out.raw_outputs.push_back(reply.text);
    out.attempts = attempt;
    try {
      const auto profile = validate_profile(reply.text);
      out.macro = profile.macro;
      std::uint32_t ordinal = 0;
      for (const auto& m : profile.per_comment) {
        Comment c{m.comment_id, review.id, ordinal++, m.comment_text,
                  !normalized_contains(review.raw_text, m.comment_text)};
        out.items.emplace_back(std::move(c), m);
      }
      return out;
    } catch (const Error& e) {
      // the attempt number keeps each retry prompt distinct, so caching never replays a bad reply
      prompt = base + "\n\nYour previous reply could not be used (" + e.what() +
               "). Reply again with only the JSON object in the schema above. (attempt " +
               std::to_string(attempt + 1) + ")\n";
    }
  }
  throw Error(ErrorKind::kExtractionParseError,
              "extractor output failed validation after " + std::to_string(options.max_attempts) +
                  " attempt(s)")
      .with_stage("analysis")
      .with_raw_outputs(out.raw_outputs);
}

FilterResult filter_actionable(const std::vector<std::pair<Comment, MicroAnalysis>>& items,
                               Gateway* provider, FilterMode mode) {
  if (mode == FilterMode::kModel && !provider) {
    throw Error(ErrorKind::kPrecondition, "model filter needs a provider");
  }
  FilterResult out;
  for (const auto& item : items) {
    FilterDecision d{item.first.id, false, "rules", {}};
    if (mode == FilterMode::kModel) {
      const auto prompt = render_template(prompts::get(prompts::kFilterExperiments),
                                          {{"COMMENT", item.first.text}});
      const auto reply = provider->chat("filter", prompt, ChatOptions{0.0, 0}).text;
      const auto doc = recover_json_object(reply);
      if (doc && doc->contains("requires_new_experiments") &&
          (*doc)["requires_new_experiments"].is_boolean()) {
        d.requires_new_experiments = (*doc)["requires_new_experiments"].get<bool>();
        d.source = "model";
      } else {
        d.requires_new_experiments = heuristics::demands_new_experiments(item.first.text);
        d.note = "classifier reply unusable; keyword rule applied";
      }
    } else {
      d.requires_new_experiments = heuristics::demands_new_experiments(item.first.text);
    }
    if (!d.requires_new_experiments) out.kept.push_back(item);
    out.log.push_back(std::move(d));
  }
  return out;
}

json to_json(const ReviewAnalysis& a) {
  json comments = json::array();
  for (const auto& [c, m] : a.items) {
    comments.push_back({{"comment_id", c.id},
                        {"ordinal", c.ordinal},
                        {"text", c.text},
                        {"distilled", c.distilled},
                        {"category", enum_name(m.category)},
                        {"sub_category", m.sub_category},
                        {"severity", enum_name(m.severity)},
                        {"confidence", m.confidence}});
  }
  return json{{"review_id", a.review_id},
              {"macro", macro_to_json(a.macro)},
              {"comments", comments},
              {"attempts", a.attempts},
              {"prompt_digests", a.prompt_digests}};
}

}  // namespace rebuttal
