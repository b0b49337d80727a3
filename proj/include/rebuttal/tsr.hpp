#pragma once

#include <functional>
#include <future>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "rebuttal/extraction.hpp"
#include "rebuttal/provider.hpp"
#include "rebuttal/retrieval.hpp"
#include "rebuttal/types.hpp"

namespace rebuttal {

// Authentic author reply for a comment; present only when synthesizing
// training data.
struct SynthesisPair {
  Id comment_id;
  std::string original_response;
};

/// Thread-safe memo of ReviewAnalysis keyed by scope (the extracting model),
/// review id and text digest, so the comments of one review share a single
/// extractor call. Concurrent callers for the same key wait for one compute.
class AnalysisCache {
 public:
  std::shared_ptr<const ReviewAnalysis> get_or_compute(
      const ReviewDocument& review, const std::function<ReviewAnalysis()>& compute,
      std::string_view scope = {});
  void put(const ReviewDocument& review, ReviewAnalysis analysis, std::string_view scope = {});

 private:
  static std::string key(const ReviewDocument& review, std::string_view scope);
  std::mutex mu_;
  std::map<std::string, std::shared_future<std::shared_ptr<const ReviewAnalysis>>> entries_;
};

std::string render_strategy_prompt(const ReviewerProfile& profile, const Comment& comment,
                                   const RetrievalResult& context);

std::string render_response_prompt(const ReviewDocument& review, const Comment& comment,
                                   const ReviewerProfile& profile, const Strategy& strategy,
                                   const RetrievalResult& context,
                                   const std::optional<SynthesisPair>& orig);

/// Strategy stage: sees the profile, the comment and the evidence only.
Strategy generate_strategy(const ReviewerProfile& profile, const Comment& comment,
                           const RetrievalResult& context, Gateway& provider,
                           StageTrace* trace = nullptr);

RebuttalResponse generate_response(const ReviewDocument& review, const Comment& comment,
                                   const ReviewerProfile& profile, const Strategy& strategy,
                                   const RetrievalResult& context,
                                   const std::optional<SynthesisPair>& orig, Gateway& provider,
                                   StageTrace* trace = nullptr, const ChatOptions& options = {});

struct TsrOptions {
  std::size_t k = kDefaultTopK;
  AnalysisCache* analysis_cache = nullptr;
  EmbeddingCache* embedding_cache = nullptr;
  std::optional<Strategy> strategy_override;
  std::optional<SynthesisPair> orig;
  ChatOptions response_options;
  // Called with (stage, "started" | "done" | "failed") at every stage
  // transition, on the calling thread.
  std::function<void(std::string_view, std::string_view)> on_stage;
};

/// Analysis -> retrieval -> strategy -> response for one comment. Stage
/// failures are rethrown with the stage name attached.
TsrRecord run_tsr(const ManuscriptDocument& manuscript, const ReviewDocument& review,
                  std::string_view comment_id, Gateway& provider, const TsrOptions& options = {});

/// run_tsr over several comments with up to `parallelism` in flight. The
/// result is ordered by comment ordinal whatever the completion order.
std::vector<TsrRecord> run_tsr_batch(const ManuscriptDocument& manuscript,
                                     const ReviewDocument& review, std::span<const Id> comment_ids,
                                     Gateway& provider, TsrOptions options = {},
                                     std::size_t parallelism = 4);

}  // namespace rebuttal
