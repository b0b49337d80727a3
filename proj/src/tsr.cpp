#include "rebuttal/tsr.hpp"

#include <algorithm>
#include <atomic>
#include <thread>

#include "rebuttal/errors.hpp"
#include "rebuttal/profile.hpp"
#include "rebuttal/prompts.hpp"
#include "rebuttal/target_sequence.hpp"
#include "rebuttal/text.hpp"

namespace rebuttal {

// ---------------------------------------------------------------------------
// AnalysisCache
// ---------------------------------------------------------------------------

std::string AnalysisCache::key(const ReviewDocument& review, std::string_view scope) {
  return std::string(scope) + '\x1f' + review.id + '\x1f' + sha256_hex(review.raw_text);
}

std::shared_ptr<const ReviewAnalysis> AnalysisCache::get_or_compute(
    const ReviewDocument& review, const std::function<ReviewAnalysis()>& compute,
    std::string_view scope) {
  std::promise<std::shared_ptr<const ReviewAnalysis>> promise;
  std::shared_future<std::shared_ptr<const ReviewAnalysis>> future;
  bool owner = false;
  {
    std::lock_guard lock(mu_);
    auto [it, inserted] = entries_.try_emplace(key(review, scope));
    if (inserted) {
      it->second = promise.get_future().share();
      owner = true;
    }
    future = it->second;
  }
  if (owner) {
    try {
      promise.set_value(std::make_shared<const ReviewAnalysis>(compute()));
    } catch (...) {
      // A failed analysis is not cached; the next caller retries it.
      {
        std::lock_guard lock(mu_);
        entries_.erase(key(review, scope));
      }
      promise.set_exception(std::current_exception());
    }
  }
  return future.get();
}

void AnalysisCache::put(const ReviewDocument& review, ReviewAnalysis analysis,
                        std::string_view scope) {
  std::promise<std::shared_ptr<const ReviewAnalysis>> promise;
  promise.set_value(std::make_shared<const ReviewAnalysis>(std::move(analysis)));
  std::lock_guard lock(mu_);
  entries_.insert_or_assign(key(review, scope), promise.get_future().share());
}

// ---------------------------------------------------------------------------
// Prompts
// ---------------------------------------------------------------------------

namespace {

std::string evidence_or_marker(const RetrievalResult& context) {
  auto e = context.evidence_text();
  return is_blank(e) ? std::string(prompts::kNoEvidence) : e;
}

void begin_trace(StageTrace* trace, std::string stage, const Gateway& provider,
                 std::string_view template_name) {
  if (!trace) return;
  *trace = StageTrace{std::move(stage), provider.config().model_id, provider.now_timestamp(),
                      template_name.empty() ? "" : prompts::template_hash(template_name), {}, 0};
}

void note_call(StageTrace* trace, const ChatResult& r) {
  if (!trace) return;
  trace->prompt_digests.push_back(r.prompt_digest);
  trace->attempts += r.attempts;
}

}  // namespace

std::string render_strategy_prompt(const ReviewerProfile& profile, const Comment& comment,
                                   const RetrievalResult& context) {
  return render_template(prompts::get(prompts::kTsrStrategy),
                         {{"PROFILE", comment_profile_json(profile, comment.id).dump(2)},
                          {"COMMENT", comment.text},
                          {"EVIDENCE", evidence_or_marker(context)}});
}

std::string render_response_prompt(const ReviewDocument& review, const Comment& comment,
                                   const ReviewerProfile& profile, const Strategy& strategy,
                                   const RetrievalResult& context,
                                   const std::optional<SynthesisPair>& orig) {
  std::string instruction;
  std::string section;
  if (orig) {
    instruction =
        "6. Original_Response: The authors' own reply to this comment. Keep its facts and "
        "commitments, and improve how they are argued.\n";
    section = "\n" + prompts::section("Original_Response", orig->original_response);
  }
  return render_template(prompts::get(prompts::kTsrResponse),
                         {{"ORIGINAL_RESPONSE_INSTRUCTION", instruction},
                          {"REVIEW", review.raw_text},
                          {"COMMENT", comment.text},
                          {"PROFILE", comment_profile_json(profile, comment.id).dump(2)},
                          {"STRATEGY", strategy.numbered()},
                          {"EVIDENCE", evidence_or_marker(context)},
                          {"ORIGINAL_RESPONSE_SECTION", section}});
}

Strategy generate_strategy(const ReviewerProfile& profile, const Comment& comment,
                           const RetrievalResult& context, Gateway& provider, StageTrace* trace) {
  if (!profile.find(comment.id)) {
    throw Error(ErrorKind::kPrecondition, "profile has no analysis for comment " + comment.id);
  }
  begin_trace(trace, "strategy", provider, prompts::kTsrStrategy);
  const auto reply = provider.chat("strategy", render_strategy_prompt(profile, comment, context));
  note_call(trace, reply);
  Strategy s{parse_strategy_steps(extract_tag_block(reply.text, "strategy"))};
  if (s.steps.empty()) throw Error(ErrorKind::kMalformedSequence, "strategy block has no steps");
  return s;
}

RebuttalResponse generate_response(const ReviewDocument& review, const Comment& comment,
                                   const ReviewerProfile& profile, const Strategy& strategy,
                                   const RetrievalResult& context,
                                   const std::optional<SynthesisPair>& orig, Gateway& provider,
                                   StageTrace* trace, const ChatOptions& options) {
  begin_trace(trace, "response", provider, prompts::kTsrResponse);
  const auto reply = provider.chat(
      "response", render_response_prompt(review, comment, profile, strategy, context, orig),
      options);
  note_call(trace, reply);
  return RebuttalResponse{std::string(trim(extract_tag_block(reply.text, "response")))};
}

// ---------------------------------------------------------------------------
// Pipeline
// ---------------------------------------------------------------------------

namespace {

template <class Fn>
auto in_stage(const char* stage, Fn&& fn) -> decltype(fn()) {
  try {
    return fn();
  } catch (Error& e) {
    if (e.stage().empty()) e.with_stage(stage);
    throw;
  } catch (const std::exception& e) {
    throw Error(ErrorKind::kProviderError, e.what()).with_stage(stage);
  }
}

}  // namespace

TsrRecord run_tsr(const ManuscriptDocument& manuscript, const ReviewDocument& review,
                  std::string_view comment_id, Gateway& provider, const TsrOptions& options) {
  TsrRecord record;
  record.manuscript_id = manuscript.id;
  record.review_id = review.id;
  record.comment_id = std::string(comment_id);

  auto notify = [&](const char* stage, const char* status) {
    if (options.on_stage) options.on_stage(stage, status);
  };
  auto staged = [&](const char* stage, auto&& fn) -> decltype(fn()) {
    notify(stage, "started");
    try {
      auto r = in_stage(stage, fn);
      notify(stage, "done");
      return r;
    } catch (...) {
      notify(stage, "failed");
      throw;
    }
  };

  StageTrace analysis_trace{"analysis", provider.config().model_id, provider.now_timestamp(),
                            prompts::template_hash(prompts::kExtractReview), {}, 0};
  const auto analysis = staged("analysis", [&] {
    auto compute = [&] { return analyze_review(review, provider); };
    return options.analysis_cache
               ? options.analysis_cache->get_or_compute(review, compute, provider.config().model_id)
                                  : std::make_shared<const ReviewAnalysis>(compute());
  });
  analysis_trace.prompt_digests = analysis->prompt_digests;
  analysis_trace.attempts = analysis->attempts;
  record.provider_trace.push_back(analysis_trace);

  const auto* item = analysis->find(comment_id);
  if (!item) {
    throw Error(ErrorKind::kPrecondition,
                "comment " + std::string(comment_id) + " is not among the " +
                    std::to_string(analysis->items.size()) + " comments extracted from review " +
                    review.id)
        .with_stage("analysis");
  }
  const Comment& comment = item->first;
  record.profile = analysis->profile();

  StageTrace retrieval_trace{"retrieval", provider.config().embedding_model_id,
                             provider.now_timestamp(), "", {}, 0};
  const auto context = staged("retrieval", [&] {
    const auto chunks =
        manuscript.chunks.empty() ? chunk_by_paragraph(manuscript.body) : manuscript.chunks;
    if (chunks.empty()) return RetrievalResult{comment.id, {}, options.k};
    RetrievalStats stats;
    auto r = retrieve_top_k(comment, chunks, options.k, provider, options.embedding_cache, &stats);
    retrieval_trace.prompt_digests = std::move(stats.embedded_digests);
    retrieval_trace.attempts = stats.requests;
    return r;
  });
  record.provider_trace.push_back(retrieval_trace);
  for (const auto& c : context.ranked) record.retrieved_chunk_ids.push_back(c.chunk_id);

  StageTrace strategy_trace;
  if (options.strategy_override) {
    if (options.strategy_override->steps.empty()) {
      throw Error(ErrorKind::kPrecondition, "strategy override has no steps").with_stage("strategy");
    }
    record.strategy = *options.strategy_override;
    notify("strategy", "started");
    notify("strategy", "done");
    strategy_trace = StageTrace{"strategy", "override", provider.now_timestamp(), "", {}, 0};
  } else {
    record.strategy = staged("strategy", [&] {
      return generate_strategy(record.profile, comment, context, provider, &strategy_trace);
    });
  }
  record.provider_trace.push_back(strategy_trace);

  StageTrace response_trace;
  record.response = staged("response", [&] {
    return generate_response(review, comment, record.profile, record.strategy, context,
                             options.orig, provider, &response_trace, options.response_options);
  });
  record.provider_trace.push_back(response_trace);
  return record;
}

std::vector<TsrRecord> run_tsr_batch(const ManuscriptDocument& manuscript,
                                     const ReviewDocument& review, std::span<const Id> comment_ids,
                                     Gateway& provider, TsrOptions options,
                                     std::size_t parallelism) {
  AnalysisCache local_cache;
  if (!options.analysis_cache) options.analysis_cache = &local_cache;
  // Analyze once up front so ordinals are known and workers share the result.
  const auto analysis = options.analysis_cache->get_or_compute(
      review, [&] { return analyze_review(review, provider); }, provider.config().model_id);

  std::vector<std::optional<TsrRecord>> results(comment_ids.size());
  std::vector<std::exception_ptr> errors(comment_ids.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < comment_ids.size(); i = next++) {
      try {
        results[i] = run_tsr(manuscript, review, comment_ids[i], provider, options);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  const auto n = std::max<std::size_t>(1, std::min(parallelism, comment_ids.size()));
  for (std::size_t t = 0; t < n; ++t) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }

  std::vector<TsrRecord> out;
  for (auto& r : results) out.push_back(std::move(*r));
  auto ordinal = [&](const TsrRecord& r) {
    const auto* item = analysis->find(r.comment_id);
    return item ? item->first.ordinal : 0u;
  };
  std::stable_sort(out.begin(), out.end(), [&](const TsrRecord& a, const TsrRecord& b) {
    return ordinal(a) < ordinal(b);
  });
  return out;
}

}  // namespace rebuttal
