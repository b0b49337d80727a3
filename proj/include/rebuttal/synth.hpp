#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <memory>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "rebuttal/extraction.hpp"
#include "rebuttal/provider.hpp"
#include "rebuttal/retrieval.hpp"
#include "rebuttal/tsr.hpp"
#include "rebuttal/types.hpp"

namespace rebuttal {

/// A review thread file holds the review and the authors' reply as two
/// sections:
///   === REVIEW ===
///   ...
///   === AUTHOR RESPONSE ===
///   ...
struct ReviewThread {
  std::string review;
  std::string reply;
};

ReviewThread parse_thread(std::string_view raw);

struct PairingLogEntry {
  Id comment_id;
  std::string source;  // "prompt", "similarity" or "dropped"
  std::string note;
};

struct PairingResult {
  ReviewAnalysis analysis;
  std::vector<std::pair<Comment, SynthesisPair>> pairs;
  std::vector<PairingLogEntry> log;
};

struct PairingOptions {
  // Minimum cosine for the similarity fallback to accept a reply paragraph.
  double min_similarity = 0.35;
  EmbeddingCache* embedding_cache = nullptr;
};

/// Extracts the comments of the thread's review and aligns each with the
/// part of the author reply that answers it: first via the alignment prompt,
/// then by embedding similarity over reply paragraphs for comments the
/// prompt left unanswered. Comments with no reply are dropped and logged.
PairingResult pair_comments_with_responses(std::string_view thread, const Id& review_id,
                                           Gateway& provider, const PairingOptions& options = {});

struct SynthesisOptions {
  std::size_t k = kDefaultTopK;
  bool refine = false;  // one critique-and-refine round on the response
  AnalysisCache* analysis_cache = nullptr;
  EmbeddingCache* embedding_cache = nullptr;
};

struct SynthesizedRecord {
  TsrRecord record;
  TargetSequence sequence;
  std::string input_prompt;  // policy prompt the sequence answers
  Category category = Category::kMethodology;
  std::string teacher;       // teacher model id
  std::uint32_t comment_ordinal = 0;
};

/// Runs the pipeline in synthesis mode (the authentic reply is part of the
/// response prompt) and assembles the tagged target sequence. A comment
/// that demands new experiments is a precondition error: such comments must
/// be filtered out before synthesis.
SynthesizedRecord synthesize_record(const std::pair<Comment, SynthesisPair>& pair,
                                    const ManuscriptDocument& manuscript,
                                    const ReviewDocument& review, Gateway& teacher,
                                    const SynthesisOptions& options = {});

struct SftExample {
  std::string input_prompt;
  std::string target_sequence;
  std::string category;
  std::string teacher;

  bool operator==(const SftExample&) const = default;
};

struct SynthesisJob {
  std::filesystem::path source;
  std::vector<ProviderConfig> teachers;
  std::map<Category, std::size_t> quotas;
  // Extra uniform picks beyond the quotas; defaults to sum(quotas) / 6.
  std::optional<std::size_t> random_extra;
  std::uint64_t seed = 0;
  bool refine = false;
  std::size_t k = kDefaultTopK;

  std::size_t extra() const;
};

/// Job file: {"source", "teachers": [provider config...], "quotas":
/// {category: count}, "random_extra", "seed", "refine", "k"}. Category keys
/// may be any unambiguous prefix of a category label.
SynthesisJob load_job(const std::filesystem::path& path);
SynthesisJob job_from_json(const json& doc);
Category parse_category_key(std::string_view key);

struct ExportReport {
  std::map<std::string, std::size_t> selected_per_category;
  std::size_t random_extra = 0;
  std::size_t total = 0;
  std::vector<std::string> warnings;  // one per QuotaUnsatisfiable category
};

/// Seeded per-category sampling up to quota, then `extra()` uniform picks
/// from what is left. Selected records are written as JSONL ordered by
/// (review id, comment ordinal, teacher).
ExportReport balance_and_export(const std::vector<SynthesizedRecord>& records,
                                const SynthesisJob& job, const std::filesystem::path& out);

struct SynthesisRunReport {
  std::size_t threads = 0;
  std::size_t comments = 0;
  std::size_t paired = 0;
  std::size_t filtered_out = 0;  // comments that demand new experiments
  std::size_t synthesized = 0;
  std::vector<std::string> failures;
  ExportReport exported;
};

using GatewayFactory = std::function<std::shared_ptr<Gateway>(const ProviderConfig&)>;

/// Runs a whole job over `job.source`, a directory of "<stem>.thread.txt"
/// files with optional "<stem>.manuscript.txt" companions. Pairing and the
/// experiment filter use the first teacher; every teacher synthesizes every
/// kept comment. Per-comment failures are collected, not thrown.
SynthesisRunReport run_synthesis_job(const SynthesisJob& job, const std::filesystem::path& out,
                                     const GatewayFactory& make_gateway,
                                     EmbeddingCache* embedding_cache = nullptr);

std::string to_jsonl_line(const SftExample& example);
std::vector<SftExample> read_sft_corpus(const std::filesystem::path& path);
void write_sft_corpus(const std::vector<SftExample>& examples, const std::filesystem::path& path);

/// Uniform integer in [0, bound) from mt19937_64 by rejection, so sampling
/// does not depend on the standard library's distribution implementation.
std::uint64_t uniform_below(std::uint64_t bound, std::mt19937_64& gen);

template <class T>
void seeded_shuffle(std::vector<T>& v, std::mt19937_64& gen) {
  for (std::size_t i = v.size(); i > 1; --i) {
    std::swap(v[i - 1], v[uniform_below(i, gen)]);
  }
}

}  // namespace rebuttal
