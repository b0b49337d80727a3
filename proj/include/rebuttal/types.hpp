#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace rebuttal {

using Id = std::string;
using Embedding = std::vector<float>;

// ---------------------------------------------------------------------------
// Reviewer taxonomy. The string spellings are the exact labels the extractor
// prompt asks the model to emit; they are the wire format.
// ---------------------------------------------------------------------------

enum class Stance { kAccept, kProbablyAccept, kBorderline, kProbablyReject, kReject };
enum class Attitude { kEnthusiastic, kConstructive, kNeutral, kSkeptical, kDismissive };
enum class Concern { kNovelty, kMethodology, kExperimentalRigor, kPresentation };
enum class Expertise { kDomainExpert, kGeneralist, kUnfamiliar };
enum class Category { kNovelty, kMethodology, kExperimentalRigor, kPresentation, kMetaCritique };
enum class Severity { kMajor, kMinor };

template <class E>
struct EnumTable;

template <>
struct EnumTable<Stance> {
  static constexpr std::string_view kField = "overall_stance";
  static constexpr std::array<std::pair<Stance, std::string_view>, 5> kValues{{
      {Stance::kAccept, "Accept"},
      {Stance::kProbablyAccept, "Probably Accept"},
      {Stance::kBorderline, "Borderline"},
      {Stance::kProbablyReject, "Probably Reject"},
      {Stance::kReject, "Reject"},
  }};
};

template <>
struct EnumTable<Attitude> {
  static constexpr std::string_view kField = "overall_attitude";
  static constexpr std::array<std::pair<Attitude, std::string_view>, 5> kValues{{
      {Attitude::kEnthusiastic, "Enthusiastic"},
      {Attitude::kConstructive, "Constructive"},
      {Attitude::kNeutral, "Neutral"},
      {Attitude::kSkeptical, "Skeptical"},
      {Attitude::kDismissive, "Dismissive"},
  }};
};

template <>
struct EnumTable<Concern> {
  static constexpr std::string_view kField = "dominant_concern";
  static constexpr std::array<std::pair<Concern, std::string_view>, 4> kValues{{
      {Concern::kNovelty, "Novelty & Significance"},
      {Concern::kMethodology, "Methodological Soundness"},
      {Concern::kExperimentalRigor, "Experimental Rigor"},
      {Concern::kPresentation, "Presentation & Clarity"},
  }};
};

template <>
struct EnumTable<Expertise> {
  static constexpr std::string_view kField = "reviewer_expertise";
  static constexpr std::array<std::pair<Expertise, std::string_view>, 3> kValues{{
      {Expertise::kDomainExpert, "Domain Expert"},
      {Expertise::kGeneralist, "Generalist"},
      {Expertise::kUnfamiliar, "Unfamiliar"},
  }};
};

template <>
struct EnumTable<Category> {
  static constexpr std::string_view kField = "category";
  static constexpr std::array<std::pair<Category, std::string_view>, 5> kValues{{
      {Category::kNovelty, "Novelty & Significance"},
      {Category::kMethodology, "Methodological Soundness"},
      {Category::kExperimentalRigor, "Experimental Rigor"},
      {Category::kPresentation, "Presentation & Clarity"},
      {Category::kMetaCritique, "Meta-Critique & Reviewer Behavior"},
  }};
};

template <>
struct EnumTable<Severity> {
  static constexpr std::string_view kField = "severity";
  static constexpr std::array<std::pair<Severity, std::string_view>, 2> kValues{{
      {Severity::kMajor, "Major"},
      {Severity::kMinor, "Minor"},
  }};
};

template <class E>
constexpr std::string_view enum_name(E value) {
  for (const auto& [v, name] : EnumTable<E>::kValues) {
    if (v == value) return name;
  }
  return {};
}

template <class E>
constexpr std::optional<E> parse_enum(std::string_view name) {
  for (const auto& [v, label] : EnumTable<E>::kValues) {
    if (label == name) return v;
  }
  return std::nullopt;
}

/// Allowed sub-category labels for a micro-level category.
std::span<const std::string_view> sub_categories(Category category);

// ---------------------------------------------------------------------------
// Documents
// ---------------------------------------------------------------------------

struct ManuscriptChunk {
  Id id;
  std::uint32_t ordinal = 0;
  std::string text;
  std::optional<Embedding> embedding;

  bool operator==(const ManuscriptChunk&) const = default;
};

struct ManuscriptDocument {
  Id id;
  std::string title;
  std::string body;
  std::vector<ManuscriptChunk> chunks;
};

struct ReviewDocument {
  Id id;
  Id manuscript_id;
  std::string raw_text;
  std::optional<std::string> venue;
};

struct Comment {
  Id id;
  Id review_id;
  std::uint32_t ordinal = 0;
  std::string text;
  // Set when the text is not a normalized substring of the review.
  bool distilled = false;

  bool operator==(const Comment&) const = default;
};

// ---------------------------------------------------------------------------
// Hierarchical reviewer profile
// ---------------------------------------------------------------------------

struct MacroProfile {
  Stance overall_stance = Stance::kBorderline;
  Attitude overall_attitude = Attitude::kNeutral;
  Concern dominant_concern = Concern::kMethodology;
  Expertise reviewer_expertise = Expertise::kGeneralist;
  int confidence = 5;

  bool operator==(const MacroProfile&) const = default;
};

struct MicroAnalysis {
  Id comment_id;
  std::string comment_text;
  Category category = Category::kMethodology;
  std::string sub_category;
  Severity severity = Severity::kMinor;
  int confidence = 5;

  bool operator==(const MicroAnalysis&) const = default;
};

struct ReviewerProfile {
  MacroProfile macro;
  std::vector<MicroAnalysis> per_comment;

  const MicroAnalysis* find(std::string_view comment_id) const {
    for (const auto& m : per_comment) {
      if (m.comment_id == comment_id) return &m;
    }
    return nullptr;
  }

  bool operator==(const ReviewerProfile&) const = default;
};

// ---------------------------------------------------------------------------
// Pipeline outputs
// ---------------------------------------------------------------------------

struct Strategy {
  std::vector<std::string> steps;

  /// "1. first\n2. second" rendering used in prompts and target sequences.
  std::string numbered() const;

  bool operator==(const Strategy&) const = default;
};

struct RebuttalResponse {
  std::string text;

  bool operator==(const RebuttalResponse&) const = default;
};

struct TargetSequence {
  std::string analysis_block;
  std::string strategy_block;
  std::string response_block;
  std::string rendered;

  bool operator==(const TargetSequence&) const = default;
};

struct RankedChunk {
  Id chunk_id;
  std::uint32_t ordinal = 0;
  double similarity = 0.0;
  std::string text;

  bool operator==(const RankedChunk&) const = default;
};

struct RetrievalResult {
  Id comment_id;
  std::vector<RankedChunk> ranked;
  std::size_t k = 3;

  /// Concatenation of the ranked chunk texts, or empty when nothing was found.
  std::string evidence_text() const;

  bool operator==(const RetrievalResult&) const = default;
};

// One entry per pipeline stage; `prompt_digests` lists every provider call
// the stage made (cache hits included).
struct StageTrace {
  std::string stage;
  std::string model_id;
  std::string timestamp;
  std::string template_hash;
  std::vector<std::string> prompt_digests;
  int attempts = 0;

  bool operator==(const StageTrace&) const = default;
};

struct TsrRecord {
  Id manuscript_id;
  Id review_id;
  Id comment_id;
  ReviewerProfile profile;
  Strategy strategy;
  RebuttalResponse response;
  std::vector<Id> retrieved_chunk_ids;
  std::vector<StageTrace> provider_trace;

  bool operator==(const TsrRecord&) const = default;
};

}  // namespace rebuttal
