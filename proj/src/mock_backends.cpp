#include "rebuttal/mock_backends.hpp"

#include <cmath>
#include <random>

#include "rebuttal/errors.hpp"
#include "rebuttal/heuristics.hpp"
#include "rebuttal/json_util.hpp"
#include "rebuttal/profile.hpp"
#include "rebuttal/prompts.hpp"
#include "rebuttal/target_sequence.hpp"
#include "rebuttal/text.hpp"

namespace rebuttal {
namespace {

[[noreturn]] void raise(InjectedFailure kind) {
  switch (kind) {
    case InjectedFailure::kTransient: throw TransientError("injected transient failure");
    case InjectedFailure::kTimeout: throw TimeoutError("injected timeout");
    case InjectedFailure::kPermanent:
      throw Error(ErrorKind::kProviderError, "injected permanent failure");
  }
  throw TransientError("injected failure");
}

}  // namespace

// ---------------------------------------------------------------------------
// ScriptedChatBackend
// ---------------------------------------------------------------------------

void ScriptedChatBackend::on_digest(std::string digest, std::string reply) {
  std::lock_guard lock(mu_);
  by_digest_[std::move(digest)] = std::move(reply);
}

void ScriptedChatBackend::on_contains(std::string needle, std::string reply) {
  std::lock_guard lock(mu_);
  by_substring_.emplace_back(std::move(needle), std::move(reply));
}

void ScriptedChatBackend::enqueue(std::string reply) {
  std::lock_guard lock(mu_);
  queue_.push_back(std::move(reply));
}

void ScriptedChatBackend::set_fallback(std::shared_ptr<ChatBackend> fallback) {
  std::lock_guard lock(mu_);
  fallback_ = std::move(fallback);
}

void ScriptedChatBackend::fail_next(int n, InjectedFailure kind) {
  std::lock_guard lock(mu_);
  for (int i = 0; i < n; ++i) failures_.push_back(kind);
}

std::string ScriptedChatBackend::complete(const ChatRequest& request) {
  std::shared_ptr<ChatBackend> fallback;
  {
    std::lock_guard lock(mu_);
    log_.push_back(request);
    if (!failures_.empty()) {
      const auto kind = failures_.front();
      failures_.pop_front();
      raise(kind);
    }
    if (auto it = by_digest_.find(sha256_hex(request.prompt)); it != by_digest_.end()) {
      return it->second;
    }
    for (const auto& [needle, reply] : by_substring_) {
      if (request.prompt.find(needle) != std::string::npos) return reply;
    }
    if (!queue_.empty()) {
      auto reply = std::move(queue_.front());
      queue_.pop_front();
      return reply;
    }
    fallback = fallback_;
  }
  if (fallback) return fallback->complete(request);
  throw Error(ErrorKind::kProviderError, "scripted backend has no reply for this prompt");
}

std::vector<ChatRequest> ScriptedChatBackend::requests() const {
  std::lock_guard lock(mu_);
  return log_;
}

std::size_t ScriptedChatBackend::call_count() const {
  std::lock_guard lock(mu_);
  return log_.size();
}

// ---------------------------------------------------------------------------
// HashEmbeddingBackend
// ---------------------------------------------------------------------------

namespace {

std::uint64_t digest_seed(std::string_view text) {
  const auto hex = sha256_hex(text);
  return std::stoull(hex.substr(0, 16), nullptr, 16);
}

// Standard normals from mt19937_64 via Box-Muller. std::normal_distribution
// is implementation-defined, which would make vectors differ across
// standard libraries.
void add_gaussian(std::vector<double>& acc, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  auto uniform = [&] { return (static_cast<double>(gen() >> 11) + 0.5) * 0x1.0p-53; };
  for (std::size_t i = 0; i < acc.size(); i += 2) {
    const double r = std::sqrt(-2.0 * std::log(uniform()));
    const double theta = 2.0 * M_PI * uniform();
    acc[i] += r * std::cos(theta);
    if (i + 1 < acc.size()) acc[i + 1] += r * std::sin(theta);
  }
}

}  // namespace

HashEmbeddingBackend::HashEmbeddingBackend(std::size_t dimension, Mode mode)
    : dimension_(dimension), mode_(mode) {
  if (dimension_ == 0) throw Error(ErrorKind::kPrecondition, "embedding dimension must be positive");
}

Embedding HashEmbeddingBackend::embed_text(std::string_view text, std::size_t dimension,
                                           Mode mode) {
  std::vector<double> acc(dimension, 0.0);
  bool any = false;
  if (mode == Mode::kBagOfWords) {
    for (const auto& w : words(normalize_for_match(text))) {
      if (w.size() < 3) continue;
      add_gaussian(acc, digest_seed(w));
      any = true;
    }
  }
  if (!any) add_gaussian(acc, digest_seed(text));
  double norm = 0.0;
  for (double v : acc) norm += v * v;
  norm = std::sqrt(norm);
  Embedding out(dimension);
  for (std::size_t i = 0; i < dimension; ++i) out[i] = static_cast<float>(acc[i] / norm);
  return out;
}

std::vector<Embedding> HashEmbeddingBackend::embed(const EmbedRequest& request) {
  {
    std::lock_guard lock(mu_);
    batches_.push_back(request.texts.size());
    if (!failures_.empty()) {
      const auto kind = failures_.front();
      failures_.pop_front();
      raise(kind);
    }
  }
  std::vector<Embedding> out;
  out.reserve(request.texts.size());
  for (const auto& t : request.texts) out.push_back(embed_text(t, dimension_, mode_));
  return out;
}

void HashEmbeddingBackend::fail_next(int n, InjectedFailure kind) {
  std::lock_guard lock(mu_);
  for (int i = 0; i < n; ++i) failures_.push_back(kind);
}

std::vector<std::size_t> HashEmbeddingBackend::batch_log() const {
  std::lock_guard lock(mu_);
  return batches_;
}

// ---------------------------------------------------------------------------
// RuleBasedBackend
// ---------------------------------------------------------------------------

namespace {

bool has(std::string_view prompt, std::string_view marker) {
  return prompt.find(marker) != std::string_view::npos;
}

std::string evidence_of(std::string_view prompt) {
  auto e = prompt_section(prompt, "Relevant_Paper_Fragment");
  return e == prompts::kNoEvidence ? std::string() : e;
}

heuristics::ResponseStyle style_for(const std::optional<std::uint64_t>& seed) {
  if (!seed) return heuristics::ResponseStyle::kNarrative;
  switch (*seed % 3) {
    case 1: return heuristics::ResponseStyle::kTemplatedList;
    case 2: return heuristics::ResponseStyle::kMixed;
    default: return heuristics::ResponseStyle::kNarrative;
  }
}

std::string numbered(const std::vector<std::string>& steps) {
  std::string out;
  for (std::size_t i = 0; i < steps.size(); ++i) {
    if (i) out += '\n';
    out += std::to_string(i + 1) + ". " + steps[i] + ".";
  }
  return out;
}

// Single-comment profile in the extractor schema, as the analysis stage of a
// policy output carries it.
ReviewerProfile profile_for_comment(std::string_view review, std::string_view comment) {
  const auto label = heuristics::classify_comment(comment);
  ReviewerProfile p;
  p.macro = heuristics::infer_macro(review, std::span(&label, 1));
  p.per_comment.push_back({"1", std::string(trim(comment)), label.category, label.sub_category,
                           label.severity, label.confidence});
  return p;
}

std::string answer_extract(std::string_view prompt) {
  const auto at = prompt.rfind("\nReview Text:\n");
  const auto review = at == std::string_view::npos ? prompt : prompt.substr(at + 14);
  return "```json\n" + heuristics::extract_profile_json(review) + "\n```";
}

std::string answer_filter(std::string_view prompt) {
  const bool demand = heuristics::demands_new_experiments(prompt_section(prompt, "Comment"));
  return json{{"requires_new_experiments", demand}}.dump();
}

std::string answer_align(std::string_view prompt) {
  const auto comments = prompt_section(prompt, "Reviewer_Comments");
  const auto paragraphs = split_paragraphs(prompt_section(prompt, "Author_Reply"));
  json alignments = json::array();
  for (const auto& block : split_paragraphs(comments)) {
    // Blocks are "Comment <id>: <text>".
    const auto colon = block.find(':');
    if (block.rfind("Comment ", 0) != 0 || colon == std::string::npos) continue;
    const auto id = block.substr(8, colon - 8);
    const auto text = std::string(trim(std::string_view(block).substr(colon + 1)));
    const auto idx = heuristics::best_reply_paragraph(text, paragraphs, id);
    alignments.push_back({{"comment_id", id}, {"reply", idx ? paragraphs[*idx] : std::string()}});
  }
  return json{{"alignments", alignments}}.dump(2);
}

std::string answer_strategy(std::string_view prompt) {
  const auto profile = validate_profile(prompt_section(prompt, "Reviewer_Profile"));
  if (profile.per_comment.empty()) {
    throw Error(ErrorKind::kProviderError, "strategy prompt carries no comment analysis");
  }
  const auto steps =
      heuristics::plan_strategy(profile.per_comment.front(), profile.macro, evidence_of(prompt));
  return "<strategy>\n" + numbered(steps) + "\n</strategy>";
}

std::string answer_response(std::string_view prompt, const std::optional<std::uint64_t>& seed) {
  const auto steps = parse_strategy_steps(prompt_section(prompt, "Rebuttal_Strategy"));
  const auto text = heuristics::write_response(prompt_section(prompt, "Target_Comment"), steps,
                                               evidence_of(prompt),
                                               prompt_section(prompt, "Original_Response"),
                                               style_for(seed));
  return "<response>\n" + text + "\n</response>";
}

std::string answer_policy(std::string_view prompt, const std::optional<std::uint64_t>& seed) {
  const auto review = prompt_section(prompt, "Full_Review_Content");
  const auto comment = prompt_section(prompt, "Target_Comment");
  const auto evidence = evidence_of(prompt);
  const auto profile = profile_for_comment(review, comment);
  const auto steps =
      heuristics::plan_strategy(profile.per_comment.front(), profile.macro, evidence);
  const auto response =
      heuristics::write_response(comment, steps, evidence, "", style_for(seed));
  std::string out = "I need to analyze the review's overall stance and the target comment:\n";
  out += "<analysis>" + comment_profile_json(profile, "1").dump(2) + "</analysis>\n";
  out += "To address the target comment, I will follow this strategy:\n";
  out += "<strategy>\n" + numbered(steps) + "\n";
  // A sampled candidate occasionally loses a closing tag.
  if (!(seed && *seed % 5 == 4)) out += "</strategy>";
  out += "\n<response>\n" + response + "\n</response>";
  return out;
}

std::string answer_refine(std::string_view prompt) {
  const auto steps = parse_strategy_steps(prompt_section(prompt, "Rebuttal_Strategy"));
  const auto text = heuristics::write_response(prompt_section(prompt, "Target_Comment"), steps,
                                               evidence_of(prompt), "",
                                               heuristics::ResponseStyle::kNarrative);
  return "<response>\n" + text + "\n</response>";
}

std::string answer_diversity(std::string_view prompt) {
  std::vector<std::string> negatives;
  for (int i = 1;; ++i) {
    auto n = prompt_section(prompt, "Negative_Example_" + std::to_string(i));
    if (n.empty()) break;
    negatives.push_back(std::move(n));
  }
  const int score =
      heuristics::diversity_score(prompt_section(prompt, "Response to Evaluate"), negatives);
  return json{{"diversity_score", score}}.dump(1);
}

std::string answer_reasoning(std::string_view prompt, bool gold) {
  const auto analysis = prompt_section(prompt, "Candidate Analysis");
  const auto strategy = prompt_section(prompt, "Candidate Strategy");
  double a = 0;
  double s = 0;
  if (gold) {
    a = heuristics::analysis_agreement(analysis, prompt_section(prompt, "Gold Analysis"));
    s = heuristics::strategy_agreement(strategy, prompt_section(prompt, "Gold Strategy"));
  } else {
    a = heuristics::analysis_quality(analysis, prompt_section(prompt, "Target Comment"));
    s = heuristics::strategy_quality(strategy);
  }
  return json{{"analysis_score", a}, {"strategy_score", s}}.dump(1);
}

std::string answer_response_judge(std::string_view prompt) {
  const int score = heuristics::response_quality(prompt_section(prompt, "Target_Comment"),
                                                 evidence_of(prompt),
                                                 prompt_section(prompt, "Response"));
  return json{{"response_score", score}}.dump(1);
}

std::string answer_scorecard(std::string_view prompt) {
  const auto r = heuristics::scorecard(prompt_section(prompt, "Target_Comment"),
                                       evidence_of(prompt),
                                       prompt_section(prompt, "Original_response"));
  return json{{"score",
               {{"Attitude", r.attitude},
                {"Clarity", r.clarity},
                {"Persuasiveness", r.persuasiveness},
                {"Constructiveness", r.constructiveness}}},
              {"score_explanation", r.explanation}}
      .dump(1);
}

}  // namespace

std::string RuleBasedBackend::complete(const ChatRequest& request) {
  const std::string_view p = request.prompt;
  // Most specific markers first: several templates share their preamble.
  if (has(p, "meta-analysis of academic peer reviews")) return answer_extract(p);
  if (has(p, "can only be answered by conducting new")) return answer_filter(p);
  if (has(p, "You are aligning peer-review comments")) return answer_align(p);
  if (has(p, "Critique the draft rebuttal response")) return answer_refine(p);
  if (has(p, "Your task is to generate a structured rebuttal plan")) {
    return answer_policy(p, request.seed);
  }
  if (has(p, "decide how to respond to one reviewer comment before")) return answer_strategy(p);
  if (has(p, "Step 3: Rebuttal Response")) return answer_response(p, request.seed);
  if (has(p, "assign it a diversity score")) return answer_diversity(p);
  if (has(p, "Compare the candidate's analysis and strategy with the gold")) {
    return answer_reasoning(p, true);
  }
  if (has(p, "There is no gold reference")) return answer_reasoning(p, false);
  if (has(p, "response optimization expert")) return answer_scorecard(p);
  if (has(p, "\"response_score\"")) return answer_response_judge(p);
  throw Error(ErrorKind::kProviderError, "rule-based backend does not recognize the prompt");
}

std::shared_ptr<Gateway> make_mock_gateway(ProviderConfig config, GatewayOptions options) {
  return std::make_shared<Gateway>(
      std::move(config), std::make_shared<RuleBasedBackend>(),
      std::make_shared<HashEmbeddingBackend>(256, HashEmbeddingBackend::Mode::kBagOfWords),
      std::move(options));
}

}  // namespace rebuttal
