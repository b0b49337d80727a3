#include "rebuttal/candidates.hpp"

#include "rebuttal/errors.hpp"
#include "rebuttal/json_util.hpp"
#include "rebuttal/profile.hpp"
#include "rebuttal/prompts.hpp"
#include "rebuttal/target_sequence.hpp"
#include "rebuttal/text.hpp"
#include "rebuttal/tsr.hpp"

namespace rebuttal {
namespace {

std::string block_or_empty(std::string_view text, std::string_view tag) {
  try {
    return extract_tag_block(text, tag);
  } catch (const Error&) {
    return {};
  }
}

}  // namespace

CandidateReport run_candidates(const ReviewDocument& review, const Comment& comment,
                               const RetrievalResult& context, Gateway& policy, Gateway& judge,
                               const CandidateOptions& options) {
  if (options.group_size == 0) throw Error(ErrorKind::kEmptyGroup, "group size must be positive");
  options.weights.validate();
  if (options.strategy_override && !options.profile) {
    throw Error(ErrorKind::kPrecondition, "a strategy override needs the reviewer profile");
  }
  const auto negatives = options.negatives.empty() ? prompts::default_negatives() : options.negatives;
  const auto evidence = context.evidence_text();

  CandidateReport report;
  report.prompt_id = sha256_hex(review.id + '\x1f' + comment.id + '\x1f' + comment.text).substr(0, 16);
  report.template_hashes = {
      {"judge_diversity", prompts::template_hash(prompts::kJudgeDiversity)},
      {"judge_response", prompts::template_hash(prompts::kJudgeResponse)},
      {"judge_reasoning", prompts::template_hash(options.gold ? prompts::kJudgeReasoningGold
                                                               : prompts::kJudgeReasoningFree)}};
  std::string policy_prompt;
  if (options.strategy_override) {
    report.template_hashes["policy"] = prompts::template_hash(prompts::kTsrResponse);
  } else {
    report.template_hashes["policy"] = prompts::template_hash(prompts::kTsrPolicy);
    policy_prompt = render_template(
        prompts::get(prompts::kTsrPolicy),
        {{"REVIEW", review.raw_text},
         {"COMMENT", comment.text},
         {"EVIDENCE", is_blank(evidence) ? std::string(prompts::kNoEvidence) : evidence}});
  }

  for (std::size_t i = 0; i < options.group_size; ++i) {
    ScoredCandidate c;
    c.index = i;
    c.seed = options.base_seed + i;
    const ChatOptions sampling{options.temperature, c.seed};
    if (options.strategy_override) {
      StageTrace trace;
      const auto response = generate_response(review, comment, *options.profile,
                                              *options.strategy_override, context, std::nullopt,
                                              policy, &trace, sampling);
      c.prompt_digest = trace.prompt_digests.empty() ? "" : trace.prompt_digests.front();
      c.output = assemble_target_sequence(comment_profile_json(*options.profile, comment.id).dump(2),
                                          options.strategy_override->numbered(), response.text)
                     .rendered;
    } else {
      const auto reply = policy.chat("policy", policy_prompt, sampling);
      c.prompt_digest = reply.prompt_digest;
      c.output = reply.text;
    }

    const int format = score_format(c.output);
    const auto analysis = block_or_empty(c.output, "analysis");
    const auto strategy = block_or_empty(c.output, "strategy");
    const auto response = block_or_empty(c.output, "response");
    const auto think = judge_reasoning(analysis, strategy, options.gold, comment.text, judge);
    const int resp = judge_response_quality(review.raw_text, comment.text, evidence, response, judge);
    const int div = judge_diversity(response, negatives, judge);
    c.reward = composite_reward(format, {think.analysis, think.strategy}, resp, div, options.weights);
    report.candidates.push_back(std::move(c));
  }

  std::vector<double> totals;
  for (const auto& c : report.candidates) totals.push_back(c.reward.total);
  report.advantages =
      totals.size() >= 2 ? group_advantages(totals) : std::vector<double>(totals.size(), 0.0);
  report.best = select_best_of_n(totals);
  return report;
}

namespace {

json candidate_json(const CandidateReport& report, const ScoredCandidate& c) {
  const auto& r = c.reward;
  return json{
      {"prompt_id", report.prompt_id},
      {"index", c.index},
      {"seed", c.seed},
      {"format", r.format},
      {"think", r.think},
      {"resp", r.resp},
      {"div", r.div},
      {"total", r.total},
      {"weights", {{"format", r.weights.format}, {"think", r.weights.think},
                   {"resp", r.weights.resp}, {"div", r.weights.div}}},
      {"raw_judge_scores", {{"format", r.raw.format}, {"analysis_score", r.raw.analysis},
                            {"strategy_score", r.raw.strategy}, {"response_score", r.raw.resp},
                            {"diversity_score", r.raw.div}}},
      {"advantage", report.advantages.at(c.index)},
      {"selected", c.index == report.best},
      {"prompt_digest", c.prompt_digest},
      {"template_hashes", report.template_hashes},
      {"output", c.output},
  };
}

}  // namespace

std::string reward_report_jsonl(const CandidateReport& report) {
  std::string out;
  for (const auto& c : report.candidates) out += candidate_json(report, c).dump() + "\n";
  return out;
}

json to_json(const CandidateReport& report) {
  json candidates = json::array();
  for (const auto& c : report.candidates) candidates.push_back(candidate_json(report, c));
  return json{{"prompt_id", report.prompt_id},
              {"group_size", report.candidates.size()},
              {"best", report.best},
              {"advantages", report.advantages},
              {"template_hashes", report.template_hashes},
              {"candidates", candidates}};
}

}  // namespace rebuttal
