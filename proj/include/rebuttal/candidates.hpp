#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "rebuttal/judges.hpp"
#include "rebuttal/provider.hpp"
#include "rebuttal/reward.hpp"
#include "rebuttal/types.hpp"

namespace rebuttal {

struct CandidateOptions {
  std::size_t group_size = kDefaultGroupSize;
  RewardWeights weights;
  double temperature = 0.7;
  std::uint64_t base_seed = 0;  // candidate i samples with seed base_seed + i
  std::vector<std::string> negatives;  // empty: the shipped negative set
  std::optional<GoldReference> gold;
  // When set, every candidate keeps this strategy and only the response is
  // sampled. Requires `profile`.
  std::optional<Strategy> strategy_override;
  std::optional<ReviewerProfile> profile;
};

struct ScoredCandidate {
  std::size_t index = 0;
  std::uint64_t seed = 0;
  std::string output;  // full tagged output
  std::string prompt_digest;
  RewardBreakdown reward;
};

struct CandidateReport {
  std::string prompt_id;
  std::vector<ScoredCandidate> candidates;
  std::vector<double> advantages;
  std::size_t best = 0;
  std::map<std::string, std::string> template_hashes;
};

/// Samples `group_size` policy outputs for one comment, scores each with the
/// composite reward and picks the best. The policy and judge gateways may be
/// the same object.
CandidateReport run_candidates(const ReviewDocument& review, const Comment& comment,
                               const RetrievalResult& context, Gateway& policy, Gateway& judge,
                               const CandidateOptions& options = {});

/// One JSON object per candidate: reward breakdown, raw judge scores,
/// advantage, selection flag and prompt/template hashes.
std::string reward_report_jsonl(const CandidateReport& report);

/// Whole report as one document: the candidate lines plus group fields.
json to_json(const CandidateReport& report);

}  // namespace rebuttal
