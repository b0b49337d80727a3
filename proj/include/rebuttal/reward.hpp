#pragma once

// Composite self-reward and the group-relative policy-optimization terms.
// Everything here is pure arithmetic on scalars.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "rebuttal/errors.hpp"

namespace rebuttal {

inline constexpr double kAdvantageEps = 1e-8;
inline constexpr double kDefaultClipEpsilon = 0.2;
inline constexpr double kDefaultKlCoeff = 0.001;
inline constexpr std::size_t kDefaultGroupSize = 5;

struct RewardWeights {
  double format = 0.1;
  double think = 0.3;
  double resp = 0.3;
  double div = 0.3;

  double sum() const { return format + think + resp + div; }

  void validate() const {
    if (format < 0 || think < 0 || resp < 0 || div < 0) {
      throw Error(ErrorKind::kOutOfRange, "reward weights must be non-negative");
    }
    if (std::abs(sum() - 1.0) > 1e-9) {
      throw Error(ErrorKind::kOutOfRange, "reward weights must sum to 1");
    }
  }

  bool operator==(const RewardWeights&) const = default;
};

// Judge outputs as returned, before normalization.
struct RawJudgeScores {
  int format = 0;
  double analysis = 1;
  double strategy = 1;
  double resp = 1;
  double div = 1;

  bool operator==(const RawJudgeScores&) const = default;
};

struct RewardBreakdown {
  int format = 0;     // {0,1}
  double think = 0;   // [0,1]
  double resp = 0;    // [0,1]
  double div = 0;     // [0,1]
  RawJudgeScores raw;
  RewardWeights weights;
  double total = 0;   // [0,1]

  bool operator==(const RewardBreakdown&) const = default;
};

namespace detail {
inline void check_score(double s, const char* what) {
  if (!std::isfinite(s) || s < 1.0 || s > 10.0) {
    throw Error(ErrorKind::kOutOfRange,
                std::string(what) + " score " + std::to_string(s) + " outside 1..10");
  }
}
}  // namespace detail

/// Judge scores are mapped to [0,1] by s/10; the reasoning component is the
/// mean of its analysis and strategy scores.
inline RewardBreakdown composite_reward(int format, std::pair<double, double> think, double resp,
                                        double div, const RewardWeights& weights = {}) {
  if (format != 0 && format != 1) {
    throw Error(ErrorKind::kOutOfRange, "format reward must be 0 or 1");
  }
  detail::check_score(think.first, "analysis");
  detail::check_score(think.second, "strategy");
  detail::check_score(resp, "response");
  detail::check_score(div, "diversity");
  weights.validate();

  RewardBreakdown b;
  b.format = format;
  b.think = (think.first + think.second) / 2.0 / 10.0;
  b.resp = resp / 10.0;
  b.div = div / 10.0;
  b.raw = {format, think.first, think.second, resp, div};
  b.weights = weights;
  b.total = weights.format * b.format + weights.think * b.think + weights.resp * b.resp +
            weights.div * b.div;
  return b;
}

/// A_i = (r_i - mean) / (std + 1e-8) with the population std. A group whose
/// rewards are all equal gets all-zero advantages.
inline std::vector<double> group_advantages(std::span<const double> rewards) {
  if (rewards.size() < 2) {
    throw Error(ErrorKind::kGroupTooSmall, "advantages need at least two rewards");
  }
  for (double r : rewards) {
    if (!std::isfinite(r)) throw Error(ErrorKind::kOutOfRange, "reward is not finite");
  }
  std::vector<double> out(rewards.size(), 0.0);
  if (std::all_of(rewards.begin(), rewards.end(), [&](double r) { return r == rewards[0]; })) {
    return out;
  }
  const double n = static_cast<double>(rewards.size());
  double mean = 0.0;
  for (double r : rewards) mean += r;
  mean /= n;
  double var = 0.0;
  for (double r : rewards) var += (r - mean) * (r - mean);
  const double denom = std::sqrt(var / n) + kAdvantageEps;
  for (std::size_t i = 0; i < rewards.size(); ++i) out[i] = (rewards[i] - mean) / denom;
  return out;
}

/// min(ratio * A, clip(ratio, 1 - eps, 1 + eps) * A)
inline double clipped_surrogate_term(double ratio, double advantage,
                                     double epsilon = kDefaultClipEpsilon) {
  const double clipped = std::clamp(ratio, 1.0 - epsilon, 1.0 + epsilon);
  return std::min(ratio * advantage, clipped * advantage);
}

/// k3 estimator exp(d) - d - 1 with d = logp_ref - logp.
inline double kl_penalty(double logp, double logp_ref) {
  const double d = logp_ref - logp;
  return std::max(0.0, std::expm1(d) - d);
}

/// Per-sample objective term: clipped surrogate minus beta times the KL term.
inline double grpo_objective_term(double logp, double logp_old, double logp_ref, double advantage,
                                  double epsilon = kDefaultClipEpsilon,
                                  double kl_coeff = kDefaultKlCoeff) {
  return clipped_surrogate_term(std::exp(logp - logp_old), advantage, epsilon) -
         kl_coeff * kl_penalty(logp, logp_ref);
}

struct Candidate {
  std::string output;
  RewardBreakdown reward;
};

struct CandidateGroup {
  std::string prompt_id;
  std::vector<Candidate> candidates;
  std::vector<double> advantages;

  std::size_t size() const { return candidates.size(); }
};

/// Fills in advantages from the candidates' totals.
inline CandidateGroup make_candidate_group(std::string prompt_id,
                                           std::vector<Candidate> candidates) {
  CandidateGroup g{std::move(prompt_id), std::move(candidates), {}};
  if (g.candidates.size() >= 2) {
    std::vector<double> totals;
    for (const auto& c : g.candidates) totals.push_back(c.reward.total);
    g.advantages = group_advantages(totals);
  } else {
    g.advantages.assign(g.candidates.size(), 0.0);
  }
  return g;
}

/// Index of the maximal total; the lowest index wins ties.
inline std::size_t select_best_of_n(std::span<const double> totals) {
  if (totals.empty()) throw Error(ErrorKind::kEmptyGroup, "no candidates to select from");
  std::size_t best = 0;
  for (std::size_t i = 1; i < totals.size(); ++i) {
    if (totals[i] > totals[best]) best = i;
  }
  return best;
}

inline std::size_t select_best_of_n(const CandidateGroup& group) {
  std::vector<double> totals;
  for (const auto& c : group.candidates) totals.push_back(c.reward.total);
  return select_best_of_n(totals);
}

}  // namespace rebuttal
