#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "rebuttal/json_util.hpp"

namespace rebuttal {

enum class CoarseTier { kUnconvincing, kAcceptable, kGood, kExcellent };
std::string_view to_string(CoarseTier tier);

inline constexpr int kFineBinCount = 7;

/// 0-3 Unconvincing, 4-6 Acceptable, 7-8 Good, 9-10 Excellent.
/// kOutOfRange outside 0..10.
CoarseTier coarse_tier(int score);

/// {0} {1,2} {3,4} {5} {6} {7,8} {9,10} -> 0..6. kOutOfRange outside 0..10.
int fine_bin(int score);

// Correlations return nullopt when undefined (a zero denominator).
std::optional<double> pearson(std::span<const double> x, std::span<const double> y);
/// 1-based ranks; tied values share the mean of their positions.
std::vector<double> average_ranks(std::span<const double> x);
std::optional<double> spearman(std::span<const double> x, std::span<const double> y);
/// Tie-corrected tau-b in O(n log n).
std::optional<double> kendall_tau_b(std::span<const double> x, std::span<const double> y);

struct DimensionAgreement {
  std::string dimension;
  std::size_t n = 0;
  double mae = 0;
  std::optional<double> pearson;
  std::optional<double> spearman;
  std::optional<double> kendall;
  double coarse_acc = 0;
  double fine_acc = 0;
};

/// kLengthMismatch for unequal or empty inputs; kOutOfRange for a score
/// outside 0..10.
DimensionAgreement agreement_metrics(std::span<const int> human, std::span<const int> model,
                                     std::string dimension = {});

struct AgreementReport {
  std::vector<DimensionAgreement> dimensions;
  std::size_t n = 0;
  // Set when some score fell in the {0} fine bin, which has no counterpart
  // in the published six example ranges.
  bool zero_bin_used = false;

  /// Mean of the defined r, beta and f values over all dimensions.
  std::optional<double> average() const;
};

struct DimensionScores {
  std::string dimension;
  std::vector<int> human;
  std::vector<int> model;
};

/// agreement_metrics per dimension. Every dimension must cover the same
/// number of items (kLengthMismatch otherwise).
AgreementReport build_agreement_report(const std::vector<DimensionScores>& dims);

/// {"dimensions": [{"dimension", "human": [...], "model": [...]}, ...]}
std::vector<DimensionScores> dimension_scores_from_json(const json& doc);

json to_json(const DimensionAgreement& d);
json to_json(const AgreementReport& report);

/// Plain-text table: one row per dimension with e r beta tau c f, then the
/// r / beta / f summary row and its average. Undefined values print as "n/a".
std::string render_table(const AgreementReport& report);

}  // namespace rebuttal
