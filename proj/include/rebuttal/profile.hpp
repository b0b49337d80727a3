#pragma once

#include <string_view>

#include "rebuttal/json_util.hpp"
#include "rebuttal/types.hpp"

namespace rebuttal {

/// Parses and validates a reviewer profile in the extractor's JSON schema:
///
///   { "global_profile": { overall_stance, overall_attitude, dominant_concern,
///                         reviewer_expertise, confidence },
///     "comment_analysis": [ { comment_id, comment_text, category,
///                             sub_category, severity, confidence }, ... ] }
///
/// `comment_analysis` may also be a single object (the per-comment analysis
/// block of a target sequence). Leading prose is skipped and a missing comma
/// between members is repaired before parsing.
///
/// Errors: kUnknownCategory for a label outside the taxonomy (including a
/// sub_category that belongs to a different category), kOutOfRange for a
/// confidence outside 1..10, kSchemaMismatch for anything structural
/// (missing or extra fields, wrong types, duplicate comment ids).
ReviewerProfile validate_profile(std::string_view raw_profile_json);

/// Same checks on an already-parsed document.
ReviewerProfile profile_from_json(const json& doc);

json macro_to_json(const MacroProfile& macro);
json micro_to_json(const MicroAnalysis& micro);
json profile_to_json(const ReviewerProfile& profile);

/// Profile restricted to one comment, with `comment_analysis` as a single
/// object. This is the analysis block of a target sequence.
json comment_profile_json(const ReviewerProfile& profile, std::string_view comment_id);

}  // namespace rebuttal
