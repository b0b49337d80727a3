#include "rebuttal/profile.hpp"

#include <algorithm>
#include <array>
#include <set>
#include <string>

#include "rebuttal/errors.hpp"
#include "rebuttal/text.hpp"

namespace rebuttal {
namespace {

constexpr std::array<std::string_view, 3> kNoveltySubs = {
    "Contribution Unclear", "Incremental Contribution", "Motivation Weak"};
constexpr std::array<std::string_view, 3> kMethodologySubs = {
    "Technical Error", "Unjustified Assumption", "Lack of Detail"};
constexpr std::array<std::string_view, 4> kRigorSubs = {
    "Baselines Missing/Weak", "Insufficient Experiments", "Ablation/Analysis Missing",
    "Flawed Evaluation"};
constexpr std::array<std::string_view, 4> kPresentationSubs = {
    "Writing Issues/Typos", "Poor Organization", "Figure/Table Quality",
    "Related Work Incomplete"};
constexpr std::array<std::string_view, 1> kMetaSubs = {"Unrealistic/Unconstructive Comment"};

[[noreturn]] void schema(const std::string& what) {
  throw Error(ErrorKind::kSchemaMismatch, "profile schema mismatch: " + what);
}

void require_exact_keys(const json& obj, std::span<const std::string_view> keys,
                        std::string_view where) {
  if (!obj.is_object()) schema(std::string(where) + " is not an object");
  for (const auto& key : keys) {
    if (!obj.contains(key)) schema(std::string(where) + " missing field " + std::string(key));
  }
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    if (std::find(keys.begin(), keys.end(), it.key()) == keys.end()) {
      schema(std::string(where) + " has unknown field " + it.key());
    }
  }
}

template <class E>
E label(const json& obj, std::string_view field) {
  const auto& v = obj.at(std::string(field));
  if (!v.is_string()) schema(std::string(field) + " is not a string");
  const auto parsed = parse_enum<E>(v.get<std::string>());
  if (!parsed) {
    throw Error(ErrorKind::kUnknownCategory,
                "unknown " + std::string(field) + ": \"" + v.get<std::string>() + "\"");
  }
  return *parsed;
}

int confidence(const json& obj) {
  const auto& v = obj.at("confidence");
  if (!v.is_number()) schema("confidence is not a number");
  if (!v.is_number_integer()) {
    const double d = v.get<double>();
    if (d != static_cast<double>(static_cast<long long>(d))) {
      schema("confidence is not an integer");
    }
  }
  const auto c = v.is_number_integer() ? v.get<long long>()
                                       : static_cast<long long>(v.get<double>());
  if (c < 1 || c > 10) {
    throw Error(ErrorKind::kOutOfRange,
                "confidence " + std::to_string(c) + " outside 1..10");
  }
  return static_cast<int>(c);
}

Id comment_id(const json& v) {
  if (v.is_number_unsigned() || (v.is_number_integer() && v.get<long long>() >= 0)) {
    return std::to_string(v.get<long long>());
  }
  if (v.is_string() && !is_blank(v.get<std::string>())) return v.get<std::string>();
  schema("comment_id must be a non-negative integer or non-empty string");
}

MicroAnalysis micro_from_json(const json& obj) {
  static constexpr std::array<std::string_view, 6> kKeys = {
      "comment_id", "comment_text", "category", "sub_category", "severity", "confidence"};
  require_exact_keys(obj, kKeys, "comment_analysis item");

  MicroAnalysis m;
  m.comment_id = comment_id(obj.at("comment_id"));
  const auto& text = obj.at("comment_text");
  if (!text.is_string() || is_blank(text.get<std::string>())) {
    schema("comment_text must be a non-empty string");
  }
  m.comment_text = text.get<std::string>();
  m.category = label<Category>(obj, "category");
  const auto& sub = obj.at("sub_category");
  if (!sub.is_string()) schema("sub_category is not a string");
  m.sub_category = sub.get<std::string>();
  const auto allowed = sub_categories(m.category);
  if (std::find(allowed.begin(), allowed.end(), m.sub_category) == allowed.end()) {
    throw Error(ErrorKind::kUnknownCategory,
                "sub_category \"" + m.sub_category + "\" is not listed under \"" +
                    std::string(enum_name(m.category)) + "\"");
  }
  m.severity = label<Severity>(obj, "severity");
  m.confidence = confidence(obj);
  return m;
}

json id_to_json(const Id& id) {
  if (!id.empty() && id.size() < 10 && (id == "0" || id[0] != '0') &&
      std::all_of(id.begin(), id.end(), [](char c) { return c >= '0' && c <= '9'; })) {
    return std::stoll(id);
  }
  return id;
}

}  // namespace

std::span<const std::string_view> sub_categories(Category category) {
  switch (category) {
    case Category::kNovelty: return kNoveltySubs;
    case Category::kMethodology: return kMethodologySubs;
    case Category::kExperimentalRigor: return kRigorSubs;
    case Category::kPresentation: return kPresentationSubs;
    case Category::kMetaCritique: return kMetaSubs;
  }
  return {};
}

ReviewerProfile profile_from_json(const json& doc) {
  static constexpr std::array<std::string_view, 2> kTop = {"global_profile", "comment_analysis"};
  static constexpr std::array<std::string_view, 5> kMacro = {
      "overall_stance", "overall_attitude", "dominant_concern", "reviewer_expertise",
      "confidence"};
  require_exact_keys(doc, kTop, "profile");
  const auto& g = doc.at("global_profile");
  require_exact_keys(g, kMacro, "global_profile");

  ReviewerProfile profile;
  profile.macro.overall_stance = label<Stance>(g, "overall_stance");
  profile.macro.overall_attitude = label<Attitude>(g, "overall_attitude");
  profile.macro.dominant_concern = label<Concern>(g, "dominant_concern");
  profile.macro.reviewer_expertise = label<Expertise>(g, "reviewer_expertise");
  profile.macro.confidence = confidence(g);

  const auto& items = doc.at("comment_analysis");
  if (items.is_object()) {
    profile.per_comment.push_back(micro_from_json(items));
  } else if (items.is_array()) {
    for (const auto& item : items) profile.per_comment.push_back(micro_from_json(item));
  } else {
    schema("comment_analysis must be an array or an object");
  }

  std::set<Id> seen;
  for (const auto& m : profile.per_comment) {
    if (!seen.insert(m.comment_id).second) schema("duplicate comment_id " + m.comment_id);
  }
  return profile;
}

ReviewerProfile validate_profile(std::string_view raw_profile_json) {
  const auto doc = recover_json_object(raw_profile_json);
  if (!doc) schema("no JSON object could be parsed");
  return profile_from_json(*doc);
}

json macro_to_json(const MacroProfile& macro) {
  return json{{"overall_stance", enum_name(macro.overall_stance)},
              {"overall_attitude", enum_name(macro.overall_attitude)},
              {"dominant_concern", enum_name(macro.dominant_concern)},
              {"reviewer_expertise", enum_name(macro.reviewer_expertise)},
              {"confidence", macro.confidence}};
}

json micro_to_json(const MicroAnalysis& m) {
  return json{{"comment_id", id_to_json(m.comment_id)},
              {"comment_text", m.comment_text},
              {"category", enum_name(m.category)},
              {"sub_category", m.sub_category},
              {"severity", enum_name(m.severity)},
              {"confidence", m.confidence}};
}

json profile_to_json(const ReviewerProfile& profile) {
  json items = json::array();
  for (const auto& m : profile.per_comment) items.push_back(micro_to_json(m));
  return json{{"global_profile", macro_to_json(profile.macro)}, {"comment_analysis", items}};
}

json comment_profile_json(const ReviewerProfile& profile, std::string_view comment_id) {
  const auto* m = profile.find(comment_id);
  if (!m) {
    throw Error(ErrorKind::kPrecondition,
                "profile has no analysis for comment " + std::string(comment_id));
  }
  return json{{"global_profile", macro_to_json(profile.macro)},
              {"comment_analysis", micro_to_json(*m)}};
}

}  // namespace rebuttal
