#include <gtest/gtest.h>

#include "rebuttal/errors.hpp"
#include "rebuttal/json_util.hpp"
#include "rebuttal/profile.hpp"
#include "support.hpp"

using namespace rebuttal;

namespace {

ErrorKind validate_kind(const std::string& text) {
  try {
    validate_profile(text);
  } catch (const Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "validated: " << text;
  return ErrorKind::kUsage;
}

json good_profile() {
  return json::parse(R"({
    "global_profile": {"overall_stance": "Borderline", "overall_attitude": "Neutral",
      "dominant_concern": "Methodological Soundness", "reviewer_expertise": "Generalist",
      "confidence": 5},
    "comment_analysis": [{"comment_id": 1, "comment_text": "The loss is unclear.",
      "category": "Presentation & Clarity", "sub_category": "Writing Issues/Typos",
      "severity": "Minor", "confidence": 7}]})");
}

}  // namespace

TEST(Profile, AppendixExampleValidates) {
  auto p = validate_profile(testsupport::read_fixture("appendix_profile.json"));
  EXPECT_EQ(p.macro.overall_stance, Stance::kProbablyReject);
  EXPECT_EQ(p.macro.overall_attitude, Attitude::kSkeptical);
  EXPECT_EQ(p.macro.dominant_concern, Concern::kExperimentalRigor);
  EXPECT_EQ(p.macro.reviewer_expertise, Expertise::kDomainExpert);
  EXPECT_EQ(p.macro.confidence, 10);
  ASSERT_EQ(p.per_comment.size(), 4u);
  EXPECT_EQ(p.per_comment[0].sub_category, "Incremental Contribution");
  EXPECT_EQ(p.per_comment[3].category, Category::kMetaCritique);
  EXPECT_EQ(p.per_comment[3].confidence, 6);
}

TEST(Profile, UnknownStance) {
  auto j = good_profile();
  j["global_profile"]["overall_stance"] = "Maybe";
  EXPECT_EQ(validate_kind(j.dump()), ErrorKind::kUnknownCategory);
}

TEST(Profile, ConfidenceOutOfRange) {
  auto j = good_profile();
  j["comment_analysis"][0]["confidence"] = 11;
  EXPECT_EQ(validate_kind(j.dump()), ErrorKind::kOutOfRange);
  j["comment_analysis"][0]["confidence"] = 0;
  EXPECT_EQ(validate_kind(j.dump()), ErrorKind::kOutOfRange);
}

TEST(Profile, SubCategoryMustBelongToCategory) {
  auto j = good_profile();
  j["comment_analysis"][0]["sub_category"] = "Incremental Contribution";
  EXPECT_EQ(validate_kind(j.dump()), ErrorKind::kUnknownCategory);
}

TEST(Profile, StructuralErrors) {
  auto j = good_profile();
  j["comment_analysis"][0].erase("severity");
  EXPECT_EQ(validate_kind(j.dump()), ErrorKind::kSchemaMismatch);

  j = good_profile();
  j["comment_analysis"].push_back(j["comment_analysis"][0]);
  EXPECT_EQ(validate_kind(j.dump()), ErrorKind::kSchemaMismatch);

  j = good_profile();
  j["global_profile"]["mood"] = "grumpy";
  EXPECT_EQ(validate_kind(j.dump()), ErrorKind::kSchemaMismatch);

  EXPECT_EQ(validate_kind("no json here"), ErrorKind::kSchemaMismatch);
}

TEST(Profile, ProseAroundJsonIsSkipped) {
  auto p = validate_profile("Sure! Here it is:\n```json\n" + good_profile().dump(2) + "\n```");
  EXPECT_EQ(p.per_comment.size(), 1u);
}

TEST(Profile, JsonRoundTrip) {
  auto p = validate_profile(testsupport::read_fixture("appendix_profile.json"));
  EXPECT_EQ(profile_from_json(profile_to_json(p)), p);
}

TEST(Profile, SingleCommentBlock) {
  auto p = validate_profile(testsupport::read_fixture("appendix_profile.json"));
  auto block = comment_profile_json(p, "3");
  ASSERT_TRUE(block["comment_analysis"].is_object());
  EXPECT_EQ(block["comment_analysis"]["sub_category"], "Figure/Table Quality");
  auto back = profile_from_json(block);
  ASSERT_EQ(back.per_comment.size(), 1u);
  EXPECT_EQ(back.per_comment[0], p.per_comment[2]);
}

TEST(JsonRecovery, RepairsMissingComma) {
  auto j = recover_json_object("x {\"a\": \"b\"\n\"c\": 1} y");
  ASSERT_TRUE(j);
  EXPECT_EQ((*j)["c"], 1);
  EXPECT_FALSE(recover_json_object("{\"a\": "));
  EXPECT_EQ(first_balanced_object("pre {\"k\": \"}{\"} post").value(), "{\"k\": \"}{\"}");
}
