#include <gtest/gtest.h>

#include <random>

#include "rebuttal/errors.hpp"
#include "rebuttal/judges.hpp"
#include "rebuttal/target_sequence.hpp"

using namespace rebuttal;

namespace {

ErrorKind kind_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "no rebuttal::Error thrown";
  return ErrorKind::kUsage;
}

std::string random_block(std::mt19937_64& gen) {
  static const std::string alphabet =
      "abcdefghijklmnopqrstuvwxyz ABCDEFG0123456789.,;:{}[]\"'\n\t-<>/=&";
  std::uniform_int_distribution<int> len(1, 80);
  std::uniform_int_distribution<std::size_t> pick(0, alphabet.size() - 1);
  while (true) {
    std::string s;
    const int n = len(gen);
    for (int i = 0; i < n; ++i) s += alphabet[pick(gen)];
    // blocks must carry text and must not contain a tag of their own
    bool blank = s.find_first_not_of(" \n\t") == std::string::npos;
    bool tagged = false;
    for (const char* t : {"analysis", "strategy", "response"}) {
      if (s.find(std::string("<") + t) != std::string::npos ||
          s.find(std::string("</") + t) != std::string::npos) {
        tagged = true;
      }
    }
    if (!blank && !tagged) return s;
  }
}

}  // namespace

TEST(TargetSequence, AssemblesCanonicalTags) {
  auto seq = assemble_target_sequence("{\"global_profile\":{}}", "1. concede; 2. cite Table 1",
                                      "We thank the reviewer.");
  EXPECT_EQ(seq.rendered,
            "<analysis>{\"global_profile\":{}}</analysis>"
            "<strategy>1. concede; 2. cite Table 1</strategy>"
            "<response>We thank the reviewer.</response>");
}

TEST(TargetSequence, EmptyBlockRejected) {
  EXPECT_EQ(kind_of([] { assemble_target_sequence("", "s", "r"); }), ErrorKind::kEmptyBlock);
  EXPECT_EQ(kind_of([] { assemble_target_sequence("a", "  \n", "r"); }), ErrorKind::kEmptyBlock);
}

TEST(TargetSequence, BlockContainingTagRejected) {
  EXPECT_EQ(kind_of([] { assemble_target_sequence("a", "<response>x</response>", "r"); }),
            ErrorKind::kMalformedSequence);
}

TEST(TargetSequence, ParsesOutputFormatExample) {
  const std::string example =
      "I need to analysis the review's overall instance and the target comment:\n"
      "<analysis>{\n  \"global_profile\": {\n    \"overall_stance\": \"...\",\n"
      "    \"overall_attitude\": \"...\",\n    \"dominant_concern\": \"...\",\n"
      "    \"reviewer_expertise\": \"...\"\n  },\n  \"comment_analysis\": \n    {\n"
      "      \"comment_text\": \"...\",\n      \"category\": \"...\",\n"
      "      \"sub_category\": \"...\",\n      \"severity\": \"...\"\n}}\n"
      "</analysis>.Based on current overall analysis, to address the target comment, I need "
      "to adopt the following strategies:\n<strategy> 1. ; 2. ; 3. ; XXX</strategy>.\n"
      "<response>XXX</response>.\n";
  auto blocks = parse_target_sequence(example);
  EXPECT_NE(blocks.analysis.find("\"global_profile\""), std::string::npos);
  EXPECT_EQ(blocks.strategy, " 1. ; 2. ; 3. ; XXX");
  EXPECT_EQ(blocks.response, "XXX");
  EXPECT_EQ(score_format(example), 1);
}

TEST(TargetSequence, MissingCloseTagIsMalformed) {
  EXPECT_EQ(kind_of([] {
              parse_target_sequence("<analysis>a</analysis><strategy>s<response>r</response>");
            }),
            ErrorKind::kMalformedSequence);
}

TEST(TargetSequence, MixedCaseTagsParse) {
  auto b = parse_target_sequence("<Analysis>a</Analysis><STRATEGY>s</Strategy><response>r</RESPONSE>");
  EXPECT_EQ(b, (SequenceBlocks{"a", "s", "r"}));
}

TEST(TargetSequence, RoundTripProperty) {
  std::mt19937_64 gen(20240611);
  for (int i = 0; i < 1000; ++i) {
    const auto a = random_block(gen), s = random_block(gen), r = random_block(gen);
    const auto seq = assemble_target_sequence(a, s, r);
    const auto back = parse_target_sequence(seq.rendered);
    ASSERT_EQ(back, (SequenceBlocks{a, s, r}));
    // parse then assemble gives the same rendering back
    ASSERT_EQ(assemble_target_sequence(back.analysis, back.strategy, back.response).rendered,
              seq.rendered);
  }
}

TEST(TargetSequence, ScoreFormatTagPresenceCombinations) {
  const char* parts[3] = {"<analysis>a</analysis>", "<strategy>s</strategy>",
                          "<response>r</response>"};
  for (int mask = 0; mask < 8; ++mask) {
    std::string text;
    for (int i = 0; i < 3; ++i) {
      if (mask & (1 << i)) text += parts[i];
    }
    EXPECT_EQ(score_format(text), mask == 7 ? 1 : 0) << "mask " << mask;
  }
}

TEST(TargetSequence, ScoreFormatDuplicatesAndReordering) {
  EXPECT_EQ(score_format("<analysis>a</analysis><analysis>b</analysis><strategy>s</strategy>"
                         "<response>r</response>"),
            0);
  EXPECT_EQ(score_format("<strategy>s</strategy><analysis>a</analysis><response>r</response>"), 0);
  EXPECT_EQ(score_format("<analysis>a<strategy>s</analysis></strategy><response>r</response>"), 0);
  EXPECT_EQ(score_format("<analysis>a</analysis><strategy> </strategy><response>r</response>"), 0);
  EXPECT_EQ(score_format("prose <analysis>a</analysis> <strategy>s</strategy> <response>r</response> ."),
            1);
}

TEST(TargetSequence, StrategyStepsSplit) {
  EXPECT_EQ(parse_strategy_steps("1. concede; 2. cite Table 1; 3. commit to revision"),
            (std::vector<std::string>{"concede", "cite Table 1", "commit to revision"}));
  EXPECT_EQ(parse_strategy_steps("1) first\n2) second"),
            (std::vector<std::string>{"first", "second"}));
  EXPECT_EQ(parse_strategy_steps("just one thing"), (std::vector<std::string>{"just one thing"}));
}

TEST(TargetSequence, ExtractSingleTag) {
  EXPECT_EQ(extract_tag_block("x <response>hi</response> y", "response"), "hi");
  EXPECT_EQ(kind_of([] { extract_tag_block("<response>a</response><response>b</response>", "response"); }),
            ErrorKind::kMalformedSequence);
}
