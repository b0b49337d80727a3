#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "rebuttal/types.hpp"

namespace rebuttal {

struct SequenceBlocks {
  std::string analysis;
  std::string strategy;
  std::string response;

  bool operator==(const SequenceBlocks&) const = default;
};

/// Wraps the three blocks in lowercase <analysis>, <strategy>, <response>
/// tags. Throws kEmptyBlock for a blank block and kMalformedSequence when a
/// block itself contains one of the three tags (it could not round-trip).
TargetSequence assemble_target_sequence(std::string_view analysis,
                                        std::string_view strategy,
                                        std::string_view response);

/// Inverse of assemble_target_sequence. Tag names match case-insensitively;
/// text outside the tags is ignored. Each pair must occur exactly once, in
/// analysis, strategy, response order, without interleaving, and wrap
/// non-blank text. Anything else is kMalformedSequence.
SequenceBlocks parse_target_sequence(std::string_view rendered);

/// Inner text of the single <tag>...</tag> pair in `text`. Same matching
/// rules as parse_target_sequence, applied to one tag name.
std::string extract_tag_block(std::string_view text, std::string_view tag);

/// Steps of a strategy block, split on leading ordinal markers ("1.", "2)")
/// at the start of a line or after a semicolon. A block without markers is
/// one step. Blank steps are dropped.
std::vector<std::string> parse_strategy_steps(std::string_view block);

}  // namespace rebuttal
