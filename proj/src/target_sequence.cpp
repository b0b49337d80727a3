#include "rebuttal/target_sequence.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <regex>
#include <vector>

#include "rebuttal/errors.hpp"
#include "rebuttal/text.hpp"

namespace rebuttal {
namespace {

constexpr std::array<std::string_view, 3> kTags = {"analysis", "strategy", "response"};

struct TagToken {
  std::size_t tag;  // index into the searched tag list
  bool closing;
  std::size_t begin;  // position of '<'
  std::size_t end;    // one past '>'
};

bool iequals(std::string_view a, std::string_view b) {
  return a.size() == b.size() &&
         std::equal(a.begin(), a.end(), b.begin(), [](char x, char y) {
           return std::tolower(static_cast<unsigned char>(x)) ==
                  std::tolower(static_cast<unsigned char>(y));
         });
}

std::vector<TagToken> scan(std::string_view text, std::span<const std::string_view> tags) {
  std::vector<TagToken> tokens;
  for (std::size_t pos = text.find('<'); pos != std::string_view::npos;
       pos = text.find('<', pos + 1)) {
    std::size_t name_begin = pos + 1;
    bool closing = name_begin < text.size() && text[name_begin] == '/';
    if (closing) ++name_begin;
    for (std::size_t t = 0; t < tags.size(); ++t) {
      const auto& tag = tags[t];
      if (name_begin + tag.size() < text.size() &&
          iequals(text.substr(name_begin, tag.size()), tag) &&
          text[name_begin + tag.size()] == '>') {
        tokens.push_back({t, closing, pos, name_begin + tag.size() + 1});
        break;
      }
    }
  }
  return tokens;
}

[[noreturn]] void malformed(const std::string& why) {
  throw Error(ErrorKind::kMalformedSequence, "malformed target sequence: " + why);
}

std::string inner(std::string_view text, const TagToken& open, const TagToken& close) {
  return std::string(text.substr(open.end, close.begin - open.end));
}

}  // namespace

TargetSequence assemble_target_sequence(std::string_view analysis,
                                        std::string_view strategy,
                                        std::string_view response) {
  const std::array<std::string_view, 3> blocks = {analysis, strategy, response};
  for (std::size_t i = 0; i < blocks.size(); ++i) {
    if (is_blank(blocks[i])) {
      throw Error(ErrorKind::kEmptyBlock,
                  "empty " + std::string(kTags[i]) + " block");
    }
    if (!scan(blocks[i], kTags).empty()) {
      malformed(std::string(kTags[i]) + " block contains a reserved tag");
    }
  }

  TargetSequence seq;
  seq.analysis_block = std::string(analysis);
  seq.strategy_block = std::string(strategy);
  seq.response_block = std::string(response);
  for (std::size_t i = 0; i < blocks.size(); ++i) {
    seq.rendered += "<";
    seq.rendered += kTags[i];
    seq.rendered += ">";
    seq.rendered += blocks[i];
    seq.rendered += "</";
    seq.rendered += kTags[i];
    seq.rendered += ">";
  }
  return seq;
}

SequenceBlocks parse_target_sequence(std::string_view rendered) {
  const auto tokens = scan(rendered, kTags);
  if (tokens.size() != 6) {
    malformed("expected 6 tags, found " + std::to_string(tokens.size()));
  }
  std::array<std::string, 3> out;
  for (std::size_t i = 0; i < 3; ++i) {
    const auto& open = tokens[2 * i];
    const auto& close = tokens[2 * i + 1];
    if (open.tag != i || open.closing || close.tag != i || !close.closing) {
      malformed("tags missing, duplicated or out of order near <" +
                std::string(kTags[i]) + ">");
    }
    out[i] = inner(rendered, open, close);
    if (is_blank(out[i])) malformed("empty <" + std::string(kTags[i]) + "> block");
  }
  return {std::move(out[0]), std::move(out[1]), std::move(out[2])};
}

std::string extract_tag_block(std::string_view text, std::string_view tag) {
  const std::array<std::string_view, 1> tags = {tag};
  const auto tokens = scan(text, tags);
  if (tokens.size() != 2 || tokens[0].closing || !tokens[1].closing) {
    malformed("expected exactly one <" + std::string(tag) + "> pair");
  }
  auto block = inner(text, tokens[0], tokens[1]);
  if (is_blank(block)) malformed("empty <" + std::string(tag) + "> block");
  return block;
}

std::vector<std::string> parse_strategy_steps(std::string_view block) {
  static const std::regex kMarker(R"((^|\n|;)[ \t]*\d+[.)](?=\s|$))");
  const std::string text(block);
  std::vector<std::string> steps;
  auto push = [&](std::string_view piece) {
    auto t = trim(piece);
    while (!t.empty() && t.back() == ';') t = trim(t.substr(0, t.size() - 1));
    if (!t.empty()) steps.emplace_back(t);
  };
  std::size_t last = 0;
  bool any = false;
  for (auto it = std::sregex_iterator(text.begin(), text.end(), kMarker);
       it != std::sregex_iterator(); ++it) {
    if (any) push(std::string_view(text).substr(last, it->position() - last));
    any = true;
    last = it->position() + it->length();
  }
  if (!any) {
    push(text);
  } else {
    push(std::string_view(text).substr(last));
  }
  return steps;
}

}  // namespace rebuttal
