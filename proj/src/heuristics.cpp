#include "rebuttal/heuristics.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <map>
#include <numeric>
#include <regex>
#include <set>

#include "rebuttal/errors.hpp"
#include "rebuttal/json_util.hpp"
#include "rebuttal/profile.hpp"
#include "rebuttal/text.hpp"

namespace rebuttal::heuristics {
namespace {

const std::set<std::string>& stopwords() {
  static const std::set<std::string> kWords = {
      "the",  "and",  "for",   "that",  "this",  "with",  "are",   "was",  "were", "have",
      "has",  "had",  "not",   "but",   "from",  "they",  "their", "them", "its",  "into",
      "than", "then", "there", "these", "those", "which", "while", "what", "when", "where",
      "would", "could", "should", "also", "been", "being", "will", "can", "our",  "you",
      "your", "his",  "her",   "more",  "most",  "such",  "some",  "any",  "all",  "very",
      "how",  "why",  "does",  "did",   "just",  "only",  "about", "over", "paper", "authors",
      "reviewer", "we", "is", "it", "of", "to", "in", "on", "a", "an", "be", "as", "by", "or"};
  return kWords;
}

std::set<std::string> content_words(std::string_view text) {
  std::set<std::string> out;
  for (const auto& w : words(normalize_for_match(text))) {
    if (w.size() >= 3 && !stopwords().count(w)) out.insert(w);
  }
  return out;
}

// Crude suffix stripping so "symbols"/"symbol" and "defined"/"define" meet.
std::set<std::string> stemmed(const std::set<std::string>& ws) {
  std::set<std::string> out;
  for (auto w : ws) {
    for (std::string_view suffix : {"ing", "ed", "es", "s", "e"}) {
      if (w.size() > suffix.size() + 2 && w.ends_with(suffix)) {
        w.resize(w.size() - suffix.size());
        break;
      }
    }
    out.insert(w);
  }
  return out;
}

double jaccard(const std::set<std::string>& a, const std::set<std::string>& b) {
  if (a.empty() && b.empty()) return 1.0;
  std::size_t inter = 0;
  for (const auto& w : a) inter += b.count(w);
  return static_cast<double>(inter) / static_cast<double>(a.size() + b.size() - inter);
}

double coverage(const std::set<std::string>& needed, const std::set<std::string>& have,
                std::size_t cap = 0) {
  if (needed.empty()) return 0.0;
  std::size_t hits = 0;
  for (const auto& w : needed) hits += have.count(w);
  const auto denom = cap ? std::min(needed.size(), cap) : needed.size();
  return std::min(1.0, static_cast<double>(hits) / static_cast<double>(denom));
}

template <std::size_t N>
int count_any(std::string_view lower, const std::array<std::string_view, N>& cues) {
  int n = 0;
  for (const auto& c : cues) n += lower.find(c) != std::string_view::npos;
  return n;
}

template <std::size_t N>
bool contains_any(std::string_view lower, const std::array<std::string_view, N>& cues) {
  return count_any(lower, cues) > 0;
}

std::vector<std::string> sentences(std::string_view text) {
  std::vector<std::string> out;
  std::string cur;
  for (std::size_t i = 0; i < text.size(); ++i) {
    cur += text[i];
    const char c = text[i];
    const bool boundary = (c == '.' || c == '?' || c == '!') &&
                          (i + 1 == text.size() || std::isspace(static_cast<unsigned char>(text[i + 1])));
    if (boundary) {
      auto t = trim(cur);
      if (!t.empty()) out.emplace_back(t);
      cur.clear();
    }
  }
  if (auto t = trim(cur); !t.empty()) out.emplace_back(t);
  return out;
}

std::vector<std::string_view> lines_of(std::string_view text) {
  std::vector<std::string_view> out;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    auto nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    out.push_back(text.substr(pos, nl - pos));
    pos = nl + 1;
  }
  return out;
}

bool is_list_item(std::string_view line) {
  static const std::regex kMarker(R"(^\s*(\d+[.)]|[-*])\s+\S)");
  return std::regex_search(line.begin(), line.end(), kMarker) ||
         line.rfind("\xE2\x80\xA2", 0) == 0;
}

std::string strip_list_marker(std::string_view line) {
  static const std::regex kMarker(R"(^\s*(\d+[.)]|[-*])\s+)");
  auto s = std::regex_replace(std::string(line), kMarker, "", std::regex_constants::format_first_only);
  if (s.rfind("\xE2\x80\xA2", 0) == 0) s = std::string(trim(std::string_view(s).substr(3)));
  return s;
}

bool is_header(std::string_view line) {
  const auto t = trim(line);
  if (t.empty()) return false;
  if (t.front() == '#') return true;
  if (t.size() > 4 && t.rfind("**", 0) == 0 && t.substr(t.size() - 2) == "**") return true;
  return t.back() == ':' && word_count(t) <= 8;
}

constexpr std::array<std::string_view, 6> kPositiveHeaders = {
    "strength", "pros", "positive", "summary of the paper", "paper summary", "summary of contributions"};
constexpr std::array<std::string_view, 9> kMetaHeaders = {
    "confidence", "soundness", "excitement", "overall assessment", "rating",
    "recommendation", "reviewer expertise", "reproducibility", "ethical review"};

bool is_meta_line(std::string_view line) {
  static const std::regex kMeta(
      R"(^\s*(confidence|soundness|excitement|overall assessment|rating|recommendation|overall score|score)\s*[:=])",
      std::regex::icase);
  return word_count(line) <= 12 && std::regex_search(line.begin(), line.end(), kMeta);
}

constexpr std::array<std::string_view, 48> kCriticalCues = {
    " not ",     "n't",        "lack",       "unclear",      "missing",    "should",
    "would",     "could",      "concern",    "hard to",      "difficult",  "poor",
    "incremental", "weak",     "limited",    "fail",         "why",        "?",
    "however",   "insufficient", "questionable", "unconvinc", "confus",    "typo",
    "error",     "wrong",      "incorrect",  "overclaim",    "modest",     "marginal",
    "please",    "suggest",    "consider",   "need",         "must",       "problem",
    "issue",     "doubt",      "ambiguous",  "vague",        "absent",     "neglect",
    "ignore",    "without",    "no ",        "only ",        "unfair",     "crucial"};

bool is_critical_sentence(std::string_view sentence) {
  const auto lower = " " + to_lower(sentence) + " ";
  return contains_any(lower, kCriticalCues);
}

double round1(double v) { return std::round(v * 10.0) / 10.0; }

int clamp_int(double v, int lo, int hi) {
  return std::clamp(static_cast<int>(std::lround(v)), lo, hi);
}

std::string first_words(std::string_view text, std::size_t n) {
  const auto ws = words(text);
  std::string out;
  for (std::size_t i = 0; i < ws.size() && i < n; ++i) {
    if (i) out += ' ';
    out += ws[i];
  }
  if (ws.size() > n) out += "...";
  return out;
}

std::string lower_first(std::string s) {
  if (!s.empty() && std::isupper(static_cast<unsigned char>(s[0])) &&
      !(s.size() > 1 && std::isupper(static_cast<unsigned char>(s[1])))) {
    s[0] = static_cast<char>(std::tolower(static_cast<unsigned char>(s[0])));
  }
  return s;
}

std::string strip_trailing_punct(std::string s) {
  while (!s.empty() && (s.back() == '.' || s.back() == ';' || s.back() == ' ')) s.pop_back();
  return s;
}

}  // namespace

// ---------------------------------------------------------------------------
// Classification
// ---------------------------------------------------------------------------

bool demands_new_experiments(std::string_view comment) {
  static const std::regex kDemand(
      R"((compare (your |the |their )?(method|approach|model|results?|performance)?\s*(with|against|to)\b)|)"
      R"((comparison (with|against|to)\b)|(compare\b.*\b(baseline|backbone|sota|state[- ]of[- ]the[- ]art))|)"
      R"((\b(additional|more|new|further|extra) experiments?\b)|(\brun (an? |the )?(experiment|ablation)s?\b)|)"
      R"((\bablation stud(y|ies)\b)|(\badd (an? )?ablation\b)|)"
      R"((\b(evaluate|test|validate|benchmark)(d)? (it |this |the method |your method |the approach )?(on|against)\b)|)"
      R"((\b(report|include|provide|show) (the )?results (on|for|with)\b)|)"
      R"((\bexperiments? on (other|more|additional|larger|real)\b)|(\bshown to work on\b))",
      std::regex::icase);
  const std::string s(comment);
  return std::regex_search(s, kDemand);
}

CommentLabel classify_comment(std::string_view comment) {
  const auto lower = " " + to_lower(comment) + " ";
  constexpr std::array<std::string_view, 17> kExp = {
      "baseline", "compar", "experiment", "ablation", "dataset", "benchmark", "evaluat",
      "metric", "result", "empirical", "backbone", "sota", "state-of-the-art", "statistical",
      "seeds", "variance", "gains"};
  constexpr std::array<std::string_view, 21> kPres = {
      "figure", "fig.", "table", "typo", "grammar", "writing", "written", "label", "axes",
      "notation", "organiz", "related work", "citation", " cite", "caption", "font", "color",
      "colour", "readab", "interpret", "hard to follow"};
  constexpr std::array<std::string_view, 11> kNov = {
      "novel", "incremental", "contribution", "significan", "motivat", "impact",
      "originality", "recent works", "prior work", "over existing", "broaden"};
  constexpr std::array<std::string_view, 14> kMeth = {
      "method", "assum", "proof", "theorem", "derivation", "technical", "justif", "formula",
      "equation", "algorithm", "loss", "architecture", "hyperparameter", "design choice"};

  const std::array<std::pair<Category, int>, 4> scores = {{
      {Category::kPresentation, count_any(lower, kPres)},
      {Category::kExperimentalRigor, count_any(lower, kExp)},
      {Category::kNovelty, count_any(lower, kNov)},
      {Category::kMethodology, count_any(lower, kMeth)},
  }};
  auto best = scores[3];
  for (const auto& s : scores) {
    if (s.second > best.second) best = s;
  }
  // Wish-list demands outside the paper's scope read as reviewer behaviour,
  // whatever topic words they carry.
  constexpr std::array<std::string_view, 9> kWishList = {
      "would be much stronger if", "would be stronger if", "not just", "other modalities",
      "out of scope", "unrealistic", "unreasonable", "any paper", "also be shown"};
  if (count_any(lower, kWishList) >= 2) best = {Category::kMetaCritique, 2};

  CommentLabel label;
  label.category = best.first;
  auto has = [&](std::string_view cue) { return lower.find(cue) != std::string::npos; };
  switch (label.category) {
    case Category::kPresentation:
      label.sub_category = (has("figure") || has("fig.") || has("table") || has("axes") || has("caption"))
                               ? "Figure/Table Quality"
                           : (has("related work") || has("citation") || has(" cite"))
                               ? "Related Work Incomplete"
                           : (has("organiz") || has("structure"))
                               ? "Poor Organization"
                               : "Writing Issues/Typos";
      break;
    case Category::kExperimentalRigor:
      label.sub_category = (has("baseline") || has("compar") || has("backbone"))
                               ? "Baselines Missing/Weak"
                           : (has("ablation") || has("analysis"))
                               ? "Ablation/Analysis Missing"
                           : (has("metric") || has("evaluat") || has("unfair"))
                               ? "Flawed Evaluation"
                               : "Insufficient Experiments";
      break;
    case Category::kNovelty:
      label.sub_category = has("incremental")  ? "Incremental Contribution"
                           : has("motivat")    ? "Motivation Weak"
                                               : "Contribution Unclear";
      break;
    case Category::kMethodology:
      label.sub_category = (has("assum") || has("justif"))                         ? "Unjustified Assumption"
                           : (has("error") || has("incorrect") || has("wrong") || has("proof"))
                               ? "Technical Error"
                               : "Lack of Detail";
      break;
    case Category::kMetaCritique:
      label.sub_category = "Unrealistic/Unconstructive Comment";
      break;
  }

  constexpr std::array<std::string_view, 12> kMajor = {
      "main concern", "major", "crucial", "critical", "fundamental", "serious",
      "not convinced", "fatal", "invalid", "incorrect", "wrong", "novelty"};
  const bool major_cue = contains_any(lower, kMajor);
  const bool minor_by_default = label.category == Category::kPresentation ||
                                label.category == Category::kMethodology ||
                                label.category == Category::kMetaCritique;
  label.severity = (major_cue || !minor_by_default) ? Severity::kMajor : Severity::kMinor;
  label.confidence = best.second >= 2 ? 8 : 6;
  return label;
}

std::vector<std::string> extract_critical_items(std::string_view review) {
  std::vector<std::string> items;
  bool skip = false;
  std::optional<std::string> item;
  auto flush_item = [&] {
    if (item && !skip && !is_blank(*item)) items.emplace_back(trim(*item));
    item.reset();
  };
  auto take_prose = [&](std::string_view line) {
    std::string joined;
    for (const auto& s : sentences(line)) {
      if (!is_critical_sentence(s)) continue;
      if (!joined.empty()) joined += ' ';
      joined += s;
    }
    if (!joined.empty()) items.push_back(std::move(joined));
  };

  for (auto raw : lines_of(review)) {
    auto line = trim(raw);
    // Quoted reviews ("...") keep their quotes on the first/last line.
    if (!line.empty() && line.front() == '"') line.remove_prefix(1);
    if (!line.empty() && line.back() == '"') line.remove_suffix(1);
    line = trim(line);
    if (line.empty()) {
      flush_item();
      continue;
    }
    if (is_header(line)) {
      flush_item();
      const auto lower = to_lower(line);
      skip = contains_any(lower, kPositiveHeaders) || contains_any(lower, kMetaHeaders);
      continue;
    }
    if (is_meta_line(line)) {
      flush_item();
      continue;
    }
    if (is_list_item(line)) {
      flush_item();
      item = strip_list_marker(line);
      continue;
    }
    if (item) {
      *item += ' ';
      *item += line;
      continue;
    }
    if (!skip) take_prose(line);
  }
  flush_item();
  return items;
}

MacroProfile infer_macro(std::string_view review, std::span<const CommentLabel> labels) {
  MacroProfile macro;
  const auto lower = to_lower(review);

  std::map<Category, std::pair<int, int>> counts;  // (count, majors)
  int majors = 0;
  for (const auto& l : labels) {
    auto& c = counts[l.category];
    ++c.first;
    if (l.severity == Severity::kMajor) {
      ++c.second;
      ++majors;
    }
  }
  macro.dominant_concern = Concern::kMethodology;
  std::pair<int, int> best{0, 0};
  for (const auto& [cat, c] : counts) {
    if (cat == Category::kMetaCritique) continue;
    if (c.second > best.second || (c.second == best.second && c.first > best.first)) {
      best = c;
      macro.dominant_concern = static_cast<Concern>(static_cast<int>(cat));
    }
  }

  constexpr std::array<std::string_view, 6> kDismissive = {
      "trivial", "no contribution", "not publishable", "waste", "fundamentally flawed",
      "nothing new"};
  constexpr std::array<std::string_view, 9> kSkeptical = {
      "not convinced", "unclear why", "doubt", "questionable", "hard to", "?", "crucially",
      "main concern", "not clear"};
  constexpr std::array<std::string_view, 6> kConstructive = {
      "suggest", "consider", "would strengthen", "could", "please", "would be"};
  const bool dismissive = contains_any(lower, kDismissive);

  static const std::regex kRating(R"((rating|overall score|score)\s*[:=]\s*(\d+)\s*(/\s*10)?)",
                                  std::regex::icase);
  std::smatch m;
  const std::string review_s(review);
  if (std::regex_search(review_s, m, kRating) && std::stoi(m[2].str()) <= 10) {
    const int r = std::stoi(m[2].str());
    macro.overall_stance = r >= 8   ? Stance::kAccept
                           : r >= 6 ? Stance::kProbablyAccept
                           : r == 5 ? Stance::kBorderline
                           : r >= 3 ? Stance::kProbablyReject
                                    : Stance::kReject;
  } else if (dismissive) {
    macro.overall_stance = Stance::kReject;
  } else {
    macro.overall_stance = labels.empty() ? Stance::kAccept
                           : majors == 0  ? Stance::kProbablyAccept
                           : majors == 1  ? Stance::kBorderline
                                          : Stance::kProbablyReject;
  }

  if (dismissive) {
    macro.overall_attitude = Attitude::kDismissive;
  } else if (labels.empty()) {
    macro.overall_attitude = Attitude::kEnthusiastic;
  } else if (count_any(lower, kSkeptical) >= 2) {
    macro.overall_attitude = Attitude::kSkeptical;
  } else if (contains_any(lower, kConstructive)) {
    macro.overall_attitude = Attitude::kConstructive;
  } else {
    macro.overall_attitude = Attitude::kNeutral;
  }

  static const std::regex kTechnical(R"(\b([A-Z][A-Za-z]*[A-Z][A-Za-z0-9-]*|[A-Za-z]+-\d+)\b)");
  const auto technical = std::distance(
      std::sregex_iterator(review_s.begin(), review_s.end(), kTechnical), std::sregex_iterator());
  macro.reviewer_expertise = word_count(review) < 40 ? Expertise::kUnfamiliar
                             : technical >= 2        ? Expertise::kDomainExpert
                                                     : Expertise::kGeneralist;
  macro.confidence = 7;
  return macro;
}

std::string extract_profile_json(std::string_view review) {
  const auto items = extract_critical_items(review);
  std::vector<CommentLabel> labels;
  ReviewerProfile profile;
  for (std::size_t i = 0; i < items.size(); ++i) {
    labels.push_back(classify_comment(items[i]));
    const auto& l = labels.back();
    profile.per_comment.push_back(
        {std::to_string(i + 1), items[i], l.category, l.sub_category, l.severity, l.confidence});
  }
  profile.macro = infer_macro(review, labels);
  return profile_to_json(profile).dump(2);
}

std::optional<std::size_t> best_reply_paragraph(std::string_view comment,
                                                std::span<const std::string> paragraphs,
                                                std::string_view comment_id) {
  const std::regex explicit_ref("^(comment|response to comment|re:?|q|r|w)?\\s*#?\\s*" +
                                    std::string(comment_id) + "\\b",
                                std::regex::icase);
  for (std::size_t i = 0; i < paragraphs.size(); ++i) {
    const auto head = std::string(trim(paragraphs[i]).substr(0, 40));
    if (std::regex_search(head, explicit_ref)) return i;
  }
  const auto cw = stemmed(content_words(comment));
  std::optional<std::size_t> best;
  double best_score = 0.08;
  for (std::size_t i = 0; i < paragraphs.size(); ++i) {
    const double s = jaccard(cw, stemmed(content_words(paragraphs[i])));
    if (s > best_score) {
      best_score = s;
      best = i;
    }
  }
  return best;
}

// ---------------------------------------------------------------------------
// Rubric scorers
// ---------------------------------------------------------------------------

namespace {

std::vector<std::string> trigrams(std::string_view text) {
  const auto ws = words(normalize_for_match(text));
  std::vector<std::string> out;
  for (std::size_t i = 0; i + 2 < ws.size(); ++i) out.push_back(ws[i] + ' ' + ws[i + 1] + ' ' + ws[i + 2]);
  return out;
}

double trigram_containment(std::string_view response, std::string_view negative) {
  const auto r = trigrams(response);
  if (r.empty()) return 0.0;
  const auto n = trigrams(negative);
  const std::set<std::string> ns(n.begin(), n.end());
  std::size_t hits = 0;
  for (const auto& t : r) hits += ns.count(t);
  return static_cast<double>(hits) / static_cast<double>(r.size());
}

int list_like_items(std::string_view response) {
  int numbered = 0;
  std::map<std::string, int> openers;
  for (auto line : lines_of(response)) {
    line = trim(line);
    if (line.empty()) continue;
    if (is_list_item(line)) ++numbered;
    const auto ws = words(normalize_for_match(line));
    if (ws.size() >= 2) ++openers[ws[0] + ' ' + ws[1]];
  }
  int repeated = 0;
  for (const auto& [_, n] : openers) repeated = std::max(repeated, n);
  return std::max(numbered, repeated >= 3 ? repeated : 0);
}

int cliche_count(std::string_view response) {
  constexpr std::array<std::string_view, 7> kCliches = {
      "we have taken the following actions",
      "in direct response to this comment",
      "we believe these changes fully address",
      "we thank the reviewer again for this helpful suggestion",
      "we have made the following revisions",
      "to address this point",
      "we thank the reviewer for this important"};
  return count_any(normalize_for_match(response), kCliches);
}

std::vector<std::string> flatten_labels(const json& j) {
  static const std::set<std::string> kKeys = {"overall_stance", "overall_attitude",
                                              "dominant_concern", "reviewer_expertise",
                                              "category", "sub_category", "severity"};
  std::vector<std::string> out;
  if (j.is_object()) {
    for (auto it = j.begin(); it != j.end(); ++it) {
      if (kKeys.count(it.key()) && it->is_string()) {
        out.push_back(it.key() + "=" + it->get<std::string>());
      } else {
        auto sub = flatten_labels(*it);
        out.insert(out.end(), sub.begin(), sub.end());
      }
    }
  } else if (j.is_array()) {
    for (const auto& v : j) {
      auto sub = flatten_labels(v);
      out.insert(out.end(), sub.begin(), sub.end());
    }
  }
  return out;
}

int numbered_steps(std::string_view text) {
  static const std::regex kStep(R"((^|[\s;])\d+[.)])");
  const std::string s(text);
  return static_cast<int>(std::distance(std::sregex_iterator(s.begin(), s.end(), kStep),
                                        std::sregex_iterator()));
}

bool is_polite(std::string_view lower) {
  constexpr std::array<std::string_view, 6> kPolite = {
      "thank", "appreciate", "we agree", "we acknowledge", "valid", "grateful"};
  return contains_any(lower, kPolite);
}

int commitments(std::string_view lower) {
  constexpr std::array<std::string_view, 12> kCommit = {
      "we will",  "we have added", "we have revised", "we now",   "revised manuscript",
      "we clarify", "we have clarified", "we added", "we include", "we have expanded",
      "we have conducted", "we have corrected"};
  return count_any(lower, kCommit);
}

}  // namespace

int diversity_score(std::string_view response, std::span<const std::string> negatives) {
  if (word_count(response) < 3) return 1;
  double containment = 0.0;
  for (const auto& n : negatives) containment = std::max(containment, trigram_containment(response, n));
  if (containment >= 0.6) return containment >= 0.85 ? 1 : 2;

  const int items = list_like_items(response);
  const int cliches = cliche_count(response);
  if (items >= 3 && cliches >= 2) return cliches >= 3 ? 3 : 4;
  if (items >= 3) return cliches >= 1 ? 5 : 6;
  if (items == 2) return 6;
  if (cliches >= 2) return 6;
  if (cliches == 1) return 7;

  int score = 8;
  const auto ss = sentences(response);
  if (ss.size() >= 3) {
    std::vector<double> lens;
    for (const auto& s : ss) lens.push_back(static_cast<double>(word_count(s)));
    const double mean = std::accumulate(lens.begin(), lens.end(), 0.0) / lens.size();
    double var = 0.0;
    for (double l : lens) var += (l - mean) * (l - mean);
    if (std::sqrt(var / lens.size()) >= 5.0) ++score;
  }
  const auto ws = words(normalize_for_match(response));
  const std::set<std::string> uniq(ws.begin(), ws.end());
  if (ws.size() >= 100 && static_cast<double>(uniq.size()) / ws.size() >= 0.5) ++score;
  return std::min(score, 10);
}

double analysis_agreement(std::string_view candidate, std::string_view gold) {
  if (is_blank(candidate)) return 1.0;
  const auto g = recover_json_object(gold);
  const auto c = recover_json_object(candidate);
  double f = 0.0;
  if (g && c) {
    const auto gl = flatten_labels(*g);
    const auto cl = flatten_labels(*c);
    if (!gl.empty()) {
      std::multiset<std::string> pool(cl.begin(), cl.end());
      std::size_t matched = 0;
      for (const auto& x : gl) {
        if (auto it = pool.find(x); it != pool.end()) {
          ++matched;
          pool.erase(it);
        }
      }
      f = static_cast<double>(matched) / gl.size();
      return round1(1.0 + 9.0 * f);
    }
  }
  f = jaccard(content_words(candidate), content_words(gold));
  return round1(1.0 + 9.0 * f);
}

double strategy_agreement(std::string_view candidate, std::string_view gold) {
  if (is_blank(candidate)) return 1.0;
  const double overlap = jaccard(content_words(candidate), content_words(gold));
  const int cs = std::max(1, numbered_steps(candidate));
  const int gs = std::max(1, numbered_steps(gold));
  const double steps = static_cast<double>(std::min(cs, gs)) / std::max(cs, gs);
  return round1(1.0 + 9.0 * (0.8 * overlap + 0.2 * steps));
}

double analysis_quality(std::string_view candidate, std::string_view comment) {
  if (is_blank(candidate)) return 1.0;
  try {
    const auto profile = validate_profile(candidate);
    double score = 7.0;
    if (!profile.per_comment.empty()) {
      const auto& micro = profile.per_comment.front();
      if (micro.category == classify_comment(comment).category) score += 2.0;
      if (normalized_contains(comment, micro.comment_text) ||
          normalized_contains(micro.comment_text, comment)) {
        score += 1.0;
      }
    }
    return std::min(score, 10.0);
  } catch (const Error&) {
    return recover_json_object(candidate) ? 4.0 : 3.0;
  }
}

double strategy_quality(std::string_view candidate) {
  if (is_blank(candidate)) return 1.0;
  const int steps = std::max(1, numbered_steps(candidate));
  return std::min(10.0, 3.0 + 2.0 * std::min(steps, 3) + (word_count(candidate) >= 15 ? 1.0 : 0.0));
}

int response_quality(std::string_view comment, std::string_view evidence,
                     std::string_view response) {
  const auto w = word_count(response);
  if (w == 0) return 1;
  if (w < 12) return 2;
  const auto lower = to_lower(response);
  const auto rw = content_words(response);
  const double co = coverage(content_words(comment), rw);
  const double eo = is_blank(evidence) ? 0.5 : coverage(content_words(evidence), rw, 25);
  double s = 2.0 + 3.0 * std::min(1.0, co * 1.5) + 3.0 * std::min(1.0, eo * 1.5) +
             (commitments(lower) > 0 ? 1.0 : 0.0) + (is_polite(lower) ? 1.0 : 0.0);
  if (w < 40) s -= 2.0;
  return clamp_int(s, 1, 10);
}

RubricScores scorecard(std::string_view comment, std::string_view evidence,
                       std::string_view response) {
  RubricScores out;
  const auto w = word_count(response);
  if (w == 0) {
    out.explanation = "The response is empty and therefore wholly ineffective on every dimension.";
    return out;
  }
  const auto lower = to_lower(response);
  const bool polite = is_polite(lower);
  if (w < 15) {
    out.attitude = polite ? 2 : 1;
    out.clarity = 1;
    out.persuasiveness = 1;
    out.constructiveness = 1;
    out.explanation = "The reply \"" + std::string(trim(response)) +
                      "\" is perfunctory: it neither engages with the comment nor offers "
                      "evidence or concrete revisions.";
    return out;
  }
  constexpr std::array<std::string_view, 5> kHostile = {
      "obviously", "the reviewer misunderstood", "clearly wrong", "irrelevant", "nonsense"};
  const auto rw = content_words(response);
  const double co = coverage(content_words(comment), rw);
  const double eo = is_blank(evidence) ? 0.3 : coverage(content_words(evidence), rw, 25);
  const auto ss = sentences(response);
  const double avg_len = static_cast<double>(w) / std::max<std::size_t>(1, ss.size());

  out.attitude = clamp_int(5 + (polite ? 2 : 0) + (contains_any(lower, kHostile) ? -3 : 0) +
                               (lower.find("acknowledge") != std::string::npos ? 1 : 0) +
                               (w >= 60 ? 1 : 0),
                           0, 10);
  out.clarity = clamp_int((avg_len >= 10 && avg_len <= 35 ? 7 : 5) + (w >= 60 ? 1 : 0) +
                              (list_like_items(response) >= 3 ? -1 : 1),
                          0, 10);
  out.persuasiveness =
      clamp_int(2 + 4 * std::min(1.0, co * 1.5) + 3 * std::min(1.0, eo * 1.5) + (w >= 80 ? 1 : 0), 0, 10);
  static const std::regex kLocation(R"(\b(section|table|figure|appendix|eq\.|equation)\b)",
                                    std::regex::icase);
  const std::string resp_s(response);
  out.constructiveness = clamp_int(3 + 2 * std::min(commitments(lower), 3) +
                                       (std::regex_search(resp_s, kLocation) ? 1 : 0),
                                   0, 10);
  out.explanation = "Attitude " + std::to_string(out.attitude) + ": " +
                    (polite ? "the reply opens respectfully (\"" + first_words(response, 8) + "\")."
                            : "the tone is matter-of-fact without acknowledging the reviewer.") +
                    " Clarity " + std::to_string(out.clarity) + ": " + std::to_string(ss.size()) +
                    " sentences averaging " + std::to_string(static_cast<int>(avg_len)) +
                    " words. Persuasiveness " + std::to_string(out.persuasiveness) +
                    ": the reply covers " + std::to_string(static_cast<int>(co * 100)) +
                    "% of the comment's key terms. Constructiveness " +
                    std::to_string(out.constructiveness) + ": " +
                    std::to_string(commitments(lower)) + " concrete revision commitment(s).";
  return out;
}

// ---------------------------------------------------------------------------
// Generation
// ---------------------------------------------------------------------------

namespace {

// The evidence sentence sharing the most content words with the comment;
// headings and other fragments under five words are skipped.
std::string best_evidence_sentence(std::string_view evidence, std::string_view comment) {
  std::set<std::string> cwords;
  for (const auto& w : words(normalize_for_match(comment))) {
    if (w.size() >= 4) cwords.insert(w);
  }
  std::string best;
  int best_score = -1;
  for (const auto& sent : sentences(evidence)) {
    if (word_count(sent) < 5) continue;
    int score = 0;
    for (const auto& w : words(normalize_for_match(sent))) score += cwords.count(w) ? 1 : 0;
    if (score > best_score) {
      best_score = score;
      best = sent;
    }
  }
  return best;
}

}  // namespace

std::vector<std::string> plan_strategy(const MicroAnalysis& micro, const MacroProfile& macro,
                                       std::string_view evidence) {
  std::vector<std::string> steps;
  std::string ack = "Acknowledge the concern about " + to_lower(micro.sub_category);
  if (macro.overall_attitude == Attitude::kSkeptical ||
      macro.overall_attitude == Attitude::kDismissive) {
    ack += " without defensiveness";
  }
  steps.push_back(ack);

  if (!is_blank(evidence)) {
    const auto sent = best_evidence_sentence(evidence, micro.comment_text);
    steps.push_back("Cite the manuscript passage stating \"" +
                    strip_trailing_punct(first_words(sent.empty() ? evidence : sent, 12)) + "\"");
  } else {
    steps.push_back("Clarify the point directly, since no supporting passage was retrieved");
  }

  switch (micro.category) {
    case Category::kNovelty:
      steps.push_back("Articulate the distinct contribution relative to prior work");
      break;
    case Category::kMethodology:
      steps.push_back("Justify the methodological choice and state its assumptions explicitly");
      break;
    case Category::kExperimentalRigor:
      steps.push_back("Explain what the existing results already establish and where their limits are");
      break;
    case Category::kPresentation:
      steps.push_back("Describe the exact presentation fix");
      break;
    case Category::kMetaCritique:
      steps.push_back("Respectfully explain the scope boundary of the work");
      break;
  }
  steps.push_back(micro.severity == Severity::kMajor
                      ? "Commit to a concrete revision and explain how it strengthens the paper"
                      : "Commit to the revision in the final version");
  return steps;
}

std::string write_response(std::string_view comment, std::span<const std::string> steps,
                           std::string_view evidence, std::string_view original_response,
                           ResponseStyle style) {
  const auto comment_quote = strip_trailing_punct(first_words(comment, 12));
  const auto ev_sentence = best_evidence_sentence(evidence, comment);
  const std::string ev_quote =
      ev_sentence.empty() ? std::string() : strip_trailing_punct(first_words(ev_sentence, 30));

  if (style == ResponseStyle::kTemplatedList) {
    std::string out =
        "We thank the reviewer for this important comment. In the revised manuscript, we have "
        "taken the following actions in direct response to this comment:\n";
    for (std::size_t i = 0; i < steps.size(); ++i) {
      out += "\n" + std::to_string(i + 1) + ". We have addressed this: " + lower_first(steps[i]) + ".";
    }
    out += "\n\nWe believe these changes fully address the reviewer's concern.";
    return out;
  }

  if (style == ResponseStyle::kMixed) {
    std::string out = "Thank you for pointing out \"" + comment_quote + "\". We respond as follows.\n";
    for (std::size_t i = 0; i < steps.size(); ++i) {
      out += "\n- " + steps[i] + ".";
    }
    if (!ev_quote.empty()) out += "\n\nThe relevant passage reads: \"" + ev_quote + "\".";
    return out;
  }

  std::string out = "Thank you for the careful reading and for raising the point that \"" +
                    comment_quote + "\". We agree this deserves a precise answer.";
  if (!ev_quote.empty()) {
    out += " The manuscript already speaks to part of it, stating that \"" + ev_quote +
           "\", and we now make this connection explicit where the comment arises.";
  } else {
    out += " Because no single passage of the current draft covers it, we clarify the reasoning "
           "directly here and will add it to the text.";
  }
  if (!is_blank(original_response)) {
    const auto orig = sentences(original_response);
    if (!orig.empty()) {
      out += " As our earlier reply put it, " + lower_first(strip_trailing_punct(orig.front())) + ".";
    }
  }
  if (steps.size() > 2) {
    out += " Concretely, we will " + lower_first(strip_trailing_punct(steps[2]));
    if (steps.size() > 3) out += ", and we will " + lower_first(strip_trailing_punct(steps[3]));
    out += ".";
  }
  out += " We are grateful for the suggestion, which makes the paper clearer.";
  return out;
}

}  // namespace rebuttal::heuristics
