#include "rebuttal/synth.hpp"

#include <algorithm>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>
#include <tuple>

#include "rebuttal/errors.hpp"
#include "rebuttal/heuristics.hpp"
#include "rebuttal/json_util.hpp"
#include "rebuttal/profile.hpp"
#include "rebuttal/prompts.hpp"
#include "rebuttal/target_sequence.hpp"
#include "rebuttal/text.hpp"

namespace rebuttal {

namespace fs = std::filesystem;

namespace {

constexpr std::string_view kReviewMarker = "=== REVIEW ===";
constexpr std::string_view kReplyMarker = "=== AUTHOR RESPONSE ===";

std::string evidence_or_placeholder(const std::string& evidence) {
  return is_blank(evidence) ? std::string(prompts::kNoEvidence) : evidence;
}

// The teacher extracts the review again; find its copy of the paired comment.
const std::pair<Comment, MicroAnalysis>* locate_comment(const ReviewAnalysis& analysis,
                                                         const Comment& wanted) {
  const auto norm = normalize_for_match(wanted.text);
  if (const auto* hit = analysis.find(wanted.id)) {
    if (normalize_for_match(hit->first.text) == norm) return hit;
  }
  for (const auto& item : analysis.items) {
    if (normalize_for_match(item.first.text) == norm) return &item;
  }
  return nullptr;
}

std::string evidence_for(const TsrRecord& record, const ManuscriptDocument& manuscript) {
  const auto chunks =
      manuscript.chunks.empty() ? chunk_by_paragraph(manuscript.body) : manuscript.chunks;
  RetrievalResult r;
  for (const auto& id : record.retrieved_chunk_ids) {
    for (const auto& c : chunks) {
      if (c.id == id) r.ranked.push_back({c.id, c.ordinal, 0.0, c.text});
    }
  }
  return r.evidence_text();
}

}  // namespace

// ---------------------------------------------------------------------------
// Pairing
// ---------------------------------------------------------------------------

ReviewThread parse_thread(std::string_view raw) {
  const auto r = raw.find(kReviewMarker);
  const auto a = raw.find(kReplyMarker);
  if (r == std::string_view::npos || a == std::string_view::npos || a < r) {
    throw Error(ErrorKind::kSchemaMismatch,
                "thread needs a review section followed by an author response section");
  }
  ReviewThread t;
  t.review = std::string(trim(raw.substr(r + kReviewMarker.size(), a - r - kReviewMarker.size())));
  t.reply = std::string(trim(raw.substr(a + kReplyMarker.size())));
  if (t.review.empty()) throw Error(ErrorKind::kSchemaMismatch, "thread review is empty");
  return t;
}

PairingResult pair_comments_with_responses(std::string_view thread, const Id& review_id,
                                           Gateway& provider, const PairingOptions& options) {
  const auto parsed = parse_thread(thread);
  const ReviewDocument review{review_id, "", parsed.review, std::nullopt};

  PairingResult result;
  result.analysis = analyze_review(review, provider);
  if (result.analysis.items.empty()) return result;

  const auto paragraphs = split_paragraphs(parsed.reply);
  if (paragraphs.empty()) {
    for (const auto& [c, m] : result.analysis.items) {
      result.log.push_back({c.id, "dropped", "author reply is empty"});
    }
    return result;
  }

  std::string block;
  for (const auto& [c, m] : result.analysis.items) {
    if (!block.empty()) block += "\n\n";
    block += "Comment " + c.id + ": " + c.text;
  }
  const auto prompt = render_template(prompts::get(prompts::kAlignReplies),
                                      {{"COMMENTS", block}, {"REPLY", parsed.reply}});

  std::map<std::string, std::string> aligned;
  std::string align_note;
  try {
    const auto reply = provider.chat("pairing", prompt);
    const auto doc = recover_json_object(reply.text);
    if (doc && doc->contains("alignments") && (*doc)["alignments"].is_array()) {
      for (const auto& a : (*doc)["alignments"]) {
        if (!a.is_object() || !a.contains("comment_id") || !a.contains("reply")) continue;
        const auto& id = a["comment_id"];
        const auto& text = a["reply"];
        if (!text.is_string()) continue;
        const auto key = id.is_string() ? id.get<std::string>() : id.dump();
        aligned[key] = text.get<std::string>();
      }
    } else {
      align_note = "alignment reply unusable";
    }
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::kProviderError && e.kind() != ErrorKind::kTimeout) throw;
    align_note = std::string("alignment call failed: ") + e.what();
  }

  std::vector<ManuscriptChunk> reply_chunks;
  for (std::size_t i = 0; i < paragraphs.size(); ++i) {
    reply_chunks.push_back({"r" + std::to_string(i), static_cast<std::uint32_t>(i), paragraphs[i],
                            std::nullopt});
  }

  for (const auto& [comment, micro] : result.analysis.items) {
    const auto it = aligned.find(comment.id);
    if (it != aligned.end() && !is_blank(it->second)) {
      result.pairs.push_back({comment, {comment.id, std::string(trim(it->second))}});
      result.log.push_back({comment.id, "prompt", align_note});
      continue;
    }
    const auto ranked =
        retrieve_top_k(comment, reply_chunks, 1, provider, options.embedding_cache).ranked;
    if (!ranked.empty() && ranked.front().similarity >= options.min_similarity) {
      result.pairs.push_back({comment, {comment.id, ranked.front().text}});
      std::ostringstream note;
      note << "cosine " << ranked.front().similarity;
      result.log.push_back({comment.id, "similarity", note.str()});
    } else {
      result.log.push_back({comment.id, "dropped", "no reply paragraph answers this comment"});
    }
  }
  return result;
}

// ---------------------------------------------------------------------------
// Synthesis
// ---------------------------------------------------------------------------

SynthesizedRecord synthesize_record(const std::pair<Comment, SynthesisPair>& pair,
                                    const ManuscriptDocument& manuscript,
                                    const ReviewDocument& review, Gateway& teacher,
                                    const SynthesisOptions& options) {
  const auto& [comment, orig] = pair;
  if (heuristics::demands_new_experiments(comment.text)) {
    throw Error(ErrorKind::kPrecondition,
                "comment " + comment.id + " demands new experiments and can not be synthesized");
  }
  if (is_blank(orig.original_response)) {
    throw Error(ErrorKind::kPrecondition, "comment " + comment.id + " has no author reply");
  }

  AnalysisCache local;
  AnalysisCache* cache = options.analysis_cache ? options.analysis_cache : &local;
  const auto analysis = cache->get_or_compute(
      review, [&] { return analyze_review(review, teacher); }, teacher.config().model_id);
  const auto* located = locate_comment(*analysis, comment);
  if (!located) {
    throw Error(ErrorKind::kPrecondition,
                "teacher " + teacher.config().model_id + " did not extract comment " + comment.id)
        .with_stage("analysis");
  }

  TsrOptions tsr;
  tsr.k = options.k;
  tsr.analysis_cache = cache;
  tsr.embedding_cache = options.embedding_cache;
  tsr.orig = SynthesisPair{located->first.id, orig.original_response};

  SynthesizedRecord out;
  out.record = run_tsr(manuscript, review, located->first.id, teacher, tsr);
  out.teacher = teacher.config().model_id;
  out.comment_ordinal = located->first.ordinal;
  out.category = located->second.category;

  const auto evidence = evidence_for(out.record, manuscript);

  if (options.refine) {
    const auto prompt = render_template(prompts::get(prompts::kRefineResponse),
                                        {{"COMMENT", located->first.text},
                                         {"STRATEGY", out.record.strategy.numbered()},
                                         {"EVIDENCE", evidence_or_placeholder(evidence)},
                                         {"RESPONSE", out.record.response.text}});
    StageTrace trace{"refine", teacher.config().model_id, "",
                     prompts::template_hash(prompts::kRefineResponse), {}, 0};
    try {
      const auto reply = teacher.chat("refine", prompt);
      trace.timestamp = reply.timestamp;
      trace.prompt_digests.push_back(reply.prompt_digest);
      trace.attempts = reply.attempts;
      // A refine reply without a usable response block keeps the draft.
      try {
        auto refined = std::string(trim(extract_tag_block(reply.text, "response")));
        if (!refined.empty()) out.record.response.text = std::move(refined);
      } catch (const Error&) {
      }
    } catch (Error& e) {
      e.with_stage("refine");
      throw;
    }
    out.record.provider_trace.push_back(std::move(trace));
  }

  out.sequence = assemble_target_sequence(
      comment_profile_json(out.record.profile, located->first.id).dump(2),
      out.record.strategy.numbered(), out.record.response.text);
  out.input_prompt = render_template(prompts::get(prompts::kTsrPolicy),
                                     {{"REVIEW", review.raw_text},
                                      {"COMMENT", located->first.text},
                                      {"EVIDENCE", evidence_or_placeholder(evidence)}});
  return out;
}

// ---------------------------------------------------------------------------
// Jobs
// ---------------------------------------------------------------------------

std::size_t SynthesisJob::extra() const {
  if (random_extra) return *random_extra;
  std::size_t sum = 0;
  for (const auto& [c, n] : quotas) sum += n;
  return sum / 6;
}

Category parse_category_key(std::string_view key) {
  if (auto exact = parse_enum<Category>(key)) return *exact;
  const auto want = normalize_for_match(key);
  std::optional<Category> found;
  for (const auto& [value, label] : EnumTable<Category>::kValues) {
    if (!want.empty() && normalize_for_match(label).rfind(want, 0) == 0) {
      if (found && *found != value) {
        throw Error(ErrorKind::kUnknownCategory, "ambiguous category key " + std::string(key));
      }
      found = value;
    }
  }
  if (!found) throw Error(ErrorKind::kUnknownCategory, "unknown category " + std::string(key));
  return *found;
}

SynthesisJob job_from_json(const json& doc) {
  if (!doc.is_object()) throw Error(ErrorKind::kSchemaMismatch, "job must be a JSON object");
  SynthesisJob job;
  try {
    if (!doc.contains("source")) throw Error(ErrorKind::kSchemaMismatch, "job needs a source");
    job.source = doc.at("source").get<std::string>();
    if (doc.contains("teachers")) {
      for (const auto& t : doc.at("teachers")) job.teachers.push_back(provider_config_from_json(t));
    }
    if (job.teachers.empty()) job.teachers.push_back(ProviderConfig{});
    if (doc.contains("quotas")) {
      const auto& q = doc.at("quotas");
      for (auto it = q.begin(); it != q.end(); ++it) {
        job.quotas[parse_category_key(it.key())] = it->get<std::size_t>();
      }
    }
    if (doc.contains("random_extra") && !doc.at("random_extra").is_null()) {
      job.random_extra = doc.at("random_extra").get<std::size_t>();
    }
    if (doc.contains("seed")) job.seed = doc.at("seed").get<std::uint64_t>();
    if (doc.contains("refine")) job.refine = doc.at("refine").get<bool>();
    if (doc.contains("k")) job.k = doc.at("k").get<std::size_t>();
  } catch (const json::exception& e) {
    throw Error(ErrorKind::kSchemaMismatch, std::string("bad job file: ") + e.what());
  }
  if (job.k == 0) throw Error(ErrorKind::kPrecondition, "job k must be positive");
  return job;
}

SynthesisJob load_job(const fs::path& path) {
  const auto text = read_file(path);
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw Error(ErrorKind::kSchemaMismatch, path.string() + ": " + e.what());
  }
  auto job = job_from_json(doc);
  if (job.source.is_relative()) job.source = path.parent_path() / job.source;
  return job;
}

std::uint64_t uniform_below(std::uint64_t bound, std::mt19937_64& gen) {
  if (bound == 0) throw Error(ErrorKind::kPrecondition, "uniform_below needs a positive bound");
  // Reject the tail of the generator range that would bias the modulo.
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                              std::numeric_limits<std::uint64_t>::max() % bound;
  std::uint64_t x;
  do {
    x = gen();
  } while (x >= limit);
  return x % bound;
}

namespace {

auto record_key(const SynthesizedRecord& r) {
  return std::tie(r.record.review_id, r.comment_ordinal, r.teacher, r.record.comment_id);
}

SftExample to_example(const SynthesizedRecord& r) {
  return {r.input_prompt, r.sequence.rendered, std::string(enum_name(r.category)), r.teacher};
}

}  // namespace

ExportReport balance_and_export(const std::vector<SynthesizedRecord>& records,
                                const SynthesisJob& job, const fs::path& out) {
  std::vector<std::size_t> order(records.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return record_key(records[a]) < record_key(records[b]);
  });

  std::mt19937_64 gen(job.seed);
  ExportReport report;
  std::vector<std::size_t> selected;
  std::vector<std::size_t> leftover;

  std::map<Category, std::vector<std::size_t>> pools;
  for (auto i : order) pools[records[i].category].push_back(i);

  for (const auto& [label_value, label] : EnumTable<Category>::kValues) {
    auto& pool = pools[label_value];
    const auto q = job.quotas.count(label_value) ? job.quotas.at(label_value) : 0;
    seeded_shuffle(pool, gen);
    const auto take = std::min(q, pool.size());
    if (take < q) {
      report.warnings.push_back(to_string(ErrorKind::kQuotaUnsatisfiable).data() +
                                std::string(": ") + std::string(label) + " wants " +
                                std::to_string(q) + ", have " + std::to_string(pool.size()));
    }
    selected.insert(selected.end(), pool.begin(), pool.begin() + static_cast<long>(take));
    leftover.insert(leftover.end(), pool.begin() + static_cast<long>(take), pool.end());
    if (take > 0) report.selected_per_category[std::string(label)] = take;
  }

  // Leftovers are re-sorted so the extra picks depend on the seed only.
  std::sort(leftover.begin(), leftover.end(), [&](std::size_t a, std::size_t b) {
    return record_key(records[a]) < record_key(records[b]);
  });
  seeded_shuffle(leftover, gen);
  report.random_extra = std::min(job.extra(), leftover.size());
  selected.insert(selected.end(), leftover.begin(),
                  leftover.begin() + static_cast<long>(report.random_extra));

  std::sort(selected.begin(), selected.end(), [&](std::size_t a, std::size_t b) {
    return record_key(records[a]) < record_key(records[b]);
  });
  std::vector<SftExample> examples;
  for (auto i : selected) examples.push_back(to_example(records[i]));
  report.total = examples.size();
  write_sft_corpus(examples, out);
  return report;
}

std::string to_jsonl_line(const SftExample& e) {
  const json j{{"input_prompt", e.input_prompt},
               {"target_sequence", e.target_sequence},
               {"category", e.category},
               {"teacher", e.teacher}};
  return j.dump(-1, ' ', false, json::error_handler_t::strict);
}

std::vector<SftExample> read_sft_corpus(const fs::path& path) {
  std::istringstream in(read_file(path));
  std::vector<SftExample> out;
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    ++n;
    if (is_blank(line)) continue;
    try {
      const auto j = json::parse(line);
      out.push_back({j.at("input_prompt").get<std::string>(),
                     j.at("target_sequence").get<std::string>(), j.at("category").get<std::string>(),
                     j.at("teacher").get<std::string>()});
    } catch (const json::exception& e) {
      throw Error(ErrorKind::kSchemaMismatch,
                  path.string() + ":" + std::to_string(n) + ": " + e.what());
    }
  }
  return out;
}

void write_sft_corpus(const std::vector<SftExample>& examples, const fs::path& path) {
  std::string data;
  for (const auto& e : examples) {
    data += to_jsonl_line(e);
    data += '\n';
  }
  write_file_atomic(path, data);
}

SynthesisRunReport run_synthesis_job(const SynthesisJob& job, const fs::path& out,
                                     const GatewayFactory& make_gateway,
                                     EmbeddingCache* embedding_cache) {
  if (job.teachers.empty()) throw Error(ErrorKind::kPrecondition, "job has no teachers");
  if (!fs::is_directory(job.source)) {
    throw Error(ErrorKind::kPrecondition, "job source is not a directory: " + job.source.string());
  }
  std::vector<std::shared_ptr<Gateway>> teachers;
  for (const auto& t : job.teachers) teachers.push_back(make_gateway(t));

  std::vector<fs::path> threads;
  for (const auto& entry : fs::directory_iterator(job.source)) {
    const auto name = entry.path().filename().string();
    if (entry.is_regular_file() && name.size() > 11 &&
        name.compare(name.size() - 11, 11, ".thread.txt") == 0) {
      threads.push_back(entry.path());
    }
  }
  std::sort(threads.begin(), threads.end());

  SynthesisRunReport report;
  AnalysisCache analyses;
  std::vector<SynthesizedRecord> records;
  for (const auto& path : threads) {
    ++report.threads;
    const auto name = path.filename().string();
    const auto stem = name.substr(0, name.size() - 11);
    const auto raw = read_file(path);
    const auto manuscript_path = path.parent_path() / (stem + ".manuscript.txt");
    const auto manuscript = make_manuscript(
        stem, stem, fs::exists(manuscript_path) ? read_file(manuscript_path) : std::string());

    PairingResult paired;
    ReviewDocument review;
    try {
      const auto thread = parse_thread(raw);
      review = {stem, stem, thread.review, std::nullopt};
      PairingOptions popts;
      popts.embedding_cache = embedding_cache;
      paired = pair_comments_with_responses(raw, stem, *teachers.front(), popts);
      // The pairing extraction is the first teacher's analysis of this review.
      analyses.put(review, paired.analysis, teachers.front()->config().model_id);
    } catch (const Error& e) {
      report.failures.push_back(stem + ": " + e.what());
      continue;
    }
    report.comments += paired.analysis.items.size();
    report.paired += paired.pairs.size();

    std::vector<std::pair<Comment, MicroAnalysis>> candidates;
    for (const auto& [c, p] : paired.pairs) {
      if (const auto* item = paired.analysis.find(c.id)) candidates.push_back(*item);
    }
    const auto filtered = filter_actionable(candidates, teachers.front().get());
    report.filtered_out += candidates.size() - filtered.kept.size();

    for (const auto& [c, m] : filtered.kept) {
      const auto pit = std::find_if(paired.pairs.begin(), paired.pairs.end(),
                                    [&](const auto& p) { return p.first.id == c.id; });
      for (const auto& teacher : teachers) {
        SynthesisOptions sopts{job.k, job.refine, &analyses, embedding_cache};
        try {
          records.push_back(synthesize_record(*pit, manuscript, review, *teacher, sopts));
          ++report.synthesized;
        } catch (const Error& e) {
          report.failures.push_back(stem + "/" + c.id + " [" + teacher->config().model_id +
                                    "]: " + e.what());
        }
      }
    }
  }
  report.exported = balance_and_export(records, job, out);
  return report;
}

}  // namespace rebuttal
