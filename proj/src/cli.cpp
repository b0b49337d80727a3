#include "rebuttal/cli.hpp"

#include <CLI11.hpp>

#include <iomanip>
#include <iostream>
#include <sstream>

#include "rebuttal/agreement.hpp"
#include "rebuttal/app_config.hpp"
#include "rebuttal/candidates.hpp"
#include "rebuttal/errors.hpp"
#include "rebuttal/extraction.hpp"
#include "rebuttal/http_backend.hpp"
#include "rebuttal/judges.hpp"
#include "rebuttal/prompts.hpp"
#include "rebuttal/record_io.hpp"
#include "rebuttal/retrieval.hpp"
#include "rebuttal/run_store.hpp"
#include "rebuttal/service.hpp"
#include "rebuttal/synth.hpp"
#include "rebuttal/target_sequence.hpp"
#include "rebuttal/text.hpp"
#include "rebuttal/tsr.hpp"

namespace rebuttal {

namespace fs = std::filesystem;

namespace {

struct Globals {
  std::string config_file;
  std::string provider;
  bool mock = false;
  std::optional<std::uint64_t> seed;
  std::string out;
  bool json_out = false;
  std::vector<std::string> sets;
  std::string cache_dir;
  bool store = false;
};

struct Inputs {
  std::string manuscript;
  std::string review;
  std::string comment;
  std::size_t k = 0;
};

ResolvedConfig load_settings(const Globals& g) {
  std::map<std::string, std::string> cli;
  for (const auto& s : g.sets) {
    const auto eq = s.find('=');
    if (eq == std::string::npos) throw Error(ErrorKind::kUsage, "--set expects key=value, got " + s);
    cli[std::string(trim(s.substr(0, eq)))] = std::string(trim(s.substr(eq + 1)));
  }
  if (!g.provider.empty()) cli["provider.endpoint"] = g.provider;
  if (g.seed) cli["seed"] = std::to_string(*g.seed);
  if (!g.cache_dir.empty()) cli["cache_dir"] = g.cache_dir;
  auto r = resolve_config(g.config_file.empty() ? std::nullopt
                                                : std::optional<fs::path>(g.config_file),
                          cli);
  if (g.mock) {
    r.config.provider.endpoint = "mock://";
    if (r.config.judge) r.config.judge->endpoint = "mock://";
  }
  return r;
}

std::string stem_of(const std::string& path) { return fs::path(path).stem().string(); }

ReviewDocument load_review(const Inputs& in, const Id& manuscript_id) {
  if (in.review.empty()) throw Error(ErrorKind::kUsage, "--review is required");
  ReviewDocument r{stem_of(in.review), manuscript_id, read_file(in.review), std::nullopt};
  if (is_blank(r.raw_text)) throw Error(ErrorKind::kPrecondition, "review file is empty");
  return r;
}

ManuscriptDocument load_manuscript(const Inputs& in) {
  if (in.manuscript.empty()) return make_manuscript("none", "", "");
  const auto id = stem_of(in.manuscript);
  return make_manuscript(id, id, read_file(in.manuscript));
}

std::optional<Strategy> load_strategy(const std::string& path) {
  if (path.empty()) return std::nullopt;
  Strategy s{parse_strategy_steps(read_file(path))};
  if (s.steps.empty()) throw Error(ErrorKind::kPrecondition, "strategy file has no steps");
  return s;
}

RewardWeights parse_weights_flag(const std::string& text, const RewardWeights& fallback) {
  if (text.empty()) return fallback;
  std::vector<double> w;
  std::stringstream ss(text);
  std::string part;
  while (std::getline(ss, part, ',')) {
    try {
      std::size_t used = 0;
      w.push_back(std::stod(part, &used));
      if (!is_blank(part.substr(used))) throw std::invalid_argument(part);
    } catch (const std::exception&) {
      throw Error(ErrorKind::kUsage, "--weights expects four numbers, got " + text);
    }
  }
  if (w.size() != 4) throw Error(ErrorKind::kUsage, "--weights expects four numbers, got " + text);
  RewardWeights out{w[0], w[1], w[2], w[3]};
  out.validate();
  return out;
}

// --out naming a .json/.jsonl file is used as is; anything else is a
// directory that receives `name`.
fs::path output_path(const std::string& out, const std::string& name) {
  const fs::path p(out);
  const auto ext = p.extension().string();
  if (ext == ".json" || ext == ".jsonl") return p;
  return p / name;
}

void emit_json(std::ostream& out, const json& j) { out << j.dump(2) << "\n"; }

std::string one_line(std::string_view s, std::size_t width) {
  std::string flat;
  for (char c : s) flat += (c == '\n' || c == '\r') ? ' ' : c;
  if (flat.size() > width) flat = flat.substr(0, width - 3) + "...";
  return flat;
}

// Persists a finished CLI run under data_dir/runs when --store is given.
void maybe_store(const Globals& g, const AppConfig& c, RunKind kind, const json& inputs,
                 const std::map<std::string, std::string>& artifacts, std::ostream& err) {
  if (!g.store) return;
  RunStore store(c.data_dir / "runs");
  const auto run = store.store_run(kind, inputs, artifacts);
  err << "stored run " << run.run_id << "\n";
}

json inputs_json(const Inputs& in) {
  return json{{"manuscript", in.manuscript}, {"review", in.review}, {"comment", in.comment},
              {"k", in.k}};
}

std::shared_ptr<Gateway> policy_gateway(const AppConfig& c) {
  GatewayOptions o;
  if (c.cache_dir) o.cache_dir = *c.cache_dir / "responses";
  return make_gateway(c.provider, o);
}

std::shared_ptr<Gateway> judge_gateway(const AppConfig& c, const std::shared_ptr<Gateway>& policy) {
  if (!c.judge) return policy;
  GatewayOptions o;
  if (c.cache_dir) o.cache_dir = *c.cache_dir / "responses";
  return make_gateway(*c.judge, o);
}

std::unique_ptr<EmbeddingCache> embedding_cache(const AppConfig& c) {
  return std::make_unique<EmbeddingCache>(
      c.cache_dir ? std::optional<fs::path>(*c.cache_dir / "embeddings") : std::nullopt);
}

const std::pair<Comment, MicroAnalysis>& require_comment(const ReviewAnalysis& a,
                                                         const std::string& id) {
  if (id.empty()) throw Error(ErrorKind::kUsage, "--comment is required");
  const auto* item = a.find(id);
  if (!item) {
    throw Error(ErrorKind::kPrecondition, "comment " + id + " is not among the " +
                                              std::to_string(a.items.size()) +
                                              " extracted comments")
        .with_stage("analysis");
  }
  return *item;
}

// ---------------------------------------------------------------------------

int cmd_extract(const Globals& g, const AppConfig& c, const Inputs& in, bool filter,
                std::ostream& out, std::ostream& err) {
  const auto review = load_review(in, "");
  auto gw = policy_gateway(c);
  const auto analysis = analyze_review(review, *gw);
  auto doc = to_json(analysis);
  if (filter) {
    const auto f = filter_actionable(analysis.items, gw.get());
    json kept = json::array();
    for (const auto& [cm, m] : f.kept) kept.push_back(cm.id);
    json log = json::array();
    for (const auto& d : f.log) {
      log.push_back({{"comment_id", d.comment_id},
                     {"requires_new_experiments", d.requires_new_experiments},
                     {"source", d.source},
                     {"note", d.note}});
    }
    doc["actionable"] = kept;
    doc["filter_log"] = log;
  }
  if (!g.out.empty()) write_file_atomic(output_path(g.out, "analysis.json"), doc.dump(2) + "\n");
  maybe_store(g, c, RunKind::kExtract, inputs_json(in), {{"analysis.json", doc.dump(2)}}, err);
  if (g.json_out) {
    emit_json(out, doc);
    return 0;
  }
  const auto& m = analysis.macro;
  out << "stance: " << enum_name(m.overall_stance) << "  attitude: " << enum_name(m.overall_attitude)
      << "  concern: " << enum_name(m.dominant_concern)
      << "  expertise: " << enum_name(m.reviewer_expertise) << "\n";
  out << analysis.items.size() << " comment(s)\n";
  for (const auto& [cm, mi] : analysis.items) {
    out << "  [" << cm.id << "] " << enum_name(mi.category) << " / " << mi.sub_category << " ("
        << enum_name(mi.severity) << ")  " << one_line(cm.text, 70) << "\n";
  }
  return 0;
}

int cmd_retrieve(const Globals& g, const AppConfig& c, const Inputs& in, const std::string& query,
                 std::ostream& out, std::ostream&) {
  const auto manuscript = load_manuscript(in);
  if (in.manuscript.empty()) throw Error(ErrorKind::kUsage, "--manuscript is required");
  auto gw = policy_gateway(c);
  auto cache = embedding_cache(c);
  Comment comment;
  if (!query.empty()) {
    comment = {"query", "", 0, query, false};
  } else {
    const auto review = load_review(in, manuscript.id);
    comment = require_comment(analyze_review(review, *gw), in.comment).first;
  }
  const auto r = retrieve_top_k(comment, manuscript.chunks, in.k ? in.k : c.k, *gw, cache.get());
  const auto doc = to_json(r);
  if (!g.out.empty()) write_file_atomic(output_path(g.out, "retrieval.json"), doc.dump(2) + "\n");
  if (g.json_out) {
    emit_json(out, doc);
    return 0;
  }
  for (const auto& rc : r.ranked) {
    out << rc.chunk_id << "  " << std::fixed << std::setprecision(4) << rc.similarity << "  "
        << one_line(rc.text, 80) << "\n";
  }
  return 0;
}

int cmd_tsr(const Globals& g, const AppConfig& c, const Inputs& in, bool all,
            const std::string& strategy_file, const std::string& orig_file, std::ostream& out,
            std::ostream& err) {
  const auto manuscript = load_manuscript(in);
  const auto review = load_review(in, manuscript.id);
  auto gw = policy_gateway(c);
  auto cache = embedding_cache(c);
  AnalysisCache analyses;
  TsrOptions opts;
  opts.k = in.k ? in.k : c.k;
  opts.analysis_cache = &analyses;
  opts.embedding_cache = cache.get();
  opts.strategy_override = load_strategy(strategy_file);
  if (!orig_file.empty()) opts.orig = SynthesisPair{in.comment, read_file(orig_file)};

  std::vector<TsrRecord> records;
  if (all) {
    const auto analysis = analyses.get_or_compute(
        review, [&] { return analyze_review(review, *gw); }, gw->config().model_id);
    std::vector<Id> ids;
    for (const auto& [cm, m] : analysis->items) ids.push_back(cm.id);
    records = run_tsr_batch(manuscript, review, ids, *gw, opts);
  } else {
    if (in.comment.empty()) throw Error(ErrorKind::kUsage, "--comment or --all is required");
    records.push_back(run_tsr(manuscript, review, in.comment, *gw, opts));
  }

  std::map<std::string, std::string> artifacts;
  for (const auto& r : records) {
    const auto name = records.size() == 1 ? std::string("record.json") : "record-" + r.comment_id + ".json";
    artifacts[name] = dump_record(r);
  }
  if (!g.out.empty()) {
    if (records.size() == 1) {
      write_file_atomic(output_path(g.out, "record.json"), artifacts.begin()->second);
    } else {
      for (const auto& [name, bytes] : artifacts) write_file_atomic(fs::path(g.out) / name, bytes);
    }
  }
  maybe_store(g, c, RunKind::kTsr, inputs_json(in), artifacts, err);
  if (g.json_out) {
    if (records.size() == 1) {
      out << dump_record(records.front());
    } else {
      json arr = json::array();
      for (const auto& r : records) arr.push_back(to_json(r));
      emit_json(out, arr);
    }
    return 0;
  }
  for (const auto& r : records) {
    out << "comment " << r.comment_id << "\n";
    out << "  evidence: ";
    for (const auto& id : r.retrieved_chunk_ids) out << id << " ";
    out << "\n  strategy:\n";
    for (std::size_t i = 0; i < r.strategy.steps.size(); ++i) {
      out << "    " << i + 1 << ". " << r.strategy.steps[i] << "\n";
    }
    out << "  response:\n    " << r.response.text << "\n";
  }
  return 0;
}

int cmd_candidates(const Globals& g, const AppConfig& c, const Inputs& in, std::size_t group,
                   const std::string& weights, double temperature,
                   const std::string& strategy_file, const std::string& gold_analysis,
                   const std::string& gold_strategy, std::ostream& out, std::ostream& err) {
  const auto manuscript = load_manuscript(in);
  const auto review = load_review(in, manuscript.id);
  auto policy = policy_gateway(c);
  auto judge = judge_gateway(c, policy);
  auto cache = embedding_cache(c);
  const auto analysis = analyze_review(review, *policy);
  const auto& [comment, micro] = require_comment(analysis, in.comment);
  const auto k = in.k ? in.k : c.k;
  const auto ctx = manuscript.chunks.empty()
                       ? RetrievalResult{comment.id, {}, k}
                       : retrieve_top_k(comment, manuscript.chunks, k, *policy, cache.get());

  CandidateOptions opts;
  opts.group_size = group ? group : c.group_size;
  opts.weights = parse_weights_flag(weights, c.weights);
  opts.temperature = temperature;
  opts.base_seed = c.seed;
  opts.strategy_override = load_strategy(strategy_file);
  if (opts.strategy_override) opts.profile = analysis.profile();
  if (!gold_analysis.empty() || !gold_strategy.empty()) {
    if (gold_analysis.empty() || gold_strategy.empty()) {
      throw Error(ErrorKind::kUsage, "--gold-analysis and --gold-strategy go together");
    }
    opts.gold = GoldReference{read_file(gold_analysis), read_file(gold_strategy)};
  }
  const auto report = run_candidates(review, comment, ctx, *policy, *judge, opts);
  const auto doc = to_json(report);
  const auto jsonl = reward_report_jsonl(report);
  if (!g.out.empty()) {
    const fs::path p(g.out);
    if (p.extension() == ".jsonl") {
      write_file_atomic(p, jsonl);
    } else {
      write_file_atomic(output_path(g.out, "candidates.json"), doc.dump(2) + "\n");
      if (p.extension() != ".json") write_file_atomic(p / "rewards.jsonl", jsonl);
    }
  }
  maybe_store(g, c, RunKind::kCandidates, inputs_json(in),
              {{"candidates.json", doc.dump(2)}, {"rewards.jsonl", jsonl}}, err);
  if (g.json_out) {
    emit_json(out, doc);
    return 0;
  }
  out << "  #  format  think   resp    div     total   advantage\n";
  for (const auto& cand : report.candidates) {
    const auto& r = cand.reward;
    out << std::setw(3) << cand.index << "  " << std::setw(6) << r.format << std::fixed
        << std::setprecision(3) << "  " << r.think << "   " << r.resp << "   " << r.div << "   "
        << r.total << "   " << std::showpos << report.advantages[cand.index] << std::noshowpos
        << (cand.index == report.best ? "  <- best" : "") << "\n";
  }
  out << "best: " << report.best << "\n";
  return 0;
}

int cmd_judge(const Globals& g, const AppConfig& c, const Inputs& in,
              const std::string& comment_text, const std::string& response_file,
              const std::string& evidence_file, const std::string& output_file,
              std::ostream& out, std::ostream& err) {
  const auto manuscript = load_manuscript(in);
  const auto review = load_review(in, manuscript.id);
  auto policy = policy_gateway(c);
  auto judge = judge_gateway(c, policy);
  Comment comment;
  if (!comment_text.empty()) {
    comment = {"inline", review.id, 0, comment_text, false};
  } else {
    comment = require_comment(analyze_review(review, *policy), in.comment).first;
  }
  std::string response;
  json doc{{"comment_id", comment.id}};
  if (!output_file.empty()) {
    const auto tagged = read_file(output_file);
    doc["format"] = score_format(tagged);
    if (doc["format"] == 1) response = parse_target_sequence(tagged).response;
  }
  if (!response_file.empty()) response = read_file(response_file);
  if (is_blank(response)) throw Error(ErrorKind::kUsage, "--response (or a well-formed --output) is required");

  std::string evidence;
  if (!evidence_file.empty()) {
    evidence = read_file(evidence_file);
  } else if (!manuscript.chunks.empty()) {
    auto cache = embedding_cache(c);
    evidence = retrieve_top_k(comment, manuscript.chunks, in.k ? in.k : c.k, *policy, cache.get())
                   .evidence_text();
  }
  doc["response_score"] = judge_response_quality(review.raw_text, comment.text, evidence, response, *judge);
  const auto negatives = prompts::default_negatives();
  doc["diversity_score"] = judge_diversity(response, negatives, *judge);
  doc["scorecard"] = to_json(judge_scorecard(evidence, review, comment, response, *judge));
  if (!g.out.empty()) write_file_atomic(output_path(g.out, "judge.json"), doc.dump(2) + "\n");
  maybe_store(g, c, RunKind::kJudge, inputs_json(in), {{"judge.json", doc.dump(2)}}, err);
  if (g.json_out) {
    emit_json(out, doc);
    return 0;
  }
  const auto& sc = doc["scorecard"];
  out << "response score: " << doc["response_score"] << "\n"
      << "diversity score: " << doc["diversity_score"] << "\n"
      << "scorecard: attitude " << sc["attitude"] << ", clarity " << sc["clarity"]
      << ", persuasiveness " << sc["persuasiveness"] << ", constructiveness "
      << sc["constructiveness"] << "\n";
  if (doc.contains("format")) out << "format: " << doc["format"] << "\n";
  return 0;
}

int cmd_eval(const Globals& g, const AppConfig& c, const std::string& input, std::ostream& out,
             std::ostream& err) {
  json doc;
  try {
    doc = json::parse(read_file(input));
  } catch (const json::exception& e) {
    throw Error(ErrorKind::kSchemaMismatch, input + ": " + e.what());
  }
  const auto report = build_agreement_report(dimension_scores_from_json(doc));
  const auto j = to_json(report);
  if (!g.out.empty()) write_file_atomic(output_path(g.out, "agreement.json"), j.dump(2) + "\n");
  maybe_store(g, c, RunKind::kEval, json{{"input", input}}, {{"agreement.json", j.dump(2)}}, err);
  if (g.json_out) {
    emit_json(out, j);
  } else {
    out << render_table(report);
  }
  return 0;
}

int cmd_synth(const Globals& g, const AppConfig& c, const std::string& job_file,
              std::ostream& out, std::ostream& err) {
  auto job = load_job(job_file);
  if (g.seed) job.seed = *g.seed;
  if (g.mock) {
    for (auto& t : job.teachers) t.endpoint = "mock://";
  }
  const auto target = g.out.empty() ? fs::path("synth.jsonl") : output_path(g.out, "synth.jsonl");
  auto cache = embedding_cache(c);
  GatewayOptions gopts;
  if (c.cache_dir) gopts.cache_dir = *c.cache_dir / "responses";
  const auto report = run_synthesis_job(
      job, target, [&](const ProviderConfig& p) { return make_gateway(p, gopts); }, cache.get());
  json doc{{"output", target.string()},
           {"threads", report.threads},
           {"comments", report.comments},
           {"paired", report.paired},
           {"filtered_out", report.filtered_out},
           {"synthesized", report.synthesized},
           {"failures", report.failures},
           {"selected_per_category", report.exported.selected_per_category},
           {"random_extra", report.exported.random_extra},
           {"total", report.exported.total},
           {"warnings", report.exported.warnings}};
  maybe_store(g, c, RunKind::kSynth, json{{"job", job_file}},
              {{"report.json", doc.dump(2)}, {"corpus.jsonl", read_file(target)}}, err);
  for (const auto& w : report.exported.warnings) err << "warning: " << w << "\n";
  if (g.json_out) {
    emit_json(out, doc);
    return 0;
  }
  out << "threads " << report.threads << ", comments " << report.comments << ", paired "
      << report.paired << ", filtered " << report.filtered_out << ", synthesized "
      << report.synthesized << "\n";
  for (const auto& [cat, n] : report.exported.selected_per_category) {
    out << "  " << cat << ": " << n << "\n";
  }
  out << "  random extra: " << report.exported.random_extra << "\n";
  out << "wrote " << report.exported.total << " examples to " << target.string() << "\n";
  return 0;
}

int cmd_serve(const AppConfig& c, const std::string& host, int port, std::ostream& out) {
  Service service(c);
  const auto h = host.empty() ? c.host : host;
  const auto p = port >= 0 ? port : c.port;
  out << "serving on " << h << ":" << p << " (provider " << c.provider.endpoint << ")\n"
      << std::flush;
  service.run(h, p);
  return 0;
}

void write_error(std::ostream& err, ErrorKind kind, const std::string& message,
                 const std::string& stage) {
  err << json{{"error",
               {{"kind", to_string(kind)},
                {"message", message},
                {"stage", stage.empty() ? json(nullptr) : json(stage)}}}}
             .dump()
      << "\n";
}

}  // namespace

int cli_dispatch(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Rebuttal drafting pipeline: extraction, retrieval, strategy and response "
               "generation, reward scoring and judging.",
               "rebuttal"};
  app.require_subcommand(1);
  app.fallthrough();

  Globals g;
  app.add_option("--config", g.config_file, "key = value settings file")->check(CLI::ExistingFile);
  app.add_option("--provider", g.provider, "provider base URL, or mock://");
  app.add_flag("--mock", g.mock, "use the offline mock provider");
  app.add_option("--seed", g.seed, "sampling seed");
  app.add_option("--out", g.out, "output file or directory");
  app.add_flag("--json", g.json_out, "machine-readable JSON on stdout");
  app.add_option("--set", g.sets, "override any config key (key=value)");
  app.add_option("--cache-dir", g.cache_dir, "response and embedding cache directory");
  app.add_flag("--store", g.store, "also record the run under data_dir/runs");

  Inputs in;
  auto add_docs = [&](CLI::App* sub, bool manuscript, bool comment) {
    sub->add_option("--review", in.review, "review text file")->check(CLI::ExistingFile);
    if (manuscript) {
      sub->add_option("--manuscript", in.manuscript, "manuscript text file")
          ->check(CLI::ExistingFile);
      sub->add_option("-k", in.k, "evidence chunks to retrieve");
    }
    if (comment) sub->add_option("--comment", in.comment, "comment id from extraction");
  };

  auto* extract = app.add_subcommand("extract", "profile a review and extract its comments");
  add_docs(extract, false, false);
  bool filter = false;
  extract->add_flag("--filter", filter, "mark comments that need new experiments");

  auto* retrieve = app.add_subcommand("retrieve", "rank manuscript chunks for a comment");
  add_docs(retrieve, true, true);
  std::string query;
  retrieve->add_option("--query", query, "free-text query instead of a comment");

  auto* tsr = app.add_subcommand("tsr", "analysis, retrieval, strategy and response for a comment");
  add_docs(tsr, true, true);
  bool all = false;
  std::string strategy_file;
  std::string orig_file;
  tsr->add_flag("--all", all, "every extracted comment");
  tsr->add_option("--strategy", strategy_file, "numbered strategy steps to use instead of generating")
      ->check(CLI::ExistingFile);
  tsr->add_option("--orig", orig_file, "authentic author reply (synthesis mode)")
      ->check(CLI::ExistingFile);

  auto* cand = app.add_subcommand("candidates", "sample G outputs, score them and pick the best");
  add_docs(cand, true, true);
  std::size_t group = 0;
  std::string weights;
  double temperature = 0.7;
  std::string cand_strategy;
  std::string gold_analysis;
  std::string gold_strategy;
  cand->add_option("-G,--group-size", group, "candidates per prompt")->check(CLI::Range(1, 1000));
  cand->add_option("--weights", weights, "format,think,resp,div reward weights");
  cand->add_option("--temperature", temperature, "sampling temperature");
  cand->add_option("--strategy", cand_strategy, "fixed strategy steps; only responses are sampled")
      ->check(CLI::ExistingFile);
  cand->add_option("--gold-analysis", gold_analysis, "gold analysis for the reasoning judge")
      ->check(CLI::ExistingFile);
  cand->add_option("--gold-strategy", gold_strategy, "gold strategy for the reasoning judge")
      ->check(CLI::ExistingFile);

  auto* judge = app.add_subcommand("judge", "score a response with the judge prompts");
  add_docs(judge, true, true);
  std::string comment_text;
  std::string response_file;
  std::string evidence_file;
  std::string output_file;
  judge->add_option("--comment-text", comment_text, "comment text instead of an id");
  judge->add_option("--response", response_file, "response text file")->check(CLI::ExistingFile);
  judge->add_option("--evidence", evidence_file, "evidence text file")->check(CLI::ExistingFile);
  judge->add_option("--output", output_file, "full tagged output; adds the format score")
      ->check(CLI::ExistingFile);

  auto* eval = app.add_subcommand("eval-agreement", "agreement between human and model scores");
  std::string eval_input;
  eval->add_option("--input", eval_input, "JSON with per-dimension human and model scores")
      ->required()
      ->check(CLI::ExistingFile);

  auto* synth = app.add_subcommand("synth", "build a balanced fine-tuning corpus from a job file");
  std::string job_file;
  synth->add_option("--job", job_file, "job file")->required()->check(CLI::ExistingFile);

  auto* serve = app.add_subcommand("serve", "run the HTTP service");
  std::string host;
  int port = -1;
  serve->add_option("--host", host, "bind address");
  serve->add_option("--port", port, "port");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    write_error(err, ErrorKind::kUsage, e.what(), "");
    return 2;
  }

  try {
    const auto settings = load_settings(g);
    const auto& c = settings.config;
    if (*extract) return cmd_extract(g, c, in, filter, out, err);
    if (*retrieve) return cmd_retrieve(g, c, in, query, out, err);
    if (*tsr) return cmd_tsr(g, c, in, all, strategy_file, orig_file, out, err);
    if (*cand) {
      return cmd_candidates(g, c, in, group, weights, temperature, cand_strategy, gold_analysis,
                            gold_strategy, out, err);
    }
    if (*judge) {
      return cmd_judge(g, c, in, comment_text, response_file, evidence_file, output_file, out, err);
    }
    if (*eval) return cmd_eval(g, c, eval_input, out, err);
    if (*synth) return cmd_synth(g, c, job_file, out, err);
    if (*serve) return cmd_serve(c, host, port, out);
  } catch (const Error& e) {
    write_error(err, e.kind(), e.what(), e.stage());
    return e.kind() == ErrorKind::kUsage ? 2 : 1;
  } catch (const std::exception& e) {
    write_error(err, ErrorKind::kProviderError, e.what(), "");
    return 1;
  }
  return 2;
}

int cli_dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  std::vector<const char*> argv;
  argv.push_back("rebuttal");
  for (const auto& a : args) argv.push_back(a.c_str());
  return cli_dispatch(static_cast<int>(argv.size()), argv.data(), out, err);
}

}  // namespace rebuttal
