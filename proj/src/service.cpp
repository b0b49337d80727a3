#include "rebuttal/service.hpp"

#include <httplib.h>

#include <atomic>
#include <condition_variable>
#include <deque>
#include <functional>
#include <mutex>
#include <regex>
#include <thread>

#include "rebuttal/candidates.hpp"
#include "rebuttal/errors.hpp"
#include "rebuttal/extraction.hpp"
#include "rebuttal/http_backend.hpp"
#include "rebuttal/judges.hpp"
#include "rebuttal/prompts.hpp"
#include "rebuttal/record_io.hpp"
#include "rebuttal/retrieval.hpp"
#include "rebuttal/reward.hpp"
#include "rebuttal/run_store.hpp"
#include "rebuttal/target_sequence.hpp"
#include "rebuttal/text.hpp"
#include "rebuttal/tsr.hpp"

namespace rebuttal {

namespace fs = std::filesystem;

namespace {

int status_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kMissingRun: return 404;
    case ErrorKind::kDuplicateRun: return 409;
    case ErrorKind::kProviderError:
    case ErrorKind::kTimeout:
    case ErrorKind::kExtractionParseError:
    case ErrorKind::kJudgeParseError: return 502;
    default: return 400;
  }
}

json error_json(ErrorKind kind, const std::string& message, const std::string& stage) {
  return json{{"error",
               {{"kind", to_string(kind)},
                {"message", message},
                {"stage", stage.empty() ? json(nullptr) : json(stage)}}}};
}

HttpReply error_reply(const Error& e) {
  return {status_for(e.kind()), error_json(e.kind(), e.what(), e.stage())};
}

// Bounded FIFO of jobs drained by a fixed set of threads.
class WorkerPool {
 public:
  WorkerPool(std::size_t workers, std::size_t limit) : limit_(limit) {
    for (std::size_t i = 0; i < workers; ++i) threads_.emplace_back([this] { loop(); });
  }
  ~WorkerPool() {
    {
      std::lock_guard lock(mu_);
      stopping_ = true;
    }
    cv_.notify_all();
    for (auto& t : threads_) t.join();
  }

  bool has_room() {
    std::lock_guard lock(mu_);
    return queue_.size() < limit_;
  }

  void submit(std::function<void()> job) {
    {
      std::lock_guard lock(mu_);
      queue_.push_back(std::move(job));
    }
    cv_.notify_one();
  }

  void wait_idle() {
    std::unique_lock lock(mu_);
    idle_.wait(lock, [&] { return queue_.empty() && active_ == 0; });
  }

 private:
  void loop() {
    while (true) {
      std::function<void()> job;
      {
        std::unique_lock lock(mu_);
        cv_.wait(lock, [&] { return stopping_ || !queue_.empty(); });
        if (queue_.empty()) return;
        job = std::move(queue_.front());
        queue_.pop_front();
        ++active_;
      }
      job();
      {
        std::lock_guard lock(mu_);
        --active_;
      }
      idle_.notify_all();
    }
  }

  std::size_t limit_;
  std::mutex mu_;
  std::condition_variable cv_;
  std::condition_variable idle_;
  std::deque<std::function<void()>> queue_;
  std::size_t active_ = 0;
  bool stopping_ = false;
  std::vector<std::thread> threads_;
};

const json& field(const json& body, const char* key) {
  if (!body.contains(key)) {
    throw Error(ErrorKind::kSchemaMismatch, std::string("missing field ") + key);
  }
  return body.at(key);
}

std::string string_field(const json& body, const char* key) {
  const auto& v = field(body, key);
  if (!v.is_string()) throw Error(ErrorKind::kSchemaMismatch, std::string(key) + " must be a string");
  return v.get<std::string>();
}

std::string id_field(const json& body, const char* key) {
  const auto& v = field(body, key);
  if (v.is_string()) return v.get<std::string>();
  if (v.is_number_integer()) return std::to_string(v.get<long long>());
  throw Error(ErrorKind::kSchemaMismatch, std::string(key) + " must be a string or integer");
}

template <class T>
T optional_field(const json& body, const char* key, T fallback) {
  if (!body.contains(key) || body.at(key).is_null()) return fallback;
  try {
    return body.at(key).get<T>();
  } catch (const json::exception&) {
    throw Error(ErrorKind::kSchemaMismatch, std::string("bad type for field ") + key);
  }
}

std::optional<Strategy> strategy_field(const json& body) {
  if (!body.contains("strategy_override") || body.at("strategy_override").is_null()) {
    return std::nullopt;
  }
  const auto& v = body.at("strategy_override");
  Strategy s;
  if (v.is_array()) {
    for (const auto& step : v) {
      if (!step.is_string()) {
        throw Error(ErrorKind::kSchemaMismatch, "strategy_override steps must be strings");
      }
      if (!is_blank(step.get<std::string>())) s.steps.emplace_back(trim(step.get<std::string>()));
    }
  } else if (v.is_string()) {
    s.steps = parse_strategy_steps(v.get<std::string>());
  } else {
    throw Error(ErrorKind::kSchemaMismatch, "strategy_override must be a list of steps or text");
  }
  if (s.steps.empty()) throw Error(ErrorKind::kPrecondition, "strategy_override has no steps");
  return s;
}

RewardWeights weights_field(const json& body, const RewardWeights& fallback) {
  if (!body.contains("weights") || body.at("weights").is_null()) return fallback;
  const auto& w = body.at("weights");
  RewardWeights out;
  try {
    if (w.is_array() && w.size() == 4) {
      out = {w[0].get<double>(), w[1].get<double>(), w[2].get<double>(), w[3].get<double>()};
    } else if (w.is_object()) {
      out = {w.at("format").get<double>(), w.at("think").get<double>(), w.at("resp").get<double>(),
             w.at("div").get<double>()};
    } else {
      throw Error(ErrorKind::kSchemaMismatch, "weights must be [f,t,r,d] or an object");
    }
  } catch (const json::exception&) {
    throw Error(ErrorKind::kSchemaMismatch, "weights must hold four numbers");
  }
  out.validate();
  return out;
}

struct Documents {
  ReviewDocument review;
  ManuscriptDocument manuscript;
};

json documents_to_json(const Documents& d) {
  return json{{"review",
               {{"id", d.review.id},
                {"manuscript_id", d.review.manuscript_id},
                {"text", d.review.raw_text},
                {"venue", d.review.venue ? json(*d.review.venue) : json(nullptr)}}},
              {"manuscript",
               {{"id", d.manuscript.id}, {"title", d.manuscript.title}, {"body", d.manuscript.body}}}};
}

Documents documents_from_json(const json& j) {
  Documents d;
  const auto& r = j.at("review");
  d.review = {r.at("id").get<std::string>(), r.at("manuscript_id").get<std::string>(),
              r.at("text").get<std::string>(), std::nullopt};
  if (!r.at("venue").is_null()) d.review.venue = r.at("venue").get<std::string>();
  const auto& m = j.at("manuscript");
  d.manuscript = make_manuscript(m.at("id").get<std::string>(), m.at("title").get<std::string>(),
                                 m.at("body").get<std::string>());
  return d;
}

// Inline documents from a request body: "review" as text or {id, text,
// venue}, "manuscript" as text or {id, title, body}.
Documents inline_documents(const json& body) {
  const auto& rv = field(body, "review");
  std::string text;
  std::optional<std::string> review_id;
  std::optional<std::string> venue;
  if (rv.is_string()) {
    text = rv.get<std::string>();
  } else if (rv.is_object()) {
    text = string_field(rv, "text");
    if (rv.contains("id")) review_id = id_field(rv, "id");
    if (rv.contains("venue") && rv.at("venue").is_string()) venue = rv.at("venue").get<std::string>();
  } else {
    throw Error(ErrorKind::kSchemaMismatch, "review must be text or an object");
  }
  if (is_blank(text)) throw Error(ErrorKind::kPrecondition, "review text is empty");
  if (!review_id && body.contains("review_id")) review_id = id_field(body, "review_id");

  std::string m_body;
  std::string m_title;
  std::optional<std::string> m_id;
  if (body.contains("manuscript") && !body.at("manuscript").is_null()) {
    const auto& mv = body.at("manuscript");
    if (mv.is_string()) {
      m_body = mv.get<std::string>();
    } else if (mv.is_object()) {
      m_body = string_field(mv, "body");
      m_title = optional_field<std::string>(mv, "title", "");
      if (mv.contains("id")) m_id = id_field(mv, "id");
    } else {
      throw Error(ErrorKind::kSchemaMismatch, "manuscript must be text or an object");
    }
  }
  Documents d;
  const auto mid = m_id ? *m_id : "m-" + sha256_hex(m_title + '\x1f' + m_body).substr(0, 12);
  d.manuscript = make_manuscript(mid, m_title, m_body);
  d.review = {review_id ? *review_id : "r-" + sha256_hex(mid + '\x1f' + text).substr(0, 12), mid,
              text, venue};
  return d;
}

bool valid_doc_id(const std::string& id) {
  static const std::regex re("[A-Za-z0-9._-]+");
  return id != "." && id != ".." && std::regex_match(id, re);
}

}  // namespace

struct Service::Impl {
  AppConfig config;
  std::shared_ptr<Gateway> policy;
  std::shared_ptr<Gateway> judge;
  RunStore store;
  fs::path docs_dir;
  AnalysisCache analyses;
  std::unique_ptr<EmbeddingCache> embeddings;
  WorkerPool pool;
  httplib::Server server;
  std::thread listener;
  std::mutex docs_mu;
  std::atomic<bool> stopping{false};

  explicit Impl(AppConfig c)
      : config(std::move(c)),
        store(config.data_dir / "runs"),
        docs_dir(config.data_dir / "documents"),
        pool(config.workers, config.queue_limit) {
    GatewayOptions gopts;
    if (config.cache_dir) gopts.cache_dir = *config.cache_dir / "responses";
    policy = make_gateway(config.provider, gopts);
    judge = config.judge ? make_gateway(*config.judge, gopts) : policy;
    embeddings = std::make_unique<EmbeddingCache>(
        config.cache_dir ? std::optional<fs::path>(*config.cache_dir / "embeddings") : std::nullopt);
    fs::create_directories(docs_dir);
  }

  // ---- documents --------------------------------------------------------

  void save_documents(const Documents& d) {
    if (!valid_doc_id(d.review.id)) {
      throw Error(ErrorKind::kSchemaMismatch, "review id must match [A-Za-z0-9._-]+");
    }
    std::lock_guard lock(docs_mu);
    const auto path = docs_dir / (d.review.id + ".json");
    const auto text = documents_to_json(d).dump(2) + "\n";
    if (fs::exists(path)) {
      if (read_file(path) != text) {
        throw Error(ErrorKind::kDuplicateRun,
                    "review " + d.review.id + " is already stored with different content");
      }
      return;
    }
    write_file_atomic(path, text);
  }

  Documents load_documents(const std::string& review_id) {
    std::lock_guard lock(docs_mu);
    const auto path = docs_dir / (review_id + ".json");
    if (!valid_doc_id(review_id) || !fs::exists(path)) {
      throw Error(ErrorKind::kMissingRun, "no stored review " + review_id);
    }
    return documents_from_json(json::parse(read_file(path)));
  }

  // A request names a stored review by id or carries the documents inline.
  Documents resolve_documents(const json& body) {
    if (body.contains("review")) return inline_documents(body);
    if (body.contains("review_id")) return load_documents(id_field(body, "review_id"));
    throw Error(ErrorKind::kSchemaMismatch, "need review_id or review");
  }

  std::shared_ptr<const ReviewAnalysis> analysis_for(const ReviewDocument& review) {
    return analyses.get_or_compute(
        review, [&] { return analyze_review(review, *policy); }, policy->config().model_id);
  }

  RetrievalResult retrieve(const Documents& d, const Comment& comment, std::size_t k) {
    if (d.manuscript.chunks.empty()) return RetrievalResult{comment.id, {}, k};
    return retrieve_top_k(comment, d.manuscript.chunks, k, *policy, embeddings.get());
  }

  // ---- runs -------------------------------------------------------------

  using Emit = std::function<void(const std::string& stage, const std::string& status)>;

  HttpReply submit(RunKind kind, const json& inputs,
                   std::function<void(const std::string& run_id, const Emit& emit)> work) {
    if (!pool.has_room()) {
      return {503, error_json(ErrorKind::kPrecondition, "run queue is full", "")};
    }
    const auto run = store.create(kind, inputs);
    const auto id = run.run_id;
    auto seq = std::make_shared<std::size_t>(0);
    auto last_stage = std::make_shared<std::string>("queued");
    auto emit_event = [this, id, seq](const std::string& stage, const std::string& status,
                                      const json& extra) {
      json ev{{"run_id", id},
              {"seq", (*seq)++},
              {"stage", stage},
              {"status", status},
              {"timestamp", policy->now_timestamp()}};
      for (auto it = extra.begin(); it != extra.end(); ++it) ev[it.key()] = *it;
      store.append_event(id, std::move(ev));
    };
    emit_event("run", "queued", json::object());
    pool.submit([this, id, work, emit_event, last_stage] {
      const Emit emit = [&](const std::string& stage, const std::string& status) {
        *last_stage = stage;
        emit_event(stage, status, json::object());
      };
      try {
        emit("run", "started");
        work(id, emit);
        emit_event("run", "done", json::object());
        store.finish(id, RunStatus::kDone);
      } catch (const Error& e) {
        const auto stage = e.stage().empty() ? *last_stage : e.stage();
        const auto err = error_json(e.kind(), e.what(), stage)["error"];
        emit_event("run", "failed", json{{"error", err}});
        store.finish(id, RunStatus::kFailed, std::optional<json>(std::in_place, err));
      } catch (const std::exception& e) {
        const auto err = error_json(ErrorKind::kProviderError, e.what(), *last_stage)["error"];
        emit_event("run", "failed", json{{"error", err}});
        store.finish(id, RunStatus::kFailed, std::optional<json>(std::in_place, err));
      }
    });
    return {202, json{{"run_id", id},
                      {"kind", to_string(kind)},
                      {"status", "running"},
                      {"events", "/api/runs/" + id + "/events"}}};
  }

  // ---- handlers ---------------------------------------------------------

  HttpReply post_reviews(const json& body) {
    const auto d = inline_documents(body);
    save_documents(d);
    return {201, json{{"review_id", d.review.id},
                      {"manuscript_id", d.manuscript.id},
                      {"manuscript_chunks", d.manuscript.chunks.size()}}};
  }

  HttpReply post_extract(const json& body) {
    const auto d = resolve_documents(body);
    if (is_blank(d.review.raw_text)) throw Error(ErrorKind::kPrecondition, "review text is empty");
    std::shared_ptr<const ReviewAnalysis> analysis;
    try {
      analysis = analysis_for(d.review);
    } catch (Error& e) {
      if (e.stage().empty()) e.with_stage("analysis");
      throw;
    }
    auto doc = to_json(*analysis);
    const auto run = store.store_run(RunKind::kExtract, body, {{"analysis.json", doc.dump(2)}});
    doc["run_id"] = run.run_id;
    doc["manuscript_id"] = d.manuscript.id;
    return {200, doc};
  }

  HttpReply post_tsr(const json& body) {
    const auto d = resolve_documents(body);
    const auto comment_id = id_field(body, "comment_id");
    TsrOptions opts;
    opts.k = optional_field<std::size_t>(body, "k", config.k);
    if (opts.k == 0) throw Error(ErrorKind::kPrecondition, "k must be positive");
    opts.strategy_override = strategy_field(body);
    return submit(RunKind::kTsr, body, [this, d, comment_id, opts](const std::string& id,
                                                                   const Emit& emit) mutable {
      opts.analysis_cache = &analyses;
      opts.embedding_cache = embeddings.get();
      opts.on_stage = [&](std::string_view stage, std::string_view status) {
        emit(std::string(stage), std::string(status));
      };
      const auto record = run_tsr(d.manuscript, d.review, comment_id, *policy, opts);
      store.write_artifact(id, "record.json", dump_record(record));
    });
  }

  HttpReply post_candidates(const json& body) {
    const auto d = resolve_documents(body);
    const auto comment_id = id_field(body, "comment_id");
    CandidateOptions opts;
    opts.group_size = optional_field<std::size_t>(
        body, "group_size", optional_field<std::size_t>(body, "G", config.group_size));
    if (opts.group_size < 1) throw Error(ErrorKind::kPrecondition, "group_size must be positive");
    opts.weights = weights_field(body, config.weights);
    opts.base_seed = optional_field<std::uint64_t>(body, "seed", config.seed);
    opts.strategy_override = strategy_field(body);
    const auto k = optional_field<std::size_t>(body, "k", config.k);
    return submit(RunKind::kCandidates, body,
                  [this, d, comment_id, opts, k](const std::string& id, const Emit& emit) mutable {
                    emit("analysis", "started");
                    const auto analysis = analysis_for(d.review);
                    const auto* item = analysis->find(comment_id);
                    if (!item) {
                      throw Error(ErrorKind::kPrecondition, "no comment " + comment_id)
                          .with_stage("analysis");
                    }
                    emit("analysis", "done");
                    emit("retrieval", "started");
                    const auto ctx = retrieve(d, item->first, k);
                    emit("retrieval", "done");
                    if (opts.strategy_override) opts.profile = analysis->profile();
                    emit("candidates", "started");
                    const auto report =
                        run_candidates(d.review, item->first, ctx, *policy, *judge, opts);
                    emit("candidates", "done");
                    store.write_artifact(id, "candidates.json", to_json(report).dump(2));
                    store.write_artifact(id, "rewards.jsonl", reward_report_jsonl(report));
                  });
  }

  HttpReply post_score(const json& body) {
    if (body.contains("rewards")) {
      const auto rewards = optional_field<std::vector<double>>(body, "rewards", {});
      const auto adv = group_advantages(rewards);
      return {200, json{{"advantages", adv}, {"best", select_best_of_n(rewards)}}};
    }
    const auto weights = weights_field(body, config.weights);
    const auto b = composite_reward(
        field(body, "format").get<int>(),
        {field(body, "analysis").get<double>(), field(body, "strategy").get<double>()},
        field(body, "response").get<double>(), field(body, "diversity").get<double>(), weights);
    return {200, json{{"format", b.format},
                      {"think", b.think},
                      {"resp", b.resp},
                      {"div", b.div},
                      {"total", b.total},
                      {"weights",
                       {{"format", weights.format},
                        {"think", weights.think},
                        {"resp", weights.resp},
                        {"div", weights.div}}}}};
  }

  HttpReply post_judge(const json& body) {
    const auto d = resolve_documents(body);
    const auto response = string_field(body, "response");
    if (is_blank(response)) throw Error(ErrorKind::kPrecondition, "response is empty");
    std::optional<std::string> comment_text;
    std::optional<std::string> comment_id;
    if (body.contains("comment")) comment_text = string_field(body, "comment");
    if (body.contains("comment_id")) comment_id = id_field(body, "comment_id");
    if (!comment_text && !comment_id) {
      throw Error(ErrorKind::kSchemaMismatch, "need comment_id or comment");
    }
    const auto output = optional_field<std::string>(body, "output", "");
    const auto evidence_in = body.contains("evidence")
                                 ? std::optional<std::string>(string_field(body, "evidence"))
                                 : std::nullopt;
    const auto k = optional_field<std::size_t>(body, "k", config.k);
    return submit(RunKind::kJudge, body, [=, this](const std::string& id, const Emit& emit) {
      Comment comment;
      if (comment_id) {
        emit("analysis", "started");
        const auto analysis = analysis_for(d.review);
        const auto* item = analysis->find(*comment_id);
        if (!item) {
          throw Error(ErrorKind::kPrecondition, "no comment " + *comment_id).with_stage("analysis");
        }
        comment = item->first;
        emit("analysis", "done");
      } else {
        comment = {"inline", d.review.id, 0, *comment_text, false};
      }
      std::string evidence;
      if (evidence_in) {
        evidence = *evidence_in;
      } else {
        emit("retrieval", "started");
        evidence = retrieve(d, comment, k).evidence_text();
        emit("retrieval", "done");
      }
      json out{{"comment_id", comment.id}};
      if (!output.empty()) out["format"] = score_format(output);
      emit("judge_response", "started");
      out["response_score"] =
          judge_response_quality(d.review.raw_text, comment.text, evidence, response, *judge);
      emit("judge_response", "done");
      emit("judge_diversity", "started");
      const auto negatives = prompts::default_negatives();
      out["diversity_score"] = judge_diversity(response, negatives, *judge);
      emit("judge_diversity", "done");
      emit("judge_scorecard", "started");
      out["scorecard"] = to_json(judge_scorecard(evidence, d.review, comment, response, *judge));
      emit("judge_scorecard", "done");
      store.write_artifact(id, "judge.json", out.dump(2));
    });
  }

  HttpReply get_runs() {
    json runs = json::array();
    for (const auto& r : store.list()) runs.push_back(to_json(r));
    return {200, json{{"runs", runs}}};
  }

  HttpReply get_run(const std::string& id) {
    const auto run = store.load_run(id);
    json artifacts = json::object();
    for (const auto& name : run.artifacts) {
      const auto bytes = store.load_artifact(id, name);
      if (name.size() > 5 && name.compare(name.size() - 5, 5, ".json") == 0) {
        artifacts[name] = json::parse(bytes);
      } else {
        artifacts[name] = bytes;
      }
    }
    return {200, json{{"run", to_json(run)},
                      {"inputs", store.load_inputs(id)},
                      {"artifacts", artifacts},
                      {"events", store.events(id)}}};
  }

  HttpReply dispatch(const std::string& method, const std::string& path, const std::string& raw) {
    static const std::regex run_re(R"(^/api/runs/([^/]+)$)");
    std::smatch m;
    try {
      json body = json::object();
      if (method == "POST") {
        try {
          body = json::parse(raw.empty() ? "{}" : raw);
        } catch (const json::exception& e) {
          throw Error(ErrorKind::kSchemaMismatch, std::string("body is not JSON: ") + e.what());
        }
        if (!body.is_object()) throw Error(ErrorKind::kSchemaMismatch, "body must be a JSON object");
      }
      if (method == "POST" && path == "/api/reviews") return post_reviews(body);
      if (method == "POST" && path == "/api/extract") return post_extract(body);
      if (method == "POST" && path == "/api/tsr") return post_tsr(body);
      if (method == "POST" && path == "/api/candidates") return post_candidates(body);
      if (method == "POST" && path == "/api/score") return post_score(body);
      if (method == "POST" && path == "/api/judge") return post_judge(body);
      if (method == "GET" && path == "/api/runs") return get_runs();
      if (method == "GET" && std::regex_match(path, m, run_re)) return get_run(m[1].str());
      return {404, error_json(ErrorKind::kMissingRun, "no route " + method + " " + path, "")};
    } catch (const Error& e) {
      return error_reply(e);
    } catch (const json::exception& e) {
      return {400, error_json(ErrorKind::kSchemaMismatch, e.what(), "")};
    }
  }

  void install_routes() {
    server.Get(R"(/api/runs/([^/]+)/events)", [this](const httplib::Request& req,
                                                     httplib::Response& res) {
      const std::string id = req.matches[1];
      try {
        store.load_run(id);
      } catch (const Error& e) {
        const auto r = error_reply(e);
        res.status = r.status;
        res.set_content(r.body.dump(), "application/json");
        return;
      }
      auto seen = std::make_shared<std::size_t>(0);
      res.set_header("Cache-Control", "no-cache");
      res.set_chunked_content_provider(
          "text/event-stream", [this, id, seen](std::size_t, httplib::DataSink& sink) {
            const auto batch = store.wait_events(id, *seen, std::chrono::milliseconds(250));
            for (const auto& ev : batch) {
              const auto frame = "event: " + ev.value("stage", std::string("run")) +
                                 "\ndata: " + ev.dump() + "\n\n";
              if (!sink.write(frame.data(), frame.size())) return false;
              ++*seen;
            }
            if (batch.empty() &&
                (stopping || store.load_run(id).status != RunStatus::kRunning)) {
              // Drain anything appended between the wait and the status check.
              if (store.events(id).size() <= *seen) sink.done();
            }
            return true;
          });
    });
    auto forward = [this](const httplib::Request& req, httplib::Response& res) {
      const auto r = dispatch(req.method, req.path, req.body);
      res.status = r.status;
      res.set_content(r.body.dump(), "application/json");
    };
    server.Get(".*", forward);
    server.Post(".*", forward);
  }
};

Service::Service(AppConfig config) : impl_(std::make_unique<Impl>(std::move(config))) {
  impl_->install_routes();
}

Service::~Service() { stop(); }

int Service::start(const std::string& host, int port) {
  const int bound = port == 0 ? impl_->server.bind_to_any_port(host)
                              : (impl_->server.bind_to_port(host, port) ? port : -1);
  if (bound < 0) {
    throw Error(ErrorKind::kPrecondition, "cannot bind " + host + ":" + std::to_string(port));
  }
  impl_->listener = std::thread([this] { impl_->server.listen_after_bind(); });
  impl_->server.wait_until_ready();
  return bound;
}

void Service::run(const std::string& host, int port) {
  if (!impl_->server.listen(host, port)) {
    throw Error(ErrorKind::kPrecondition, "cannot listen on " + host + ":" + std::to_string(port));
  }
}

void Service::stop() {
  if (!impl_) return;
  impl_->stopping = true;
  impl_->server.stop();
  if (impl_->listener.joinable()) impl_->listener.join();
}

HttpReply Service::handle(const std::string& method, const std::string& path,
                          const std::string& body) {
  return impl_->dispatch(method, path, body);
}

void Service::wait_idle() { impl_->pool.wait_idle(); }

}  // namespace rebuttal
