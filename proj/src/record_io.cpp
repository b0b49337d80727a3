#include "rebuttal/record_io.hpp"

#include "rebuttal/errors.hpp"
#include "rebuttal/profile.hpp"

namespace rebuttal {
namespace {

template <class T>
T field(const json& j, const char* name) {
  if (!j.is_object() || !j.contains(name)) {
    throw Error(ErrorKind::kSchemaMismatch, std::string("missing field ") + name);
  }
  try {
    return j.at(name).get<T>();
  } catch (const json::exception& e) {
    throw Error(ErrorKind::kSchemaMismatch, std::string("bad field ") + name + ": " + e.what());
  }
}

}  // namespace

json to_json(const StageTrace& t) {
  return json{{"stage", t.stage},
              {"model_id", t.model_id},
              {"timestamp", t.timestamp},
              {"template_hash", t.template_hash},
              {"prompt_digests", t.prompt_digests},
              {"attempts", t.attempts}};
}

StageTrace stage_trace_from_json(const json& j) {
  StageTrace t;
  t.stage = field<std::string>(j, "stage");
  t.model_id = field<std::string>(j, "model_id");
  t.timestamp = field<std::string>(j, "timestamp");
  t.template_hash = field<std::string>(j, "template_hash");
  t.prompt_digests = field<std::vector<std::string>>(j, "prompt_digests");
  t.attempts = field<int>(j, "attempts");
  return t;
}

json to_json(const RetrievalResult& r) {
  json ranked = json::array();
  for (const auto& c : r.ranked) {
    ranked.push_back({{"chunk_id", c.chunk_id},
                      {"ordinal", c.ordinal},
                      {"similarity", c.similarity},
                      {"text", c.text}});
  }
  return json{{"comment_id", r.comment_id}, {"k", r.k}, {"ranked", ranked}};
}

RetrievalResult retrieval_result_from_json(const json& j) {
  RetrievalResult r;
  r.comment_id = field<std::string>(j, "comment_id");
  r.k = field<std::size_t>(j, "k");
  for (const auto& c : field<json>(j, "ranked")) {
    r.ranked.push_back({field<std::string>(c, "chunk_id"), field<std::uint32_t>(c, "ordinal"),
                        field<double>(c, "similarity"), field<std::string>(c, "text")});
  }
  return r;
}

json to_json(const Comment& c) {
  return json{{"id", c.id},
              {"review_id", c.review_id},
              {"ordinal", c.ordinal},
              {"text", c.text},
              {"distilled", c.distilled}};
}

Comment comment_from_json(const json& j) {
  Comment c;
  c.id = field<std::string>(j, "id");
  c.review_id = field<std::string>(j, "review_id");
  c.ordinal = field<std::uint32_t>(j, "ordinal");
  c.text = field<std::string>(j, "text");
  c.distilled = j.value("distilled", false);
  return c;
}

json to_json(const TsrRecord& r) {
  json trace = json::array();
  for (const auto& t : r.provider_trace) trace.push_back(to_json(t));
  return json{{"manuscript_id", r.manuscript_id},
              {"review_id", r.review_id},
              {"comment_id", r.comment_id},
              {"profile", profile_to_json(r.profile)},
              {"strategy", {{"steps", r.strategy.steps}}},
              {"response", {{"text", r.response.text}}},
              {"retrieved_chunk_ids", r.retrieved_chunk_ids},
              {"provider_trace", trace}};
}

TsrRecord tsr_record_from_json(const json& j) {
  TsrRecord r;
  r.manuscript_id = field<std::string>(j, "manuscript_id");
  r.review_id = field<std::string>(j, "review_id");
  r.comment_id = field<std::string>(j, "comment_id");
  r.profile = profile_from_json(field<json>(j, "profile"));
  r.strategy.steps = field<std::vector<std::string>>(field<json>(j, "strategy"), "steps");
  r.response.text = field<std::string>(field<json>(j, "response"), "text");
  r.retrieved_chunk_ids = field<std::vector<std::string>>(j, "retrieved_chunk_ids");
  for (const auto& t : field<json>(j, "provider_trace")) {
    r.provider_trace.push_back(stage_trace_from_json(t));
  }
  return r;
}

std::string dump_record(const TsrRecord& record) {
  return to_json(record).dump(2) + "\n";
}

json strip_timestamps(json j) {
  if (j.is_object()) {
    j.erase("timestamp");
    for (auto& v : j) v = strip_timestamps(std::move(v));
  } else if (j.is_array()) {
    for (auto& v : j) v = strip_timestamps(std::move(v));
  }
  return j;
}

}  // namespace rebuttal
