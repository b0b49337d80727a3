#pragma once

// Run persistence. Each run lives in <root>/<run_id>/:
//   meta.json     RunRecord
//   input.json    request that started the run
//   trace.jsonl   stage events, one JSON object per line
//   artifacts/    named outputs, written once
//   .journal      present while the run is open; removed when it finishes
// A run whose directory still holds a journal but which no live process owns
// was interrupted, and loads as failed.

#include <chrono>
#include <condition_variable>
#include <filesystem>
#include <map>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "rebuttal/json_util.hpp"

namespace rebuttal {

enum class RunKind { kExtract, kTsr, kCandidates, kJudge, kSynth, kEval };
enum class RunStatus { kRunning, kDone, kFailed };

std::string_view to_string(RunKind kind);
std::string_view to_string(RunStatus status);
RunKind parse_run_kind(std::string_view s);
RunStatus parse_run_status(std::string_view s);

struct RunRecord {
  std::string run_id;
  RunKind kind = RunKind::kTsr;
  std::string inputs_digest;
  std::string created_at;
  std::string finished_at;
  std::vector<std::string> artifacts;  // names under artifacts/
  RunStatus status = RunStatus::kRunning;
  std::optional<json> error;           // {"kind","message","stage"} when failed

  bool operator==(const RunRecord&) const = default;
};

json to_json(const RunRecord& run);
RunRecord run_record_from_json(const json& j);

class RunStore {
 public:
  explicit RunStore(std::filesystem::path root);

  const std::filesystem::path& root() const { return root_; }

  /// Opens a new run. Without an id one is generated. kDuplicateRun when the
  /// id is taken. kPrecondition for ids that are not [A-Za-z0-9._-]+.
  RunRecord create(RunKind kind, const json& inputs, std::optional<std::string> run_id = {});

  /// kPrecondition when the artifact exists or the run is finished.
  void write_artifact(const std::string& run_id, const std::string& name, std::string_view bytes);
  void append_event(const std::string& run_id, json event);

  /// Closes the run. A done run must list every artifact it wrote;
  /// finishing twice is kPrecondition.
  RunRecord finish(const std::string& run_id, RunStatus status,
                   std::optional<json> error = std::nullopt);

  /// create + artifacts + finish(done) in one call.
  RunRecord store_run(RunKind kind, const json& inputs,
                      const std::map<std::string, std::string>& artifacts,
                      std::optional<std::string> run_id = {});

  /// kMissingRun for unknown ids.
  RunRecord load_run(const std::string& run_id) const;
  std::string load_artifact(const std::string& run_id, const std::string& name) const;
  json load_inputs(const std::string& run_id) const;
  std::vector<json> events(const std::string& run_id) const;
  /// Newest first.
  std::vector<RunRecord> list() const;

  /// Blocks until the run has more than `seen` events or is finished, or
  /// the timeout passes. Returns the events after `seen`.
  std::vector<json> wait_events(const std::string& run_id, std::size_t seen,
                                std::chrono::milliseconds timeout) const;

 private:
  std::filesystem::path dir(const std::string& run_id) const;
  RunRecord read_meta(const std::string& run_id) const;
  void write_meta(const RunRecord& run) const;
  std::vector<json> read_events(const std::string& run_id) const;

  std::filesystem::path root_;
  mutable std::mutex mu_;
  mutable std::condition_variable changed_;
  std::set<std::string> open_;  // runs this process owns
};

}  // namespace rebuttal
