#include "rebuttal/run_store.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <chrono>
#include <fstream>
#include <random>
#include <regex>
#include <sstream>
#include <tuple>

#include "rebuttal/errors.hpp"
#include "rebuttal/provider.hpp"
#include "rebuttal/text.hpp"

namespace rebuttal {

namespace fs = std::filesystem;

namespace {

constexpr std::array<std::pair<RunKind, std::string_view>, 6> kKinds{{
    {RunKind::kExtract, "extract"},
    {RunKind::kTsr, "tsr"},
    {RunKind::kCandidates, "candidates"},
    {RunKind::kJudge, "judge"},
    {RunKind::kSynth, "synth"},
    {RunKind::kEval, "eval"},
}};
constexpr std::array<std::pair<RunStatus, std::string_view>, 3> kStatuses{{
    {RunStatus::kRunning, "running"},
    {RunStatus::kDone, "done"},
    {RunStatus::kFailed, "failed"},
}};

bool valid_name(std::string_view s) {
  static const std::regex re("[A-Za-z0-9._-]+");
  return !s.empty() && s != "." && s != ".." && std::regex_match(s.begin(), s.end(), re);
}

std::string now() { return format_timestamp(std::chrono::system_clock::now()); }

std::string generate_id(RunKind kind) {
  static std::atomic<unsigned> counter{0};
  static const auto salt = std::random_device{}();
  const auto t = std::chrono::system_clock::now().time_since_epoch().count();
  const auto digest = sha256_hex(std::to_string(t) + '/' + std::to_string(salt) + '/' +
                                 std::to_string(counter++));
  return std::string(to_string(kind)) + "-" + digest.substr(0, 12);
}

}  // namespace

std::string_view to_string(RunKind kind) {
  for (const auto& [k, n] : kKinds) {
    if (k == kind) return n;
  }
  return "?";
}

std::string_view to_string(RunStatus status) {
  for (const auto& [k, n] : kStatuses) {
    if (k == status) return n;
  }
  return "?";
}

RunKind parse_run_kind(std::string_view s) {
  for (const auto& [k, n] : kKinds) {
    if (n == s) return k;
  }
  throw Error(ErrorKind::kSchemaMismatch, "unknown run kind " + std::string(s));
}

RunStatus parse_run_status(std::string_view s) {
  for (const auto& [k, n] : kStatuses) {
    if (n == s) return k;
  }
  throw Error(ErrorKind::kSchemaMismatch, "unknown run status " + std::string(s));
}

json to_json(const RunRecord& r) {
  json j{{"run_id", r.run_id},
         {"kind", to_string(r.kind)},
         {"inputs_digest", r.inputs_digest},
         {"created_at", r.created_at},
         {"finished_at", r.finished_at},
         {"artifacts", r.artifacts},
         {"status", to_string(r.status)},
         {"error", r.error ? *r.error : json(nullptr)}};
  return j;
}

RunRecord run_record_from_json(const json& j) {
  try {
    RunRecord r;
    r.run_id = j.at("run_id").get<std::string>();
    r.kind = parse_run_kind(j.at("kind").get<std::string>());
    r.inputs_digest = j.at("inputs_digest").get<std::string>();
    r.created_at = j.at("created_at").get<std::string>();
    r.finished_at = j.value("finished_at", std::string());
    r.artifacts = j.at("artifacts").get<std::vector<std::string>>();
    r.status = parse_run_status(j.at("status").get<std::string>());
    if (j.contains("error") && !j.at("error").is_null()) r.error = j.at("error");
    return r;
  } catch (const json::exception& e) {
    throw Error(ErrorKind::kSchemaMismatch, std::string("bad run record: ") + e.what());
  }
}

RunStore::RunStore(fs::path root) : root_(std::move(root)) { fs::create_directories(root_); }

fs::path RunStore::dir(const std::string& run_id) const {
  if (!valid_name(run_id)) throw Error(ErrorKind::kMissingRun, "no run " + run_id);
  return root_ / run_id;
}

RunRecord RunStore::read_meta(const std::string& run_id) const {
  const auto d = dir(run_id);
  if (!fs::exists(d / "meta.json")) throw Error(ErrorKind::kMissingRun, "no run " + run_id);
  json j;
  try {
    j = json::parse(read_file(d / "meta.json"));
  } catch (const json::exception& e) {
    throw Error(ErrorKind::kSchemaMismatch, "corrupt meta.json for " + run_id + ": " + e.what());
  }
  auto r = run_record_from_json(j);
  if (fs::exists(d / ".journal") && !open_.count(run_id)) {
    // Left behind by a process that died mid-run.
    r.status = RunStatus::kFailed;
    if (!r.error) {
      r.error = json{{"kind", "Interrupted"},
                     {"message", "run was interrupted before it finished"},
                     {"stage", nullptr}};
    }
  }
  return r;
}

void RunStore::write_meta(const RunRecord& run) const {
  write_file_atomic(dir(run.run_id) / "meta.json", to_json(run).dump(2) + "\n");
}

RunRecord RunStore::create(RunKind kind, const json& inputs, std::optional<std::string> run_id) {
  std::lock_guard lock(mu_);
  const auto id = run_id ? *run_id : generate_id(kind);
  if (!valid_name(id)) throw Error(ErrorKind::kPrecondition, "invalid run id " + id);
  const auto d = root_ / id;
  // create_directory is the atomic claim on the id.
  if (fs::exists(d) || !fs::create_directory(d)) {
    throw Error(ErrorKind::kDuplicateRun, "run " + id + " already exists");
  }
  write_file_atomic(d / ".journal", now() + "\n");
  open_.insert(id);

  const auto input_text = inputs.dump(2) + "\n";
  RunRecord r;
  r.run_id = id;
  r.kind = kind;
  r.inputs_digest = sha256_hex(inputs.dump());
  r.created_at = now();
  write_file_atomic(d / "input.json", input_text);
  fs::create_directories(d / "artifacts");
  write_meta(r);
  return r;
}

void RunStore::write_artifact(const std::string& run_id, const std::string& name,
                              std::string_view bytes) {
  std::lock_guard lock(mu_);
  if (!valid_name(name)) throw Error(ErrorKind::kPrecondition, "invalid artifact name " + name);
  auto r = read_meta(run_id);
  if (!open_.count(run_id) || r.status != RunStatus::kRunning) {
    throw Error(ErrorKind::kPrecondition, "run " + run_id + " is closed");
  }
  const auto path = dir(run_id) / "artifacts" / name;
  if (fs::exists(path)) {
    throw Error(ErrorKind::kPrecondition, "artifact " + name + " already written");
  }
  write_file_atomic(path, bytes);
  r.artifacts.push_back(name);
  write_meta(r);
  changed_.notify_all();
}

void RunStore::append_event(const std::string& run_id, json event) {
  std::lock_guard lock(mu_);
  auto r = read_meta(run_id);
  if (!open_.count(run_id) || r.status != RunStatus::kRunning) {
    throw Error(ErrorKind::kPrecondition, "run " + run_id + " is closed");
  }
  const auto path = dir(run_id) / "trace.jsonl";
  std::ofstream out(path, std::ios::binary | std::ios::app);
  out << event.dump() << '\n';
  if (!out) throw Error(ErrorKind::kPrecondition, "cannot append to " + path.string());
  out.close();
  changed_.notify_all();
}

RunRecord RunStore::finish(const std::string& run_id, RunStatus status, std::optional<json> error) {
  std::lock_guard lock(mu_);
  auto r = read_meta(run_id);
  if (!open_.count(run_id) || r.status != RunStatus::kRunning) {
    throw Error(ErrorKind::kPrecondition, "run " + run_id + " is already finished");
  }
  if (status == RunStatus::kRunning) {
    throw Error(ErrorKind::kPrecondition, "finish needs a final status");
  }
  const auto d = dir(run_id);
  if (status == RunStatus::kDone) {
    for (const auto& a : r.artifacts) {
      if (!fs::exists(d / "artifacts" / a)) {
        throw Error(ErrorKind::kPrecondition, "artifact " + a + " of run " + run_id + " is missing");
      }
    }
  }
  r.status = status;
  r.error = std::move(error);
  r.finished_at = now();
  write_meta(r);
  fs::remove(d / ".journal");
  open_.erase(run_id);
  changed_.notify_all();
  return r;
}

RunRecord RunStore::store_run(RunKind kind, const json& inputs,
                              const std::map<std::string, std::string>& artifacts,
                              std::optional<std::string> run_id) {
  const auto r = create(kind, inputs, std::move(run_id));
  for (const auto& [name, bytes] : artifacts) write_artifact(r.run_id, name, bytes);
  return finish(r.run_id, RunStatus::kDone);
}

RunRecord RunStore::load_run(const std::string& run_id) const {
  std::lock_guard lock(mu_);
  return read_meta(run_id);
}

std::string RunStore::load_artifact(const std::string& run_id, const std::string& name) const {
  std::lock_guard lock(mu_);
  const auto r = read_meta(run_id);
  if (std::find(r.artifacts.begin(), r.artifacts.end(), name) == r.artifacts.end()) {
    throw Error(ErrorKind::kMissingRun, "run " + run_id + " has no artifact " + name);
  }
  return read_file(dir(run_id) / "artifacts" / name);
}

json RunStore::load_inputs(const std::string& run_id) const {
  std::lock_guard lock(mu_);
  read_meta(run_id);
  return json::parse(read_file(dir(run_id) / "input.json"));
}

std::vector<json> RunStore::read_events(const std::string& run_id) const {
  std::vector<json> out;
  const auto path = dir(run_id) / "trace.jsonl";
  if (!fs::exists(path)) return out;
  std::istringstream in(read_file(path));
  std::string line;
  while (std::getline(in, line)) {
    if (is_blank(line)) continue;
    try {
      out.push_back(json::parse(line));
    } catch (const json::exception&) {
      break;  // torn final line from a crash
    }
  }
  return out;
}

std::vector<json> RunStore::events(const std::string& run_id) const {
  std::lock_guard lock(mu_);
  read_meta(run_id);
  return read_events(run_id);
}

std::vector<RunRecord> RunStore::list() const {
  std::lock_guard lock(mu_);
  std::vector<RunRecord> out;
  for (const auto& entry : fs::directory_iterator(root_)) {
    if (!entry.is_directory() || !fs::exists(entry.path() / "meta.json")) continue;
    try {
      out.push_back(read_meta(entry.path().filename().string()));
    } catch (const Error&) {
    }
  }
  std::sort(out.begin(), out.end(), [](const RunRecord& a, const RunRecord& b) {
    return std::tie(b.created_at, b.run_id) < std::tie(a.created_at, a.run_id);
  });
  return out;
}

std::vector<json> RunStore::wait_events(const std::string& run_id, std::size_t seen,
                                        std::chrono::milliseconds timeout) const {
  std::unique_lock lock(mu_);
  read_meta(run_id);
  changed_.wait_for(lock, timeout, [&] {
    return read_events(run_id).size() > seen || !open_.count(run_id);
  });
  auto all = read_events(run_id);
  if (all.size() <= seen) return {};
  return {all.begin() + static_cast<long>(seen), all.end()};
}

}  // namespace rebuttal
