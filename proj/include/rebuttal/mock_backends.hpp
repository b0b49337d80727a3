#pragma once

// Offline backends. ScriptedChatBackend and HashEmbeddingBackend are test
// doubles; RuleBasedBackend answers every prompt this library sends with the
// heuristics in heuristics.hpp, so `--mock` runs exercise the whole pipeline
// without a network.

#include <cstdint>
#include <deque>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "rebuttal/provider.hpp"

namespace rebuttal {

enum class InjectedFailure { kTransient, kTimeout, kPermanent };

class ScriptedChatBackend : public ChatBackend {
 public:
  /// Reply for a prompt whose SHA-256 hex digest equals `digest`.
  void on_digest(std::string digest, std::string reply);
  /// Reply for any prompt containing `needle`; rules are tried in insertion
  /// order after the digest map.
  void on_contains(std::string needle, std::string reply);
  /// Replies handed out in order when no rule matches.
  void enqueue(std::string reply);
  /// Backend used when neither rules nor queue apply.
  void set_fallback(std::shared_ptr<ChatBackend> fallback);
  /// The next `n` calls fail before any reply is looked up.
  void fail_next(int n, InjectedFailure kind = InjectedFailure::kTransient);

  std::string complete(const ChatRequest& request) override;

  std::vector<ChatRequest> requests() const;
  std::size_t call_count() const;

 private:
  mutable std::mutex mu_;
  std::map<std::string, std::string> by_digest_;
  std::vector<std::pair<std::string, std::string>> by_substring_;
  std::deque<std::string> queue_;
  std::deque<InjectedFailure> failures_;
  std::shared_ptr<ChatBackend> fallback_;
  std::vector<ChatRequest> log_;
};

class HashEmbeddingBackend : public EmbeddingBackend {
 public:
  enum class Mode {
    // Unit vector seeded by the text digest: identical texts coincide,
    // distinct texts are nearly orthogonal.
    kDigest,
    // Normalized sum of per-word digest vectors, so texts sharing vocabulary
    // are similar. Used for offline retrieval demos.
    kBagOfWords,
  };

  explicit HashEmbeddingBackend(std::size_t dimension = 256, Mode mode = Mode::kDigest);

  static Embedding embed_text(std::string_view text, std::size_t dimension, Mode mode);

  std::vector<Embedding> embed(const EmbedRequest& request) override;
  void fail_next(int n, InjectedFailure kind = InjectedFailure::kTransient);

  /// Batch sizes of every request received, in order.
  std::vector<std::size_t> batch_log() const;

 private:
  std::size_t dimension_;
  Mode mode_;
  mutable std::mutex mu_;
  std::deque<InjectedFailure> failures_;
  std::vector<std::size_t> batches_;
};

/// Deterministic stand-in for a chat model. It recognizes each of the
/// library's prompt templates, reads the input sections back out of the
/// prompt and answers in the format the template asks for. Output varies
/// with the request seed the way sampled candidates would: seed % 3 picks a
/// narrative, list or mixed response style, and seed % 5 == 4 drops a tag
/// from a full policy output.
class RuleBasedBackend : public ChatBackend {
 public:
  std::string complete(const ChatRequest& request) override;
};

/// Gateway wired to the offline backends.
std::shared_ptr<Gateway> make_mock_gateway(ProviderConfig config = {},
                                           GatewayOptions options = {});

}  // namespace rebuttal
