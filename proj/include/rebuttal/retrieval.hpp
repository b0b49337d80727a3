#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <shared_mutex>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "rebuttal/provider.hpp"
#include "rebuttal/types.hpp"

namespace rebuttal {

inline constexpr std::size_t kMinChunkWords = 15;
inline constexpr std::size_t kDefaultTopK = 3;

/// Blank-line paragraphs. A paragraph under `min_words` words is merged into
/// the one after it; a short final paragraph is merged into the one before.
/// Chunk ids are "p<ordinal>".
std::vector<ManuscriptChunk> chunk_by_paragraph(std::string_view body,
                                                std::size_t min_words = kMinChunkWords);

ManuscriptDocument make_manuscript(Id id, std::string title, std::string body);

/// dot(a,b) / (|a| |b|) accumulated in double. 0 when either norm is 0.
double cosine_similarity(std::span<const float> a, std::span<const float> b);

/// Thread-safe embedding cache keyed by (model id, SHA-256 of the text),
/// optionally persisted as one file per key:
///   "REMB" | u32 version=1 | u32 dimension | u32 reserved | dimension x f32
/// all little-endian.
class EmbeddingCache {
 public:
  explicit EmbeddingCache(std::optional<std::filesystem::path> dir = std::nullopt);

  std::optional<Embedding> get(std::string_view model_id, std::string_view text) const;
  void put(std::string_view model_id, std::string_view text, const Embedding& vec);
  std::size_t size() const;

  static void write_vector(const std::filesystem::path& path, const Embedding& vec);
  static std::optional<Embedding> read_vector(const std::filesystem::path& path);

 private:
  static std::string key(std::string_view model_id, std::string_view text);
  std::optional<std::filesystem::path> dir_;
  mutable std::shared_mutex mu_;
  mutable std::map<std::string, Embedding> entries_;
};

/// Pure ranking: similarity descending, ties by ascending ordinal, truncated
/// to k. `vectors[i]` is the embedding of `chunks[i]`.
std::vector<RankedChunk> rank_chunks(std::span<const float> query,
                                     std::span<const ManuscriptChunk> chunks,
                                     std::span<const Embedding> vectors, std::size_t k);

struct RetrievalStats {
  std::vector<std::string> embedded_digests;  // texts sent to the provider
  int requests = 0;
};

/// Embeds the comment's original text and every chunk lacking an embedding
/// (through the cache when given), then ranks. kEmptyCorpus for no chunks.
RetrievalResult retrieve_top_k(const Comment& comment, std::span<const ManuscriptChunk> chunks,
                               std::size_t k, Gateway& provider,
                               EmbeddingCache* cache = nullptr,
                               RetrievalStats* stats = nullptr);

}  // namespace rebuttal
