#include "rebuttal/retrieval.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <mutex>

#include "rebuttal/errors.hpp"
#include "rebuttal/text.hpp"

namespace rebuttal {

std::vector<ManuscriptChunk> chunk_by_paragraph(std::string_view body, std::size_t min_words) {
  std::vector<ManuscriptChunk> chunks;
  std::string pending;
  for (const auto& para : split_paragraphs(body)) {
    if (!pending.empty()) pending += "\n\n";
    pending += para;
    if (word_count(pending) >= min_words) {
      const auto ordinal = static_cast<std::uint32_t>(chunks.size());
      chunks.push_back({"p" + std::to_string(ordinal), ordinal, std::move(pending), std::nullopt});
      pending.clear();
    }
  }
  if (!pending.empty()) {
    if (chunks.empty()) {
      chunks.push_back({"p0", 0, std::move(pending), std::nullopt});
    } else {
      chunks.back().text += "\n\n" + pending;
    }
  }
  return chunks;
}

ManuscriptDocument make_manuscript(Id id, std::string title, std::string body) {
  ManuscriptDocument doc{std::move(id), std::move(title), std::move(body), {}};
  doc.chunks = chunk_by_paragraph(doc.body);
  return doc;
}

double cosine_similarity(std::span<const float> a, std::span<const float> b) {
  if (a.size() != b.size()) {
    throw Error(ErrorKind::kDimensionMismatch, "cosine over vectors of size " +
                                                   std::to_string(a.size()) + " and " +
                                                   std::to_string(b.size()));
  }
  double dot = 0, na = 0, nb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    dot += static_cast<double>(a[i]) * b[i];
    na += static_cast<double>(a[i]) * a[i];
    nb += static_cast<double>(b[i]) * b[i];
  }
  if (na == 0.0 || nb == 0.0) return 0.0;
  return std::clamp(dot / (std::sqrt(na) * std::sqrt(nb)), -1.0, 1.0);
}

// ---------------------------------------------------------------------------
// EmbeddingCache
// ---------------------------------------------------------------------------

namespace {

constexpr char kMagic[4] = {'R', 'E', 'M', 'B'};
constexpr std::uint32_t kVersion = 1;

void put_u32(std::ostream& out, std::uint32_t v) {
  const unsigned char b[4] = {static_cast<unsigned char>(v), static_cast<unsigned char>(v >> 8),
                              static_cast<unsigned char>(v >> 16),
                              static_cast<unsigned char>(v >> 24)};
  out.write(reinterpret_cast<const char*>(b), 4);
}

bool get_u32(std::istream& in, std::uint32_t& v) {
  unsigned char b[4];
  if (!in.read(reinterpret_cast<char*>(b), 4)) return false;
  v = b[0] | (b[1] << 8) | (b[2] << 16) | (static_cast<std::uint32_t>(b[3]) << 24);
  return true;
}

}  // namespace

EmbeddingCache::EmbeddingCache(std::optional<std::filesystem::path> dir) : dir_(std::move(dir)) {
  if (dir_) std::filesystem::create_directories(*dir_);
}

std::string EmbeddingCache::key(std::string_view model_id, std::string_view text) {
  return sha256_hex(std::string(model_id) + '\x1f' + sha256_hex(text));
}

void EmbeddingCache::write_vector(const std::filesystem::path& path, const Embedding& vec) {
  const auto tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    out.write(kMagic, 4);
    put_u32(out, kVersion);
    put_u32(out, static_cast<std::uint32_t>(vec.size()));
    put_u32(out, 0);
    for (float f : vec) put_u32(out, std::bit_cast<std::uint32_t>(f));
  }
  std::filesystem::rename(tmp, path);
}

std::optional<Embedding> EmbeddingCache::read_vector(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  char magic[4];
  std::uint32_t version = 0, dim = 0, reserved = 0;
  if (!in.read(magic, 4) || std::memcmp(magic, kMagic, 4) != 0) return std::nullopt;
  if (!get_u32(in, version) || version != kVersion || !get_u32(in, dim) ||
      !get_u32(in, reserved)) {
    return std::nullopt;
  }
  Embedding vec(dim);
  for (auto& f : vec) {
    std::uint32_t bits = 0;
    if (!get_u32(in, bits)) return std::nullopt;
    f = std::bit_cast<float>(bits);
  }
  return vec;
}

std::optional<Embedding> EmbeddingCache::get(std::string_view model_id,
                                             std::string_view text) const {
  const auto k = key(model_id, text);
  {
    std::shared_lock lock(mu_);
    if (auto it = entries_.find(k); it != entries_.end()) return it->second;
  }
  if (!dir_) return std::nullopt;
  auto vec = read_vector(*dir_ / (k + ".vec"));
  if (vec) {
    std::unique_lock lock(mu_);
    entries_.try_emplace(k, *vec);
  }
  return vec;
}

void EmbeddingCache::put(std::string_view model_id, std::string_view text, const Embedding& vec) {
  const auto k = key(model_id, text);
  std::unique_lock lock(mu_);
  if (!entries_.insert_or_assign(k, vec).second) return;
  if (dir_) write_vector(*dir_ / (k + ".vec"), vec);
}

std::size_t EmbeddingCache::size() const {
  std::shared_lock lock(mu_);
  return entries_.size();
}

// ---------------------------------------------------------------------------
// Ranking
// ---------------------------------------------------------------------------

std::vector<RankedChunk> rank_chunks(std::span<const float> query,
                                     std::span<const ManuscriptChunk> chunks,
                                     std::span<const Embedding> vectors, std::size_t k) {
  if (chunks.size() != vectors.size()) {
    throw Error(ErrorKind::kPrecondition, "one embedding per chunk is required");
  }
  std::vector<RankedChunk> ranked;
  ranked.reserve(chunks.size());
  for (std::size_t i = 0; i < chunks.size(); ++i) {
    ranked.push_back({chunks[i].id, chunks[i].ordinal, cosine_similarity(query, vectors[i]),
                      chunks[i].text});
  }
  const auto n = std::min(k, ranked.size());
  std::partial_sort(ranked.begin(), ranked.begin() + n, ranked.end(),
                    [](const RankedChunk& a, const RankedChunk& b) {
                      if (a.similarity != b.similarity) return a.similarity > b.similarity;
                      return a.ordinal < b.ordinal;
                    });
  ranked.resize(n);
  return ranked;
}

RetrievalResult retrieve_top_k(const Comment& comment, std::span<const ManuscriptChunk> chunks,
                               std::size_t k, Gateway& provider, EmbeddingCache* cache,
                               RetrievalStats* stats) {
  if (k == 0) throw Error(ErrorKind::kPrecondition, "k must be at least 1");
  if (chunks.empty()) throw Error(ErrorKind::kEmptyCorpus, "no manuscript chunks to rank");
  const auto& model = provider.config().embedding_model_id;

  // Slot 0 is the comment; slot i+1 is chunk i.
  std::vector<std::optional<Embedding>> vecs(chunks.size() + 1);
  std::vector<std::string> texts{comment.text};
  for (const auto& c : chunks) texts.push_back(c.text);
  std::vector<std::size_t> missing;
  for (std::size_t i = 0; i < texts.size(); ++i) {
    if (i > 0 && chunks[i - 1].embedding) {
      vecs[i] = *chunks[i - 1].embedding;
    } else if (cache) {
      vecs[i] = cache->get(model, texts[i]);
    }
    if (!vecs[i]) missing.push_back(i);
  }
  if (!missing.empty()) {
    std::vector<std::string> batch;
    for (auto i : missing) batch.push_back(texts[i]);
    auto fresh = provider.embed(batch, "retrieval");
    for (std::size_t j = 0; j < missing.size(); ++j) {
      if (cache) cache->put(model, batch[j], fresh[j]);
      if (stats) stats->embedded_digests.push_back(sha256_hex(batch[j]));
      vecs[missing[j]] = std::move(fresh[j]);
    }
    if (stats) {
      const auto limit = provider.config().embed_batch_limit;
      stats->requests += static_cast<int>((batch.size() + limit - 1) / limit);
    }
  }
  const auto dim = vecs[0]->size();
  std::vector<Embedding> chunk_vecs;
  for (std::size_t i = 1; i < vecs.size(); ++i) {
    if (vecs[i]->size() != dim) {
      throw Error(ErrorKind::kDimensionMismatch, "chunk embedding dimensionality differs");
    }
    chunk_vecs.push_back(std::move(*vecs[i]));
  }
  RetrievalResult result;
  result.comment_id = comment.id;
  result.k = k;
  result.ranked = rank_chunks(*vecs[0], chunks, chunk_vecs, k);
  return result;
}

}  // namespace rebuttal
