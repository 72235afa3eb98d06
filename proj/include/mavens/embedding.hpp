#ifndef MAVENS_EMBEDDING_HPP
#define MAVENS_EMBEDDING_HPP

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

namespace mavens {

using EmbeddingVector = std::vector<float>;

enum class EmbedderKind { DeterministicLocal, RemoteService };

struct EmbedderSpec {
  EmbedderKind kind = EmbedderKind::DeterministicLocal;
  size_t dims = 384;
  std::optional<std::string> endpoint;  // required for RemoteService
  std::string model_name = "local-hash-v1";

  void validate() const;
};

/// Embed a single text. The deterministic-local embedder hashes character
/// 2-/3-grams into `dims` signed buckets and L2-normalizes; identical input
/// gives identical output on every platform. The remote embedder speaks a
/// POST /v1/embeddings protocol (body {"input": [...], "model": ...}).
EmbeddingVector embed(const std::string& text, const EmbedderSpec& spec);

/// Batch form; one vector per input text, order preserved.
std::vector<EmbeddingVector> embed_batch(const std::vector<std::string>& texts,
                                         const EmbedderSpec& spec);

/// Squared L2 distance, the ranking metric for all retrieval steps.
double l2_sq(const EmbeddingVector& a, const EmbeddingVector& b);

}  // namespace mavens

#endif
