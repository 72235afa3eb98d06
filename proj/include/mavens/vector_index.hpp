#ifndef MAVENS_VECTOR_INDEX_HPP
#define MAVENS_VECTOR_INDEX_HPP

#include <string>
#include <unordered_map>
#include <vector>

#include "mavens/embedding.hpp"

namespace mavens {

struct SearchHit {
  std::string id;
  double distance;
};

/// Exact flat index under squared L2. Insertion order is preserved and
/// breaks distance ties. Build single-writer, then treat as immutable.
class FlatIndex {
 public:
  explicit FlatIndex(size_t dims);

  void add(const std::string& id, const EmbeddingVector& v);
  std::vector<SearchHit> search_top_k(const EmbeddingVector& query, size_t k) const;

  size_t dims() const { return dims_; }
  size_t size() const { return ids_.size(); }
  const std::vector<std::string>& ids() const { return ids_; }
  const EmbeddingVector& vector_at(size_t i) const { return vectors_[i]; }
  const EmbeddingVector* find(const std::string& id) const;

  /// vectors.bin: header {magic "MVFI", version u32, dims u32, count u64},
  /// then count*dims little-endian f32. ids.txt: one id per line, same order.
  void save(const std::string& vectors_path, const std::string& ids_path) const;
  static FlatIndex load(const std::string& vectors_path, const std::string& ids_path);

 private:
  size_t dims_;
  std::vector<std::string> ids_;
  std::vector<EmbeddingVector> vectors_;
  std::unordered_map<std::string, size_t> by_id_;
};

}  // namespace mavens

#endif
