#include "mavens/vector_index.hpp"

#include <algorithm>
#include <cstring>
#include <fstream>

#include "mavens/errors.hpp"

namespace mavens {
namespace {

constexpr char kMagic[4] = {'M', 'V', 'F', 'I'};
constexpr uint32_t kVersion = 1;

// The on-disk format is little-endian; this assumes a little-endian host,
// which covers every platform this project targets.
template <typename T>
void write_pod(std::ostream& out, T v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(v));
}

template <typename T>
T read_pod(std::istream& in) {
  T v{};
  in.read(reinterpret_cast<char*>(&v), sizeof(v));
  return v;
}

}  // namespace

FlatIndex::FlatIndex(size_t dims) : dims_(dims) {
  if (dims < 1) throw InvalidInput("FlatIndex: dims must be >= 1");
}

void FlatIndex::add(const std::string& id, const EmbeddingVector& v) {
  if (v.size() != dims_) {
    throw InvalidInput("FlatIndex::add: dimension mismatch for id " + id);
  }
  if (by_id_.count(id)) {
    throw InvalidInput("FlatIndex::add: duplicate id " + id);
  }
  by_id_.emplace(id, ids_.size());
  ids_.push_back(id);
  vectors_.push_back(v);
}

const EmbeddingVector* FlatIndex::find(const std::string& id) const {
  auto it = by_id_.find(id);
  return it == by_id_.end() ? nullptr : &vectors_[it->second];
}

std::vector<SearchHit> FlatIndex::search_top_k(const EmbeddingVector& query,
                                               size_t k) const {
  if (query.size() != dims_) {
    throw InvalidInput("FlatIndex::search_top_k: query dimension mismatch");
  }
  std::vector<std::pair<double, size_t>> scored;
  scored.reserve(vectors_.size());
  for (size_t i = 0; i < vectors_.size(); ++i) {
    scored.emplace_back(l2_sq(query, vectors_[i]), i);
  }
  size_t take = std::min(k, scored.size());
  // stable ordering: ascending distance, ties by insertion index
  std::partial_sort(scored.begin(), scored.begin() + take, scored.end());
  std::vector<SearchHit> out;
  out.reserve(take);
  for (size_t i = 0; i < take; ++i) {
    out.push_back({ids_[scored[i].second], scored[i].first});
  }
  return out;
}

void FlatIndex::save(const std::string& vectors_path,
                     const std::string& ids_path) const {
  std::ofstream vout(vectors_path, std::ios::binary | std::ios::trunc);
  if (!vout) throw FormatError("cannot write " + vectors_path);
  vout.write(kMagic, 4);
  write_pod<uint32_t>(vout, kVersion);
  write_pod<uint32_t>(vout, uint32_t(dims_));
  write_pod<uint64_t>(vout, uint64_t(vectors_.size()));
  for (const auto& v : vectors_) {
    vout.write(reinterpret_cast<const char*>(v.data()),
               std::streamsize(v.size() * sizeof(float)));
  }
  if (!vout) throw FormatError("short write to " + vectors_path);

  std::ofstream iout(ids_path, std::ios::binary | std::ios::trunc);
  if (!iout) throw FormatError("cannot write " + ids_path);
  for (const auto& id : ids_) iout << id << '\n';
  if (!iout) throw FormatError("short write to " + ids_path);
}

FlatIndex FlatIndex::load(const std::string& vectors_path,
                          const std::string& ids_path) {
  std::ifstream vin(vectors_path, std::ios::binary);
  if (!vin) throw FormatError("cannot open " + vectors_path);
  char magic[4];
  vin.read(magic, 4);
  if (!vin || std::memcmp(magic, kMagic, 4) != 0) {
    throw FormatError("bad magic in " + vectors_path);
  }
  uint32_t version = read_pod<uint32_t>(vin);
  if (version != kVersion) {
    throw FormatError("unsupported vector file version in " + vectors_path);
  }
  uint32_t dims = read_pod<uint32_t>(vin);
  uint64_t count = read_pod<uint64_t>(vin);
  if (!vin || dims == 0) throw FormatError("bad header in " + vectors_path);

  std::ifstream iin(ids_path);
  if (!iin) throw FormatError("cannot open " + ids_path);
  std::vector<std::string> ids;
  std::string line;
  while (std::getline(iin, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    ids.push_back(line);
  }
  if (ids.size() != count) {
    throw FormatError("id manifest count mismatch for " + vectors_path);
  }

  FlatIndex index(dims);
  EmbeddingVector v(dims);
  for (uint64_t i = 0; i < count; ++i) {
    vin.read(reinterpret_cast<char*>(v.data()),
             std::streamsize(dims * sizeof(float)));
    if (!vin) throw FormatError("truncated vector data in " + vectors_path);
    index.add(ids[size_t(i)], v);
  }
  return index;
}

}  // namespace mavens
