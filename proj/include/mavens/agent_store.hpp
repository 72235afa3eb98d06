#ifndef MAVENS_AGENT_STORE_HPP
#define MAVENS_AGENT_STORE_HPP

#include <string>
#include <vector>

#include "mavens/embedding.hpp"
#include "mavens/vector_index.hpp"

namespace mavens {

struct Chunk {
  std::string chunk_id;
  std::string text;
  size_t start = 0;  // char offsets into the source document
  size_t end = 0;
};

struct EntityAgent {
  std::string entity_id;  // pseudonym, never a source identity
  std::string domain;
  std::string language;
  size_t chunk_size = 512;
  std::vector<Chunk> chunks;
  FlatIndex index{1};

  const Chunk* chunk_by_id(const std::string& id) const;
};

struct GeneralizedRole {
  std::string role_id;
  std::string domain;
  std::vector<EntityAgent> entities;
};

struct RoleRoster {
  std::vector<std::string> domains = {"politics",      "economics", "technology",
                                      "society",       "entertainment",
                                      "military"};
  int entities_per_domain = 10;
};

/// Greedy fixed-length chunking with a soft break: a chunk ends at the last
/// sentence-terminal punctuation inside its window when one lies past the
/// midpoint, else hard-cuts at chunk_size (backing off to a UTF-8 boundary).
/// Chunk texts concatenate back to the document exactly.
std::vector<Chunk> chunk_text(const std::string& document, size_t chunk_size);

/// Chunk, scrub deny-listed raw identifiers, embed, and freeze the index.
EntityAgent build_entity(const std::string& entity_id, const std::string& domain,
                         const std::string& language, const std::string& document,
                         size_t chunk_size, const EmbedderSpec& embedder,
                         const std::vector<std::string>& deny_list = {});

/// kb/<domain>/<entity_id>/{meta.json, chunks.jsonl, vectors.bin, ids.txt}
void save_entity(const EntityAgent& entity, const std::string& kb_root);
EntityAgent load_entity(const std::string& entity_dir);

/// Load every entity under kb_root into per-domain generalized roles.
/// Throws FormatError on corrupt files, StageFailure on a missing layout.
std::vector<GeneralizedRole> load_roster(const std::string& kb_root,
                                         const RoleRoster& roster);

}  // namespace mavens

#endif
