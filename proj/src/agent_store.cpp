#include "mavens/agent_store.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>

#include <nlohmann/json.hpp>

#include "mavens/errors.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace mavens {
namespace {

// Sentence-terminal punctuation: ASCII .!? and the CJK fullwidth forms
// 。(E3 80 82) ！(EF BC 81) ？(EF BC 9F). Returns the byte position just
// past a terminator ending at or before `limit`, or npos.
size_t last_terminal_before(const std::string& s, size_t begin, size_t limit) {
  size_t best = std::string::npos;
  for (size_t i = begin; i < limit; ++i) {
    char c = s[i];
    if (c == '.' || c == '!' || c == '?') {
      best = i + 1;
    } else if (i + 2 < limit) {
      if ((uint8_t(s[i]) == 0xE3 && uint8_t(s[i + 1]) == 0x80 &&
           uint8_t(s[i + 2]) == 0x82) ||
          (uint8_t(s[i]) == 0xEF && uint8_t(s[i + 1]) == 0xBC &&
           (uint8_t(s[i + 2]) == 0x81 || uint8_t(s[i + 2]) == 0x9F))) {
        best = i + 3;
      }
    }
  }
  return best;
}

size_t utf8_backoff(const std::string& s, size_t pos) {
  while (pos > 0 && (uint8_t(s[pos]) & 0xC0) == 0x80) --pos;
  return pos;
}

std::string scrub(std::string text, const std::vector<std::string>& deny_list) {
  for (const std::string& term : deny_list) {
    if (term.empty()) continue;
    size_t pos = 0;
    while ((pos = text.find(term, pos)) != std::string::npos) {
      text.erase(pos, term.size());
    }
  }
  return text;
}

void atomic_write(const fs::path& path, const std::string& content) {
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw FormatError("cannot write " + path.string());
    out << content;
  }
  fs::rename(tmp, path);
}

}  // namespace

const Chunk* EntityAgent::chunk_by_id(const std::string& id) const {
  for (const Chunk& c : chunks) {
    if (c.chunk_id == id) return &c;
  }
  return nullptr;
}

std::vector<Chunk> chunk_text(const std::string& document, size_t chunk_size) {
  if (document.empty()) throw InvalidInput("chunk_text: empty document");
  if (chunk_size < 32) throw InvalidInput("chunk_text: chunk_size must be >= 32");
  std::vector<Chunk> chunks;
  size_t pos = 0;
  while (pos < document.size()) {
    size_t end;
    if (document.size() - pos <= chunk_size) {
      end = document.size();
    } else {
      size_t limit = pos + chunk_size;
      size_t soft = last_terminal_before(document, pos, limit);
      if (soft != std::string::npos && soft > pos + chunk_size / 2) {
        end = soft;
      } else {
        end = utf8_backoff(document, limit);
        if (end <= pos) end = limit;  // degenerate long byte run
      }
    }
    Chunk c;
    c.chunk_id = "c" + std::to_string(chunks.size());
    c.text = document.substr(pos, end - pos);
    c.start = pos;
    c.end = end;
    chunks.push_back(std::move(c));
    pos = end;
  }
  return chunks;
}

EntityAgent build_entity(const std::string& entity_id, const std::string& domain,
                         const std::string& language, const std::string& document,
                         size_t chunk_size, const EmbedderSpec& embedder,
                         const std::vector<std::string>& deny_list) {
  if (entity_id.empty()) throw InvalidInput("build_entity: empty entity_id");
  std::string clean = scrub(document, deny_list);
  if (clean.empty()) throw InvalidInput("build_entity: document empty after scrub");

  EntityAgent entity;
  entity.entity_id = entity_id;
  entity.domain = domain;
  entity.language = language;
  entity.chunk_size = chunk_size;
  entity.chunks = chunk_text(clean, chunk_size);
  entity.index = FlatIndex(embedder.dims);
  for (const Chunk& c : entity.chunks) {
    entity.index.add(c.chunk_id, embed(c.text, embedder));
  }
  return entity;
}

void save_entity(const EntityAgent& entity, const std::string& kb_root) {
  fs::path dir = fs::path(kb_root) / entity.domain / entity.entity_id;
  fs::create_directories(dir);

  json meta = {{"entity_id", entity.entity_id},
               {"domain", entity.domain},
               {"language", entity.language},
               {"chunk_size", entity.chunk_size},
               {"dims", entity.index.dims()},
               {"chunk_count", entity.chunks.size()}};
  atomic_write(dir / "meta.json", meta.dump(2) + "\n");

  std::string lines;
  for (const Chunk& c : entity.chunks) {
    json rec = {{"chunk_id", c.chunk_id},
                {"text", c.text},
                {"start", c.start},
                {"end", c.end}};
    lines += rec.dump() + "\n";
  }
  atomic_write(dir / "chunks.jsonl", lines);

  entity.index.save((dir / "vectors.bin").string(), (dir / "ids.txt").string());
}

EntityAgent load_entity(const std::string& entity_dir) {
  fs::path dir(entity_dir);
  std::ifstream meta_in(dir / "meta.json");
  if (!meta_in) throw StageFailure("load", "missing " + (dir / "meta.json").string());
  json meta = json::parse(meta_in);

  EntityAgent entity;
  entity.entity_id = meta.at("entity_id").get<std::string>();
  entity.domain = meta.at("domain").get<std::string>();
  entity.language = meta.at("language").get<std::string>();
  entity.chunk_size = meta.at("chunk_size").get<size_t>();

  std::ifstream chunks_in(dir / "chunks.jsonl");
  if (!chunks_in) throw StageFailure("load", "missing " + (dir / "chunks.jsonl").string());
  std::string line;
  while (std::getline(chunks_in, line)) {
    if (line.empty()) continue;
    json rec = json::parse(line);
    entity.chunks.push_back({rec.at("chunk_id").get<std::string>(),
                             rec.at("text").get<std::string>(),
                             rec.at("start").get<size_t>(),
                             rec.at("end").get<size_t>()});
  }

  entity.index =
      FlatIndex::load((dir / "vectors.bin").string(), (dir / "ids.txt").string());
  if (entity.index.dims() != meta.at("dims").get<size_t>()) {
    throw FormatError("dims mismatch between meta.json and vectors.bin in " +
                      entity_dir);
  }
  if (entity.index.size() != entity.chunks.size() ||
      entity.chunks.size() != meta.at("chunk_count").get<size_t>()) {
    throw FormatError("chunk/vector count mismatch in " + entity_dir);
  }
  return entity;
}

std::vector<GeneralizedRole> load_roster(const std::string& kb_root,
                                         const RoleRoster& roster) {
  std::vector<GeneralizedRole> roles;
  for (const std::string& domain : roster.domains) {
    fs::path domain_dir = fs::path(kb_root) / domain;
    if (!fs::is_directory(domain_dir)) {
      throw StageFailure("load", "missing domain directory " + domain_dir.string());
    }
    GeneralizedRole role;
    role.role_id = "role-" + domain;
    role.domain = domain;
    std::vector<std::string> entity_dirs;
    for (const auto& entry : fs::directory_iterator(domain_dir)) {
      if (entry.is_directory()) entity_dirs.push_back(entry.path().string());
    }
    std::sort(entity_dirs.begin(), entity_dirs.end());
    for (const std::string& dir : entity_dirs) {
      role.entities.push_back(load_entity(dir));
    }
    if (int(role.entities.size()) != roster.entities_per_domain) {
      throw StageFailure("load", "expected " +
                                     std::to_string(roster.entities_per_domain) +
                                     " entities in " + domain_dir.string() +
                                     ", found " +
                                     std::to_string(role.entities.size()));
    }
    roles.push_back(std::move(role));
  }
  return roles;
}

}  // namespace mavens
