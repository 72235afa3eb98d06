#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "mavens/agent_store.hpp"
#include "mavens/errors.hpp"

using namespace mavens;
namespace fs = std::filesystem;

namespace {

std::string concat_chunks(const std::vector<Chunk>& chunks) {
  std::string out;
  for (const Chunk& c : chunks) out += c.text;
  return out;
}

}  // namespace

TEST_CASE("chunk_text splits long unpunctuated text at the hard limit") {
  std::string doc(1000, 'a');
  auto chunks = chunk_text(doc, 512);
  REQUIRE(chunks.size() == 2);
  CHECK(chunks[0].text.size() == 512);
  CHECK(chunks[1].text.size() == 488);
  CHECK(chunks[0].chunk_id == "c0");
  CHECK(chunks[1].chunk_id == "c1");
  CHECK(chunks[0].start == 0);
  CHECK(chunks[0].end == 512);
  CHECK(chunks[1].start == 512);
  CHECK(chunks[1].end == 1000);
  CHECK(concat_chunks(chunks) == doc);
}

TEST_CASE("chunk_text keeps short documents whole") {
  CHECK(chunk_text("A. B. C.", 512).size() == 1);
  CHECK(chunk_text("A. B. C.", 512)[0].text == "A. B. C.");
  CHECK_THROWS_AS(chunk_text("", 512), InvalidInput);
  CHECK_THROWS_AS(chunk_text("x", 0), InvalidInput);
}

TEST_CASE("chunk_text prefers a sentence break past the window midpoint") {
  // period at position 300 (past midpoint of 400) should end the first chunk
  std::string doc = std::string(299, 'x') + "." + std::string(300, 'y');
  auto chunks = chunk_text(doc, 400);
  REQUIRE(chunks.size() >= 2);
  CHECK(chunks[0].text.size() == 300);
  CHECK(chunks[0].text.back() == '.');
  CHECK(concat_chunks(chunks) == doc);

  // a period before the midpoint does not win over the hard cut
  std::string early = std::string(99, 'x') + "." + std::string(500, 'y');
  auto echunks = chunk_text(early, 400);
  CHECK(echunks[0].text.size() == 400);
  CHECK(concat_chunks(echunks) == early);
}

TEST_CASE("chunk_text honors CJK sentence terminals and UTF-8 boundaries") {
  // "。" is 3 bytes; place it so it ends inside the window past the midpoint
  std::string doc = std::string(250, 'x') + "\xE3\x80\x82" + std::string(200, 'y');
  auto chunks = chunk_text(doc, 300);
  REQUIRE(chunks.size() >= 2);
  CHECK(chunks[0].text.size() == 253);
  CHECK(concat_chunks(chunks) == doc);

  // a hard cut never splits a multibyte character
  std::string cjk;
  for (int i = 0; i < 200; ++i) cjk += "\xE4\xB8\xAD";  // 3-byte char, no terminals
  auto cchunks = chunk_text(cjk, 100);
  CHECK(concat_chunks(cchunks) == cjk);
  for (const Chunk& c : cchunks) {
    CHECK(c.text.size() % 3 == 0);  // whole characters only
  }
}

TEST_CASE("random documents always reconstruct exactly") {
  std::string doc;
  for (int i = 0; i < 400; ++i) {
    doc += "Sentence number " + std::to_string(i) + " ends here";
    doc += (i % 3 == 0) ? ". " : (i % 3 == 1 ? "! " : "? ");
  }
  for (size_t size : {64, 128, 512, 2048}) {
    auto chunks = chunk_text(doc, size);
    CHECK(concat_chunks(chunks) == doc);
    size_t expect_start = 0;
    for (const Chunk& c : chunks) {
      CHECK(c.start == expect_start);
      CHECK(c.end == c.start + c.text.size());
      CHECK(c.text.size() <= size);
      expect_start = c.end;
    }
  }
}

TEST_CASE("build_entity embeds every chunk and scrubs deny-listed names") {
  EmbedderSpec embedder;
  embedder.dims = 32;
  std::string doc =
      "Alice Zhang wrote about markets. Prices rose sharply last year. "
      "Alice Zhang expects a correction soon.";
  EntityAgent e = build_entity("econ-01", "economics", "en", doc, 64, embedder,
                               {"Alice Zhang"});
  CHECK(e.entity_id == "econ-01");
  CHECK(e.domain == "economics");
  CHECK(e.chunks.size() == e.index.size());
  for (const Chunk& c : e.chunks) {
    CHECK(c.text.find("Alice Zhang") == std::string::npos);
    CHECK(e.index.find(c.chunk_id) != nullptr);
    CHECK(e.chunk_by_id(c.chunk_id) == &c);
  }
  CHECK(e.chunk_by_id("missing") == nullptr);
  CHECK_THROWS_AS(build_entity("x", "economics", "en", "", 64, embedder),
                  InvalidInput);
}

TEST_CASE("save/load entity round-trip preserves everything") {
  fs::path kb = fs::temp_directory_path() / "mavens_kb_test";
  fs::remove_all(kb);
  EmbedderSpec embedder;
  embedder.dims = 16;
  std::string doc =
      "Defense budgets grew again. Analysts disagree about the cause. "
      "Procurement reform remains slow across several programs.";
  EntityAgent e = build_entity("mil-03", "military", "en", doc, 80, embedder);
  save_entity(e, kb.string());

  fs::path dir = kb / "military" / "mil-03";
  CHECK(fs::exists(dir / "meta.json"));
  CHECK(fs::exists(dir / "chunks.jsonl"));
  CHECK(fs::exists(dir / "vectors.bin"));
  CHECK(fs::exists(dir / "ids.txt"));

  EntityAgent loaded = load_entity(dir.string());
  CHECK(loaded.entity_id == e.entity_id);
  CHECK(loaded.domain == e.domain);
  CHECK(loaded.language == e.language);
  CHECK(loaded.chunk_size == e.chunk_size);
  REQUIRE(loaded.chunks.size() == e.chunks.size());
  for (size_t i = 0; i < e.chunks.size(); ++i) {
    CHECK(loaded.chunks[i].chunk_id == e.chunks[i].chunk_id);
    CHECK(loaded.chunks[i].text == e.chunks[i].text);
    CHECK(loaded.chunks[i].start == e.chunks[i].start);
    CHECK(loaded.chunks[i].end == e.chunks[i].end);
  }
  REQUIRE(loaded.index.size() == e.index.size());
  for (size_t i = 0; i < e.index.size(); ++i) {
    CHECK(loaded.index.vector_at(i) == e.index.vector_at(i));
  }
  fs::remove_all(kb);
}

TEST_CASE("load_entity validates metadata against the stored vectors") {
  fs::path kb = fs::temp_directory_path() / "mavens_kb_corrupt";
  fs::remove_all(kb);
  EmbedderSpec embedder;
  embedder.dims = 8;
  EntityAgent e = build_entity("soc-01", "society", "en",
                               "People moved to the suburbs. Rents fell.", 64,
                               embedder);
  save_entity(e, kb.string());
  fs::path dir = kb / "society" / "soc-01";

  // tamper with the declared dims
  std::ifstream in(dir / "meta.json");
  std::string meta((std::istreambuf_iterator<char>(in)),
                   std::istreambuf_iterator<char>());
  in.close();
  size_t pos = meta.find("8");
  REQUIRE(pos != std::string::npos);
  meta.replace(pos, 1, "9");
  std::ofstream out(dir / "meta.json");
  out << meta;
  out.close();
  CHECK_THROWS_AS(load_entity(dir.string()), FormatError);
  fs::remove_all(kb);
}

TEST_CASE("load_roster groups entities into per-domain roles") {
  fs::path kb = fs::temp_directory_path() / "mavens_kb_roster";
  fs::remove_all(kb);
  EmbedderSpec embedder;
  embedder.dims = 8;
  RoleRoster roster;
  roster.domains = {"economics", "technology"};
  roster.entities_per_domain = 2;
  for (const std::string& d : roster.domains) {
    for (int i = 0; i < 2; ++i) {
      std::string id = d.substr(0, 4) + "-" + std::to_string(i);
      EntityAgent e = build_entity(id, d, "en",
                                   "Some text about " + d + " trends. More text.",
                                   64, embedder);
      save_entity(e, kb.string());
    }
  }
  auto roles = load_roster(kb.string(), roster);
  REQUIRE(roles.size() == 2);
  CHECK(roles[0].role_id == "role-economics");
  CHECK(roles[0].domain == "economics");
  CHECK(roles[0].entities.size() == 2);
  CHECK(roles[0].entities[0].entity_id == "econ-0");
  CHECK(roles[1].role_id == "role-technology");

  // a missing domain directory is a stage failure
  RoleRoster bigger = roster;
  bigger.domains.push_back("politics");
  CHECK_THROWS_AS(load_roster(kb.string(), bigger), StageFailure);

  // an entity-count mismatch is a stage failure too
  RoleRoster wrong = roster;
  wrong.entities_per_domain = 3;
  CHECK_THROWS_AS(load_roster(kb.string(), wrong), StageFailure);
  fs::remove_all(kb);
}
