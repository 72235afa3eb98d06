#include <doctest.h>

#include <algorithm>

#include "mavens/errors.hpp"
#include "mavens/moa.hpp"
#include "mavens/testkit.hpp"

using namespace mavens;

namespace {

LlmGateway mock_gateway(std::map<std::string, std::string> fixtures) {
  BackendSpec spec;
  spec.kind = BackendKind::Mock;
  LlmGateway gw(spec);
  gw.set_fixtures(std::move(fixtures));
  return gw;
}

EntityAgent make_entity(const std::string& id, const std::string& domain,
                        const std::string& language, const std::string& doc,
                        const EmbedderSpec& embedder) {
  return build_entity(id, domain, language, doc, 64, embedder);
}

}  // namespace

TEST_CASE("translation is skipped entirely when languages match") {
  // no fixtures loaded: any backend call would throw FixtureMiss
  LlmGateway gw = mock_gateway({});
  Question q{"What happened to grain exports?", QuestionFormat::What, "t"};
  std::string out = translate_question(q, "en", "en", gw, MoaTemplates::defaults());
  CHECK(out == q.text);
  CHECK(gw.stats().backend_calls == 0);
}

TEST_CASE("translation calls the backend when languages differ") {
  LlmGateway gw = mock_gateway({{"Translate to ", "{{user}}"}});
  Question q{"What happened to grain exports?", QuestionFormat::What, "t"};
  std::string out = translate_question(q, "en", "zh", gw, MoaTemplates::defaults());
  CHECK(gw.stats().backend_calls == 1);
  CHECK(out.find(q.text) != std::string::npos);

  Question empty{"  ", QuestionFormat::What, "t"};
  CHECK_THROWS_AS(translate_question(empty, "en", "zh", gw, MoaTemplates::defaults()),
                  InvalidInput);
}

TEST_CASE("retrieve_context returns the k nearest chunks with their text") {
  EmbedderSpec embedder;
  embedder.dims = 16;
  std::string doc =
      "Grain exports fell sharply this season. "
      "Port congestion delayed several shipments badly. "
      "A new rail line opened in the north region.";
  EntityAgent e = make_entity("econ-00", "economics", "en", doc, embedder);
  REQUIRE(e.chunks.size() >= 2);

  EmbeddingVector qvec = embed("What happened to grain exports?", embedder);
  auto got = retrieve_context(e, qvec, 2);
  REQUIRE(got.size() == 2);

  // oracle: brute-force over the entity's own chunks
  std::vector<std::pair<std::string, EmbeddingVector>> entries;
  for (const Chunk& c : e.chunks) entries.emplace_back(c.chunk_id, embed(c.text, embedder));
  auto expected = testkit::brute_force_topk(entries, qvec, 2);
  for (size_t i = 0; i < got.size(); ++i) {
    CHECK(got[i].chunk_id == expected[i].first);
    CHECK(got[i].distance == expected[i].second);
    CHECK(got[i].text == e.chunk_by_id(got[i].chunk_id)->text);
  }

  // empty library: no hits, no error
  EntityAgent bare;
  bare.entity_id = "bare";
  CHECK(retrieve_context(bare, qvec, 2).empty());
}

TEST_CASE("answer_as_entity fills the prompt and records retrieval ids") {
  EmbedderSpec embedder;
  embedder.dims = 16;
  EntityAgent e = make_entity("tech-01", "technology", "en",
                              "Chip supply recovered. Prices should ease soon.",
                              embedder);
  LlmGateway gw = mock_gateway({{"Question: ", "my considered answer"}});
  auto context = retrieve_context(e, embed("What about chips?", embedder), 1);
  EntityResponse r =
      answer_as_entity(e, "What about chips?", context, gw, MoaTemplates::defaults());
  CHECK(r.entity_id == "tech-01");
  CHECK(r.response_text == "my considered answer");
  CHECK(r.hidden);
  REQUIRE(r.retrieved_chunk_ids.size() == 1);
  CHECK(e.chunk_by_id(r.retrieved_chunk_ids[0]) != nullptr);

  // with no context the prompt still renders (placeholder material)
  LlmGateway echo = mock_gateway({{"Question: ", "{{user}}"}});
  EntityResponse bare =
      answer_as_entity(e, "What about chips?", {}, echo, MoaTemplates::defaults());
  CHECK(bare.response_text.find("(no reference material available)") !=
        std::string::npos);
  CHECK(bare.retrieved_chunk_ids.empty());
}

TEST_CASE("run_role packages responses in entity-id order without ids") {
  EmbedderSpec embedder;
  embedder.dims = 16;
  GeneralizedRole role;
  role.role_id = "role-economics";
  role.domain = "economics";
  // insert out of id order to prove the package sorts
  role.entities.push_back(make_entity("econ-02", "economics", "en",
                                      "Inflation cooled slightly last month.",
                                      embedder));
  role.entities.push_back(make_entity("econ-01", "economics", "en",
                                      "Wage growth is still strong overall.",
                                      embedder));

  LlmGateway gw = mock_gateway({{"Question: ", "view {{hash}}"}});
  MoaConfig cfg;
  Question q{"What will inflation do next?", QuestionFormat::What, "t"};
  RoleResponse out = run_role(role, q, cfg, gw, MoaTemplates::defaults(), embedder);

  REQUIRE(out.entity_responses.size() == 2);
  CHECK(out.entity_responses[0].entity_id == "econ-01");
  CHECK(out.entity_responses[1].entity_id == "econ-02");
  CHECK(out.failed_entities.empty());
  CHECK(out.packaged_text == out.entity_responses[0].response_text + "\n\n" +
                                 out.entity_responses[1].response_text);
  CHECK(out.packaged_text.find("econ-01") == std::string::npos);
  CHECK(out.packaged_text.find("econ-02") == std::string::npos);

  // every retrieved id belongs to the responding entity itself
  for (const EntityResponse& r : out.entity_responses) {
    const EntityAgent* owner = nullptr;
    for (const EntityAgent& e : role.entities) {
      if (e.entity_id == r.entity_id) owner = &e;
    }
    REQUIRE(owner != nullptr);
    for (const std::string& id : r.retrieved_chunk_ids) {
      CHECK(owner->chunk_by_id(id) != nullptr);
    }
  }
}

TEST_CASE("a failing entity is recorded, not fatal; all failing is fatal") {
  EmbedderSpec embedder;
  embedder.dims = 16;
  GeneralizedRole role;
  role.role_id = "role-society";
  role.domain = "society";
  role.entities.push_back(make_entity("soc-01", "society", "en",
                                      "Urban rents rose again this quarter.",
                                      embedder));
  // an entity with a mismatched index dimension fails at retrieval time
  EntityAgent broken = make_entity("soc-02", "society", "en",
                                  "Rural schools closed in three counties.",
                                  embedder);
  broken.index = FlatIndex(8);
  broken.index.add("c0", EmbeddingVector(8, 0.0f));
  role.entities.push_back(broken);

  LlmGateway gw = mock_gateway({{"Question: ", "an answer"}});
  MoaConfig cfg;
  Question q{"How are communities changing?", QuestionFormat::How, "t"};
  RoleResponse out = run_role(role, q, cfg, gw, MoaTemplates::defaults(), embedder);
  REQUIRE(out.entity_responses.size() == 1);
  CHECK(out.entity_responses[0].entity_id == "soc-01");
  CHECK(out.failed_entities == std::vector<std::string>{"soc-02"});

  // no fixtures: every entity fails to answer -> stage failure
  LlmGateway empty_gw = mock_gateway({});
  CHECK_THROWS_AS(run_role(role, q, cfg, empty_gw, MoaTemplates::defaults(), embedder),
                  StageFailure);

  GeneralizedRole hollow;
  hollow.role_id = "role-x";
  CHECK_THROWS_AS(run_role(hollow, q, cfg, gw, MoaTemplates::defaults(), embedder),
                  InvalidInput);
}
