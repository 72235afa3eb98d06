#include "mavens/moa.hpp"

#include <algorithm>

#include "mavens/errors.hpp"

namespace mavens {
namespace {

std::string trim(const std::string& s) {
  size_t a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  size_t b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

}  // namespace

MoaTemplates MoaTemplates::defaults() {
  MoaTemplates t;
  t.translation.system =
      "You are a translator. Translate the received question into {language}. "
      "Reply with the {language} question only, nothing else.";
  t.translation.user = "Translate to {language}: {question}";
  t.answer.system =
      "You are an opinion leader sharing your view on current events. "
      "Answer the question in your own voice, grounded in the reference "
      "material when it is relevant.";
  t.answer.user = "Question: {question}\n\nReference material:\n{context}";
  return t;
}

std::string translate_question(const Question& q, const std::string& source_language,
                               const std::string& target_language,
                               LlmGateway& backend, const MoaTemplates& templates) {
  if (trim(q.text).empty()) throw InvalidInput("translate_question: empty question");
  if (target_language == source_language) return q.text;
  auto [system, user] = templates.translation.render(
      {{"language", target_language}, {"question", q.text}});
  std::string text = backend.complete({system, user});
  if (trim(text).empty()) {
    throw StageFailure("translation", "empty translation for: " + q.text);
  }
  return text;
}

std::vector<RetrievedChunk> retrieve_context(const EntityAgent& entity,
                                             const EmbeddingVector& question_vec,
                                             size_t k) {
  std::vector<RetrievedChunk> out;
  if (entity.index.size() == 0) return out;
  for (const SearchHit& hit : entity.index.search_top_k(question_vec, k)) {
    const Chunk* chunk = entity.chunk_by_id(hit.id);
    if (!chunk) throw FormatError("retrieved chunk id missing: " + hit.id);
    out.push_back({hit.id, chunk->text, hit.distance});
  }
  return out;
}

EntityResponse answer_as_entity(const EntityAgent& entity,
                                const std::string& question_text,
                                const std::vector<RetrievedChunk>& context,
                                LlmGateway& backend, const MoaTemplates& templates) {
  if (trim(question_text).empty()) {
    throw InvalidInput("answer_as_entity: empty question");
  }
  std::string context_text;
  for (const RetrievedChunk& c : context) {
    if (!context_text.empty()) context_text += "\n\n";
    context_text += c.text;
  }
  if (context_text.empty()) context_text = "(no reference material available)";

  auto [system, user] = templates.answer.render(
      {{"question", question_text}, {"context", context_text}});
  EntityResponse resp;
  resp.entity_id = entity.entity_id;
  resp.question_text = question_text;
  for (const RetrievedChunk& c : context) resp.retrieved_chunk_ids.push_back(c.chunk_id);
  resp.response_text = backend.complete({system, user});
  resp.hidden = true;
  return resp;
}

RoleResponse run_role(const GeneralizedRole& role, const Question& q,
                      const MoaConfig& cfg, LlmGateway& backend,
                      const MoaTemplates& templates, const EmbedderSpec& embedder) {
  if (role.entities.empty()) {
    throw InvalidInput("run_role: role has no entities");
  }
  RoleResponse out;
  out.role_id = role.role_id;
  out.domain = role.domain;
  out.question = q;

  // One translation per (role language, question); entities of a role share
  // a language, so translate against the first entity's language.
  const std::string& target_language = role.entities.front().language;
  std::string translated =
      translate_question(q, cfg.question_language, target_language, backend, templates);
  EmbeddingVector qvec = embed(translated, embedder);

  for (const EntityAgent& entity : role.entities) {
    try {
      auto context = retrieve_context(entity, qvec, size_t(cfg.retrieval_k));
      out.entity_responses.push_back(
          answer_as_entity(entity, translated, context, backend, templates));
    } catch (const std::exception&) {
      out.failed_entities.push_back(entity.entity_id);
    }
  }
  if (out.entity_responses.empty()) {
    throw StageFailure("moa", "all entities failed for role " + role.role_id);
  }

  std::sort(out.entity_responses.begin(), out.entity_responses.end(),
            [](const EntityResponse& a, const EntityResponse& b) {
              return a.entity_id < b.entity_id;
            });
  for (const EntityResponse& r : out.entity_responses) {
    if (!out.packaged_text.empty()) out.packaged_text += cfg.packaging_delimiter;
    out.packaged_text += r.response_text;
  }
  return out;
}

}  // namespace mavens
