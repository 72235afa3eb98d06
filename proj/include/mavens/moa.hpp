#ifndef MAVENS_MOA_HPP
#define MAVENS_MOA_HPP

#include <map>
#include <string>
#include <vector>

#include "mavens/agent_store.hpp"
#include "mavens/aqg.hpp"
#include "mavens/llm_gateway.hpp"

namespace mavens {

struct EntityResponse {
  std::string entity_id;
  std::string question_text;  // post-translation
  std::vector<std::string> retrieved_chunk_ids;
  std::string response_text;
  bool hidden = true;  // individual responses never leave the package step
};

struct RoleResponse {
  std::string role_id;
  std::string domain;
  Question question;
  std::vector<EntityResponse> entity_responses;
  std::string packaged_text;  // entity-id order, fixed delimiter, no ids
  std::vector<std::string> failed_entities;
};

struct RetrievedChunk {
  std::string chunk_id;
  std::string text;
  double distance;
};

struct MoaTemplates {
  PromptTemplate translation;  // {language}, {question}
  PromptTemplate answer;       // {question}, {context}
  static MoaTemplates defaults();
};

struct MoaConfig {
  int retrieval_k = 2;
  std::string question_language = "en";  // language of AQG output
  std::string packaging_delimiter = "\n\n";
};

/// Translate once per (question, language); identity (no backend call) when
/// the target matches the question language.
std::string translate_question(const Question& q, const std::string& source_language,
                               const std::string& target_language,
                               LlmGateway& backend, const MoaTemplates& templates);

std::vector<RetrievedChunk> retrieve_context(const EntityAgent& entity,
                                             const EmbeddingVector& question_vec,
                                             size_t k);

EntityResponse answer_as_entity(const EntityAgent& entity,
                                const std::string& question_text,
                                const std::vector<RetrievedChunk>& context,
                                LlmGateway& backend, const MoaTemplates& templates);

/// Fan a question out to every entity of a role and package the hidden
/// responses into one id-free text.
RoleResponse run_role(const GeneralizedRole& role, const Question& q,
                      const MoaConfig& cfg, LlmGateway& backend,
                      const MoaTemplates& templates, const EmbedderSpec& embedder);

}  // namespace mavens

#endif
