#ifndef MAVENS_PIPELINE_HPP
#define MAVENS_PIPELINE_HPP

#include <map>
#include <string>
#include <vector>

#include "mavens/agent_store.hpp"
#include "mavens/aqg.hpp"
#include "mavens/embedding.hpp"
#include "mavens/llm_gateway.hpp"
#include "mavens/moa.hpp"
#include "mavens/opinion_analysis.hpp"
#include "mavens/sentiment.hpp"

namespace mavens {

struct RunConfig {
  BackendSpec backend;
  BackendSpec judge_backend;  // defaults to `backend`
  EmbedderSpec embedder;
  AqgConfig aqg;
  RoleRoster roster;
  std::string kb_path = "kb";
  std::string language = "en";
  size_t chunk_size = 512;
  unsigned long long seed = 42;
  std::vector<std::string> deny_list;
  AdaptationConfig sentiment;
  AnalysisConfig analysis;
  std::string lexicon_path = "fixtures/seed_lexicon.tsv";
  std::string negator_path = "fixtures/negators.txt";
  std::string output_dir = "runs";
  unsigned long long eval_sample_seed = 1;

  /// Parse from a JSON config file; unknown keys rejected, missing keys
  /// keep defaults. MAVENS_BACKEND_URL overrides the backend endpoint.
  static RunConfig load(const std::string& path);
  static RunConfig from_json_text(const std::string& text);

  /// Stable digest over every config field.
  std::string digest() const;
};

struct IngestSummary {
  std::map<std::string, int> entities_per_domain;
  std::map<std::string, size_t> chunk_counts;  // entity_id -> chunks
  std::vector<std::string> failures;
};

struct PredictResult {
  std::string run_dir;
  QuestionSet questions;
  std::vector<RoleResponse> responses;
  std::vector<OpinionSentence> opinions;
  ClusteringResult clusters;
  SentimentReport sentiment;
  std::map<std::string, std::string> artifact_digests;
};

/// corpus/<domain>/<entity>.txt -> kb/<domain>/<entity>/...
IngestSummary cmd_ingest(const std::string& corpus_dir, const RunConfig& config);

/// Full topic run; writes questions/responses/opinions/clusters/sentiment
/// artifacts plus manifest.json under output_dir/<run_id>.
PredictResult cmd_predict(const std::string& topic, const RunConfig& config,
                          const std::string& run_id = "");

/// Judge-based evaluation over an existing run directory; writes
/// evaluation.json, CSV tables, and raw judge replies under audit/.
void cmd_eval(const std::string& run_dir, const RunConfig& config);

/// Single role, single question (debugging aid). Returns packaged_text.
std::string cmd_ask(const std::string& role_id, const std::string& question,
                    const RunConfig& config);

/// Build a gateway for a spec; a mock backend with no fixture file gets the
/// bundled default fixture table.
LlmGateway make_gateway(const BackendSpec& spec);

}  // namespace mavens

#endif
