#ifndef MAVENS_EVALUATION_HPP
#define MAVENS_EVALUATION_HPP

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "mavens/aqg.hpp"
#include "mavens/llm_gateway.hpp"

namespace mavens {

enum class JudgeDim { RBT, RQQ, RBQ, RAW, CUS, SPE, SIM };

std::string judge_dim_name(JudgeDim dim);

/// Score bounds per dimension: RBT/RQQ/RBQ are 1..10, RAW/CUS/SPE/SIM 0..10.
std::pair<int, int> judge_scale(JudgeDim dim);

PromptTemplate judge_prompt(JudgeDim dim);

struct JudgeScore {
  JudgeDim dimension;
  std::string subject_id;
  std::string raw_reply;
  int score = 0;
};

struct CellStats {
  double mean = 0.0;
  std::optional<double> variance;  // population variance, multi-rater only
  size_t n = 0;
};

struct ScoreTable {
  // group -> dimension name -> stats
  std::map<std::string, std::map<std::string, CellStats>> rows;
  std::vector<std::string> group_order;
  std::vector<std::string> dim_order;
};

/// Extract the first in-range integer from a judge reply.
std::optional<int> parse_score(const std::string& reply, JudgeDim dim);

/// One judge call; on an unparseable reply, retry once with a constrained
/// instruction, then throw StageFailure so the caller can exclude the row.
JudgeScore judge(JudgeDim dim, const std::map<std::string, std::string>& bindings,
                 const std::string& subject_id, LlmGateway& backend);

struct ScoreRecord {
  std::string group;
  JudgeDim dimension;
  std::vector<int> ratings;  // one per rater
};

ScoreTable aggregate_scores(const std::vector<ScoreRecord>& records);

struct TopicEntry {
  std::string topic;
  std::string category;
};

/// RBT per (topic, background), RQQ/RBQ per curated question; rows grouped
/// by topic category, plus an "Avg." row.
ScoreTable evaluate_aqg(const std::vector<QuestionSet>& question_sets,
                        const std::map<std::string, std::string>& topic_categories,
                        LlmGateway& backend);

struct ProbeResponse {
  std::string agent_id;
  std::string domain;
  std::string question;
  std::string response_text;
};

/// RAW/CUS/SPE per response; per-agent means over the probe questions,
/// then per-domain rows and an "Avg." row.
ScoreTable evaluate_agents(const std::vector<ProbeResponse>& responses,
                           LlmGateway& backend);

/// Seeded stratified sampler: pick `per_domain` agent ids from each domain.
std::vector<std::string> sample_agents(
    const std::map<std::string, std::vector<std::string>>& by_domain,
    int per_domain, unsigned long long seed);

std::string format_table_csv(const ScoreTable& table);

}  // namespace mavens

#endif
