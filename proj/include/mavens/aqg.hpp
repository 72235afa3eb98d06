#ifndef MAVENS_AQG_HPP
#define MAVENS_AQG_HPP

#include <map>
#include <string>
#include <vector>

#include "mavens/embedding.hpp"
#include "mavens/llm_gateway.hpp"

namespace mavens {

enum class QuestionFormat { What, Where, Who, When, Why, How, Other };

/// The six concrete formats in the fixed presentation order.
const std::vector<QuestionFormat>& question_formats();
std::string format_name(QuestionFormat fmt);
QuestionFormat classify_format(const std::string& text);

struct Question {
  std::string text;  // normalized, ends with '?'
  QuestionFormat format = QuestionFormat::Other;
  std::string topic_id;
};

struct QuestionSet {
  std::string topic;
  std::string background;
  std::map<QuestionFormat, std::vector<Question>> pools;
  std::vector<Question> curated;
  int k = 2;
  int theta_cap = 10;
};

struct AqgConfig {
  int k = 2;
  int theta_cap = 10;
  std::map<QuestionFormat, std::string> format_exemplars;  // defaults shipped

  AqgConfig();
  void validate() const;
};

struct AqgTemplates {
  PromptTemplate background;  // {topic}
  PromptTemplate extraction;  // {format}, {exemplar}, {review}
  static AqgTemplates defaults();
};

std::string generate_background(const std::string& topic, LlmGateway& backend,
                                const AqgTemplates& templates);

/// Parse one per-format LLM reply into questions. Lines are stripped of list
/// numbering and bullets; a line is kept when its leading word is one of the
/// six format words, and is given a trailing '?' if missing. Lines that do
/// not classify to any format are dropped. Throws StageFailure when nothing
/// parses.
std::vector<Question> extract_questions(const std::string& background,
                                        QuestionFormat fmt, LlmGateway& backend,
                                        const AqgTemplates& templates,
                                        const AqgConfig& cfg,
                                        const std::string& topic_id = "");

/// Parse the raw reply text directly (test seam for extract_questions).
std::vector<Question> parse_question_reply(const std::string& reply,
                                           const AqgConfig& cfg,
                                           const std::string& topic_id = "");

/// Similarity selection: embed the background and every pooled question,
/// take the k nearest per pool under squared L2, concatenate in fixed format
/// order, and drop exact duplicate texts keeping the first occurrence.
QuestionSet curate(const std::map<QuestionFormat, std::vector<Question>>& pools,
                   const std::string& topic, const std::string& background,
                   const AqgConfig& cfg, const EmbedderSpec& embedder);

/// Full AQG chain for one topic.
QuestionSet run_aqg(const std::string& topic, LlmGateway& backend,
                    const AqgTemplates& templates, const AqgConfig& cfg,
                    const EmbedderSpec& embedder);

}  // namespace mavens

#endif
