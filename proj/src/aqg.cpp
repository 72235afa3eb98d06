#include "mavens/aqg.hpp"

#include <algorithm>
#include <cctype>
#include <set>

#include "mavens/errors.hpp"
#include "mavens/vector_index.hpp"

namespace mavens {
namespace {

std::string trim(const std::string& s) {
  size_t a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  size_t b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

std::string lower(std::string s) {
  for (char& c : s) c = char(std::tolower(uint8_t(c)));
  return s;
}

// "1. What ...", "2) What ...", "- What ...", "* What ...", "Q3: What ..."
std::string strip_list_marker(std::string line) {
  line = trim(line);
  size_t i = 0;
  if (i < line.size() && (line[i] == 'Q' || line[i] == 'q')) {
    size_t j = i + 1;
    while (j < line.size() && std::isdigit(uint8_t(line[j]))) ++j;
    if (j > i + 1 && j < line.size() && (line[j] == ':' || line[j] == '.')) {
      return trim(line.substr(j + 1));
    }
  }
  while (i < line.size() && std::isdigit(uint8_t(line[i]))) ++i;
  if (i > 0 && i < line.size() &&
      (line[i] == '.' || line[i] == ')' || line[i] == ':')) {
    return trim(line.substr(i + 1));
  }
  if (!line.empty() && (line[0] == '-' || line[0] == '*')) {
    return trim(line.substr(1));
  }
  return line;
}

}  // namespace

const std::vector<QuestionFormat>& question_formats() {
  static const std::vector<QuestionFormat> kOrder = {
      QuestionFormat::What, QuestionFormat::Where, QuestionFormat::Who,
      QuestionFormat::When, QuestionFormat::Why,   QuestionFormat::How};
  return kOrder;
}

std::string format_name(QuestionFormat fmt) {
  switch (fmt) {
    case QuestionFormat::What: return "What";
    case QuestionFormat::Where: return "Where";
    case QuestionFormat::Who: return "Who";
    case QuestionFormat::When: return "When";
    case QuestionFormat::Why: return "Why";
    case QuestionFormat::How: return "How";
    case QuestionFormat::Other: return "Other";
  }
  return "Other";
}

QuestionFormat classify_format(const std::string& text) {
  std::string t = trim(text);
  if (t.empty()) throw InvalidInput("classify_format: empty text");
  size_t end = 0;
  while (end < t.size() && std::isalpha(uint8_t(t[end]))) ++end;
  std::string first = lower(t.substr(0, end));
  for (QuestionFormat fmt : question_formats()) {
    if (first == lower(format_name(fmt))) return fmt;
  }
  return QuestionFormat::Other;
}

AqgConfig::AqgConfig() {
  format_exemplars = {
      {QuestionFormat::What, "What are the main causes of the event?"},
      {QuestionFormat::Where, "Where did the event take place?"},
      {QuestionFormat::Who, "Who are the key people involved in the event?"},
      {QuestionFormat::When, "When did the event begin?"},
      {QuestionFormat::Why, "Why did the event attract public attention?"},
      {QuestionFormat::How, "How has the event developed over time?"},
  };
}

void AqgConfig::validate() const {
  if (k < 1) throw InvalidInput("aqg: k must be >= 1");
  if (theta_cap < 1) throw InvalidInput("aqg: theta_cap must be >= 1");
  if (k > theta_cap) throw InvalidInput("aqg: k must be <= theta_cap");
}

AqgTemplates AqgTemplates::defaults() {
  AqgTemplates t;
  t.background.system =
      "You are a news analyst. Expand the received topic name into a "
      "background review: a factual paragraph describing the event, its "
      "context, and the parties involved. Be brief and clear.";
  t.background.user = "Topic: {topic}";
  t.extraction.system =
      "You are a question writer. Read the background review and write "
      "questions that begin with the word \"{format}\", one per line, "
      "each ending with a question mark. An example of the expected "
      "format: {exemplar}";
  t.extraction.user = "Format: {format}\nBackground review:\n{review}";
  return t;
}

std::string generate_background(const std::string& topic, LlmGateway& backend,
                                const AqgTemplates& templates) {
  if (trim(topic).empty()) throw InvalidInput("generate_background: empty topic");
  auto [system, user] = templates.background.render({{"topic", topic}});
  std::string text = backend.complete({system, user});
  if (trim(text).empty()) {
    throw StageFailure("background", "backend returned empty text for topic " + topic);
  }
  return text;
}

std::vector<Question> parse_question_reply(const std::string& reply,
                                           const AqgConfig& cfg,
                                           const std::string& topic_id) {
  std::vector<Question> out;
  size_t pos = 0;
  while (pos <= reply.size() && int(out.size()) < cfg.theta_cap) {
    size_t nl = reply.find('\n', pos);
    std::string line = reply.substr(pos, nl == std::string::npos ? nl : nl - pos);
    pos = nl == std::string::npos ? reply.size() + 1 : nl + 1;
    line = strip_list_marker(line);
    if (line.empty()) continue;
    QuestionFormat fmt = classify_format(line);
    if (fmt == QuestionFormat::Other) continue;
    if (line.back() != '?') {
      while (!line.empty() && (line.back() == '.' || line.back() == '!')) {
        line.pop_back();
      }
      line = trim(line) + "?";
    }
    if (line == "?") continue;
    out.push_back({line, fmt, topic_id});
  }
  return out;
}

std::vector<Question> extract_questions(const std::string& background,
                                        QuestionFormat fmt, LlmGateway& backend,
                                        const AqgTemplates& templates,
                                        const AqgConfig& cfg,
                                        const std::string& topic_id) {
  if (fmt == QuestionFormat::Other) {
    throw InvalidInput("extract_questions: Other is not an extraction format");
  }
  cfg.validate();
  auto [system, user] = templates.extraction.render(
      {{"format", format_name(fmt)},
       {"exemplar", cfg.format_exemplars.at(fmt)},
       {"review", background}});
  std::string reply = backend.complete({system, user});
  std::vector<Question> questions = parse_question_reply(reply, cfg, topic_id);
  if (questions.empty()) {
    throw StageFailure("extraction",
                       "no parseable questions for format " + format_name(fmt));
  }
  return questions;
}

QuestionSet curate(const std::map<QuestionFormat, std::vector<Question>>& pools,
                   const std::string& topic, const std::string& background,
                   const AqgConfig& cfg, const EmbedderSpec& embedder) {
  cfg.validate();
  if (trim(background).empty()) throw InvalidInput("curate: empty background");
  bool any = false;
  for (const auto& [fmt, pool] : pools) any = any || !pool.empty();
  if (!any) throw StageFailure("curation", "all question pools are empty");

  EmbeddingVector b = embed(background, embedder);
  QuestionSet set;
  set.topic = topic;
  set.background = background;
  set.pools = pools;
  set.k = cfg.k;
  set.theta_cap = cfg.theta_cap;

  std::set<std::string> seen;
  for (QuestionFormat fmt : question_formats()) {
    auto it = pools.find(fmt);
    if (it == pools.end() || it->second.empty()) continue;
    const auto& pool = it->second;
    FlatIndex index(embedder.dims);
    std::vector<size_t> kept;  // pool positions behind index ids
    for (size_t i = 0; i < pool.size(); ++i) {
      if (pool[i].format == QuestionFormat::Other) continue;
      index.add(std::to_string(kept.size()), embed(pool[i].text, embedder));
      kept.push_back(i);
    }
    if (index.size() == 0) continue;
    for (const SearchHit& hit : index.search_top_k(b, size_t(cfg.k))) {
      const Question& q = pool[kept[size_t(std::stoul(hit.id))]];
      if (seen.insert(q.text).second) set.curated.push_back(q);
    }
  }
  if (set.curated.empty()) {
    throw StageFailure("curation", "no question survived selection");
  }
  return set;
}

QuestionSet run_aqg(const std::string& topic, LlmGateway& backend,
                    const AqgTemplates& templates, const AqgConfig& cfg,
                    const EmbedderSpec& embedder) {
  std::string background = generate_background(topic, backend, templates);
  std::map<QuestionFormat, std::vector<Question>> pools;
  for (QuestionFormat fmt : question_formats()) {
    try {
      pools[fmt] = extract_questions(background, fmt, backend, templates, cfg, topic);
    } catch (const StageFailure&) {
      pools[fmt] = {};  // extraction failed for this format; continue
    }
  }
  return curate(pools, topic, background, cfg, embedder);
}

}  // namespace mavens
