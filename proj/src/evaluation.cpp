#include "mavens/evaluation.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <random>
#include <sstream>

#include "mavens/errors.hpp"

namespace mavens {
namespace {

double mean_of(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / double(v.size());
}

double population_variance(const std::vector<int>& v) {
  double m = 0.0;
  for (int x : v) m += x;
  m /= double(v.size());
  double s = 0.0;
  for (int x : v) s += (x - m) * (x - m);
  return s / double(v.size());
}

}  // namespace

std::string judge_dim_name(JudgeDim dim) {
  switch (dim) {
    case JudgeDim::RBT: return "RBT";
    case JudgeDim::RQQ: return "RQQ";
    case JudgeDim::RBQ: return "RBQ";
    case JudgeDim::RAW: return "RAW";
    case JudgeDim::CUS: return "CUS";
    case JudgeDim::SPE: return "SPE";
    case JudgeDim::SIM: return "SIM";
  }
  return "?";
}

std::pair<int, int> judge_scale(JudgeDim dim) {
  switch (dim) {
    case JudgeDim::RBT:
    case JudgeDim::RQQ:
    case JudgeDim::RBQ:
      return {1, 10};
    default:
      return {0, 10};
  }
}

PromptTemplate judge_prompt(JudgeDim dim) {
  PromptTemplate t;
  switch (dim) {
    case JudgeDim::RBT:
      t.system =
          "# Role: Text similarity detector\n"
          "## Goals\nYou receive a topic and a background review. Judge how "
          "relevant the background review is to the topic and give a "
          "similarity score.\n"
          "## Constraints\nOnly assign scores within the range of 1 to 10.";
      t.user = "Rate: topic and background.\nTopic: {topic}\nBackground review:\n{review}";
      break;
    case JudgeDim::RQQ:
      t.system =
          "# Role: 5W1H query analyst\n"
          "## Goals\nYou receive a question. 5W1H questions commence with "
          "\"What, Where, Who, When, Why, How\". If the question strictly "
          "follows the 5W1H format, assign it a perfect score of 10; "
          "otherwise score how closely it relates to the 5W1H format.\n"
          "## Constraints\nOnly assign scores within the range of 1 to 10.";
      t.user = "Rate: question format.\nQuestion: {question}";
      break;
    case JudgeDim::RBQ:
      t.system =
          "# Role: Question similarity detector\n"
          "## Goals\nYou receive a question. Judge its relevance to the "
          "background review below and score the degree of similarity.\n"
          "## Background review\n{review}\n"
          "## Constraints\nOnly assign scores within the range of 1 to 10.";
      t.user = "Rate: question and background.\nQuestion: {question}";
      break;
    case JudgeDim::RAW:
      t.system =
          "## Goal\nYou receive a text and an event. Analyze how well the "
          "text addresses and evaluates the event, and score its relevance.\n"
          "## Event\n{event}\n"
          "## Constraints\nScore by relevance, with a maximum score of 10 "
          "and a minimum of 0.";
      t.user = "Rate: text.\nText: {text}";
      break;
    case JudgeDim::CUS:
      t.system =
          "## Goal\nYou receive a text. Compare its language style with the "
          "styles in your knowledge base and score the similarity of the "
          "two language styles.\n"
          "## Constraints\nThe highest score is 10 and the lowest is 0; a "
          "higher score means a stronger style similarity.";
      t.user = "Rate: text.\nText: {text}";
      break;
    case JudgeDim::SPE:
      t.system =
          "## Goal\nYou receive a text. Compare its viewpoints and knowledge "
          "points against the knowledge base and score the match.\n"
          "## Constraints\nThe highest score is 10 and the lowest is 0; a "
          "higher score means closer viewpoints and knowledge points.";
      t.user = "Rate: text.\nText: {text}";
      break;
    case JudgeDim::SIM:
      t.system =
          "## Goal\nYou receive two pieces of text. Score how similar they "
          "are to each other.\n"
          "## Constraints\nThe highest score is 10 and the lowest is 0; a "
          "higher score means higher similarity.";
      t.user = "Rate: similarity.\nText A: {text_a}\nText B: {text_b}";
      break;
  }
  return t;
}

std::optional<int> parse_score(const std::string& reply, JudgeDim dim) {
  auto [lo, hi] = judge_scale(dim);
  size_t i = 0;
  while (i < reply.size()) {
    if (std::isdigit(uint8_t(reply[i]))) {
      size_t j = i;
      while (j < reply.size() && std::isdigit(uint8_t(reply[j]))) ++j;
      // skip decimals like "8.5" and fragments glued to letters ("10/10" is fine)
      bool decimal = j < reply.size() && reply[j] == '.' && j + 1 < reply.size() &&
                     std::isdigit(uint8_t(reply[j + 1]));
      if (!decimal && j - i <= 2) {
        int value = std::stoi(reply.substr(i, j - i));
        if (value >= lo && value <= hi) return value;
      }
      while (j < reply.size() && (std::isdigit(uint8_t(reply[j])) || reply[j] == '.')) {
        ++j;
      }
      i = j;
    } else {
      ++i;
    }
  }
  return std::nullopt;
}

JudgeScore judge(JudgeDim dim, const std::map<std::string, std::string>& bindings,
                 const std::string& subject_id, LlmGateway& backend) {
  PromptTemplate tmpl = judge_prompt(dim);
  auto [system, user] = tmpl.render(bindings);
  std::string reply = backend.complete({system, user});
  std::optional<int> score = parse_score(reply, dim);
  if (!score) {
    reply = backend.complete({system, user + "\nReply with a single integer."});
    score = parse_score(reply, dim);
  }
  if (!score) {
    throw StageFailure("judge", "unparseable " + judge_dim_name(dim) +
                                    " score for " + subject_id);
  }
  return {dim, subject_id, reply, *score};
}

ScoreTable aggregate_scores(const std::vector<ScoreRecord>& records) {
  if (records.empty()) throw InvalidInput("aggregate_scores: no records");
  ScoreTable table;
  // group -> dim -> (item means, item variances)
  std::map<std::string, std::map<std::string, std::pair<std::vector<double>,
                                                        std::vector<double>>>> acc;
  for (const ScoreRecord& rec : records) {
    if (rec.ratings.empty()) continue;
    std::string dim = judge_dim_name(rec.dimension);
    double item_mean = 0.0;
    for (int r : rec.ratings) item_mean += r;
    item_mean /= double(rec.ratings.size());
    auto& cell = acc[rec.group][dim];
    cell.first.push_back(item_mean);
    if (rec.ratings.size() >= 2) {
      cell.second.push_back(population_variance(rec.ratings));
    }
    if (std::find(table.group_order.begin(), table.group_order.end(), rec.group) ==
        table.group_order.end()) {
      table.group_order.push_back(rec.group);
    }
    if (std::find(table.dim_order.begin(), table.dim_order.end(), dim) ==
        table.dim_order.end()) {
      table.dim_order.push_back(dim);
    }
  }
  for (const auto& [group, dims] : acc) {
    for (const auto& [dim, cell] : dims) {
      CellStats stats;
      stats.mean = mean_of(cell.first);
      stats.n = cell.first.size();
      if (!cell.second.empty() && cell.second.size() == cell.first.size()) {
        stats.variance = mean_of(cell.second);
      }
      table.rows[group][dim] = stats;
    }
  }
  return table;
}

namespace {

void add_average_row(ScoreTable& table) {
  std::map<std::string, std::pair<double, size_t>> totals;  // dim -> (sum, n)
  for (const auto& group : table.group_order) {
    for (const auto& dim : table.dim_order) {
      auto git = table.rows.find(group);
      if (git == table.rows.end()) continue;
      auto dit = git->second.find(dim);
      if (dit == git->second.end()) continue;
      totals[dim].first += dit->second.mean * double(dit->second.n);
      totals[dim].second += dit->second.n;
    }
  }
  for (const auto& [dim, t] : totals) {
    if (t.second == 0) continue;
    CellStats stats;
    stats.mean = t.first / double(t.second);
    stats.n = t.second;
    table.rows["Avg."][dim] = stats;
  }
  table.group_order.push_back("Avg.");
}

}  // namespace

ScoreTable evaluate_aqg(const std::vector<QuestionSet>& question_sets,
                        const std::map<std::string, std::string>& topic_categories,
                        LlmGateway& backend) {
  std::vector<ScoreRecord> records;
  for (const QuestionSet& set : question_sets) {
    std::string group = "All";
    auto cat = topic_categories.find(set.topic);
    if (cat != topic_categories.end()) group = cat->second;
    try {
      JudgeScore s = judge(JudgeDim::RBT,
                           {{"topic", set.topic}, {"review", set.background}},
                           set.topic, backend);
      records.push_back({group, JudgeDim::RBT, {s.score}});
    } catch (const StageFailure&) {
      // excluded; n for this cell simply stays lower
    }
    for (const Question& q : set.curated) {
      try {
        JudgeScore s = judge(JudgeDim::RQQ, {{"question", q.text}}, q.text, backend);
        records.push_back({group, JudgeDim::RQQ, {s.score}});
      } catch (const StageFailure&) {
      }
      try {
        JudgeScore s = judge(JudgeDim::RBQ,
                             {{"question", q.text}, {"review", set.background}},
                             q.text, backend);
        records.push_back({group, JudgeDim::RBQ, {s.score}});
      } catch (const StageFailure&) {
      }
    }
  }
  ScoreTable table = aggregate_scores(records);
  table.dim_order = {"RBT", "RQQ", "RBQ"};
  add_average_row(table);
  return table;
}

ScoreTable evaluate_agents(const std::vector<ProbeResponse>& responses,
                           LlmGateway& backend) {
  // per-agent per-dimension means over the probe questions
  struct AgentAcc {
    std::string domain;
    std::map<std::string, std::vector<double>> by_dim;
  };
  std::map<std::string, AgentAcc> agents;
  std::vector<std::string> agent_order;
  for (const ProbeResponse& resp : responses) {
    auto run = [&](JudgeDim dim, std::map<std::string, std::string> bindings) {
      try {
        JudgeScore s = judge(dim, std::move(bindings),
                             resp.agent_id + "/" + resp.question, backend);
        agents[resp.agent_id].by_dim[judge_dim_name(dim)].push_back(s.score);
      } catch (const StageFailure&) {
      }
    };
    if (!agents.count(resp.agent_id)) agent_order.push_back(resp.agent_id);
    agents[resp.agent_id].domain = resp.domain;
    run(JudgeDim::RAW, {{"event", resp.question}, {"text", resp.response_text}});
    run(JudgeDim::CUS, {{"text", resp.response_text}});
    run(JudgeDim::SPE, {{"text", resp.response_text}});
  }

  // per-domain rows from the agent means
  std::map<std::string, std::map<std::string, std::vector<double>>> domains;
  std::vector<std::string> domain_order;
  for (const std::string& id : agent_order) {
    const AgentAcc& acc = agents[id];
    if (std::find(domain_order.begin(), domain_order.end(), acc.domain) ==
        domain_order.end()) {
      domain_order.push_back(acc.domain);
    }
    for (const auto& [dim, scores] : acc.by_dim) {
      if (!scores.empty()) domains[acc.domain][dim].push_back(mean_of(scores));
    }
  }

  ScoreTable table;
  table.dim_order = {"RAW", "CUS", "SPE", "Avg."};
  table.group_order = domain_order;
  for (const auto& [domain, dims] : domains) {
    std::vector<double> row_means;
    for (const char* dim_name : {"RAW", "CUS", "SPE"}) {
      std::string dim = dim_name;
      auto it = dims.find(dim);
      if (it == dims.end()) continue;
      CellStats stats;
      stats.mean = mean_of(it->second);
      stats.n = it->second.size();
      table.rows[domain][dim] = stats;
      row_means.push_back(stats.mean);
    }
    if (!row_means.empty()) {
      CellStats avg;
      avg.mean = mean_of(row_means);
      avg.n = row_means.size();
      table.rows[domain]["Avg."] = avg;
    }
  }
  add_average_row(table);
  return table;
}

std::vector<std::string> sample_agents(
    const std::map<std::string, std::vector<std::string>>& by_domain,
    int per_domain, unsigned long long seed) {
  std::vector<std::string> out;
  for (const auto& [domain, ids] : by_domain) {
    std::vector<std::string> pool = ids;
    std::sort(pool.begin(), pool.end());
    std::mt19937_64 rng(seed ^ std::hash<std::string>{}(domain));
    std::shuffle(pool.begin(), pool.end(), rng);
    for (size_t i = 0; i < pool.size() && int(i) < per_domain; ++i) {
      out.push_back(pool[i]);
    }
  }
  return out;
}

std::string format_table_csv(const ScoreTable& table) {
  std::ostringstream out;
  out << "group";
  for (const std::string& dim : table.dim_order) out << ',' << dim;
  out << '\n';
  out.setf(std::ios::fixed);
  out.precision(3);
  for (const std::string& group : table.group_order) {
    auto git = table.rows.find(group);
    if (git == table.rows.end()) continue;
    out << group;
    for (const std::string& dim : table.dim_order) {
      out << ',';
      auto dit = git->second.find(dim);
      if (dit == git->second.end()) continue;
      out << dit->second.mean;
      if (dit->second.variance) out << " (" << *dit->second.variance << ")";
    }
    out << '\n';
  }
  return out.str();
}

}  // namespace mavens
