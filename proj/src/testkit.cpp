#include "mavens/testkit.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>

#include "mavens/errors.hpp"

namespace fs = std::filesystem;

namespace mavens::testkit {
namespace {

double l2_sq_ref(const EmbeddingVector& a, const EmbeddingVector& b) {
  double s = 0.0;
  for (size_t i = 0; i < a.size(); ++i) {
    double d = double(a[i]) - double(b[i]);
    s += d * d;
  }
  return s;
}

const std::vector<std::string> kPositiveWords = {"good", "hopeful", "positive",
                                                 "beneficial", "peaceful"};
const std::vector<std::string> kNegativeWords = {"bad", "tense", "negative",
                                                 "harmful", "grim"};

}  // namespace

std::vector<std::pair<std::string, double>> brute_force_topk(
    const std::vector<std::pair<std::string, EmbeddingVector>>& entries,
    const EmbeddingVector& query, size_t k) {
  std::vector<std::pair<std::string, double>> scored;
  for (const auto& [id, v] : entries) {
    scored.emplace_back(id, l2_sq_ref(query, v));
  }
  std::stable_sort(scored.begin(), scored.end(),
                   [](const auto& a, const auto& b) { return a.second < b.second; });
  if (scored.size() > k) scored.resize(k);
  return scored;
}

std::vector<std::map<std::string, double>> reference_tfidf(
    const std::vector<std::vector<std::string>>& docs) {
  double n = double(docs.size());
  std::map<std::string, double> df;
  for (const auto& doc : docs) {
    std::map<std::string, bool> seen;
    for (const auto& t : doc) {
      if (!seen[t]) {
        seen[t] = true;
        df[t] += 1.0;
      }
    }
  }
  std::vector<std::map<std::string, double>> rows;
  for (const auto& doc : docs) {
    std::map<std::string, double> row;
    for (const auto& t : doc) row[t] += 1.0;
    double norm_sq = 0.0;
    for (auto& [t, w] : row) {
      w *= std::log((1.0 + n) / (1.0 + df[t])) + 1.0;
      norm_sq += w * w;
    }
    if (norm_sq > 0.0) {
      double inv = 1.0 / std::sqrt(norm_sq);
      for (auto& [t, w] : row) w *= inv;
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

double reference_mean(const std::vector<double>& values) {
  double s = 0.0;
  for (double v : values) s += v;
  return s / double(values.size());
}

double reference_population_variance(const std::vector<double>& values) {
  double m = reference_mean(values);
  double s = 0.0;
  for (double v : values) s += (v - m) * (v - m);
  return s / double(values.size());
}

double adjusted_rand_index(const std::vector<size_t>& a,
                           const std::vector<size_t>& b) {
  if (a.size() != b.size()) throw InvalidInput("ARI: label length mismatch");
  size_t n = a.size();
  std::map<std::pair<size_t, size_t>, double> contingency;
  std::map<size_t, double> row_sum, col_sum;
  for (size_t i = 0; i < n; ++i) {
    contingency[{a[i], b[i]}] += 1.0;
    row_sum[a[i]] += 1.0;
    col_sum[b[i]] += 1.0;
  }
  auto choose2 = [](double x) { return x * (x - 1.0) / 2.0; };
  double sum_cells = 0.0, sum_rows = 0.0, sum_cols = 0.0;
  for (const auto& [_, c] : contingency) sum_cells += choose2(c);
  for (const auto& [_, c] : row_sum) sum_rows += choose2(c);
  for (const auto& [_, c] : col_sum) sum_cols += choose2(c);
  double total = choose2(double(n));
  double expected = sum_rows * sum_cols / total;
  double max_index = 0.5 * (sum_rows + sum_cols);
  if (max_index == expected) return 1.0;
  return (sum_cells - expected) / (max_index - expected);
}

void generate_corpus(const SyntheticCorpusSpec& spec, const std::string& out_dir) {
  const std::map<std::string, std::vector<std::string>> topic_words = {
      {"politics", {"election", "policy", "parliament", "diplomacy", "reform"}},
      {"economics", {"market", "inflation", "trade", "investment", "currency"}},
      {"technology", {"chip", "software", "startup", "network", "research"}},
      {"society", {"education", "housing", "community", "welfare", "culture"}},
      {"entertainment", {"film", "concert", "celebrity", "streaming", "awards"}},
      {"military", {"defense", "troops", "border", "strategy", "alliance"}},
  };
  const std::vector<std::string> generic_words = {"event", "issue", "debate",
                                                  "signal", "update"};
  const std::vector<std::string> verbs = {"shapes", "drives", "challenges",
                                          "reveals", "tests"};
  const std::vector<std::string> neutral_tails = {
      "public opinion this season", "the regional outlook",   "daily discussion",
      "long term planning",          "the current situation"};

  for (size_t d = 0; d < spec.domains.size(); ++d) {
    const std::string& domain = spec.domains[d];
    const auto& words = topic_words.count(domain) ? topic_words.at(domain)
                                                  : generic_words;
    double bias = 0.0;
    if (auto it = spec.polarity_bias.find(domain); it != spec.polarity_bias.end()) {
      bias = it->second;
    }
    fs::path dir = fs::path(out_dir) / domain;
    fs::create_directories(dir);
    std::string prefix = domain.substr(0, 4);
    for (int e = 0; e < spec.entities_per_domain; ++e) {
      std::mt19937_64 rng(spec.seed * 7919ull + d * 101ull + uint64_t(e));
      std::uniform_real_distribution<double> coin(0.0, 1.0);
      std::uniform_int_distribution<size_t> pick_word(0, words.size() - 1);
      std::uniform_int_distribution<size_t> pick_verb(0, verbs.size() - 1);
      std::uniform_int_distribution<size_t> pick_tail(0, neutral_tails.size() - 1);
      std::uniform_int_distribution<size_t> pick_pos(0, kPositiveWords.size() - 1);
      std::uniform_int_distribution<size_t> pick_neg(0, kNegativeWords.size() - 1);

      std::string blog;
      for (int s = 0; s < spec.sentences_per_entity; ++s) {
        std::string sentence = "The " + words[pick_word(rng)] + " " +
                               verbs[pick_verb(rng)] + " " +
                               neutral_tails[pick_tail(rng)];
        if (coin(rng) < std::abs(bias)) {
          sentence += " and the mood is " +
                      (bias < 0 ? kNegativeWords[pick_neg(rng)]
                                : kPositiveWords[pick_pos(rng)]);
        }
        blog += sentence + ". ";
      }
      char name[32];
      std::snprintf(name, sizeof(name), "%s-%02d.txt", prefix.c_str(), e);
      std::ofstream out(dir / name, std::ios::trunc);
      out << blog << '\n';
    }
  }
}

std::map<std::string, std::string> default_mock_fixtures() {
  std::map<std::string, std::string> fixtures;
  fixtures["Topic: "] =
      "The topic has drawn wide public attention in recent weeks. Analysts "
      "describe a tense and uncertain situation with regional consequences. "
      "Officials, markets and communities are watching how the event "
      "develops, and commentators disagree about the likely outcome.";
  fixtures["Format: What"] =
      "1. What are the main causes of this event?\n"
      "2. What consequences should the public expect?\n"
      "3. What measures are being discussed by officials?";
  fixtures["Format: Where"] =
      "1. Where did the event first emerge?\n"
      "2. Where are its effects felt most strongly?";
  fixtures["Format: Who"] =
      "1. Who are the key figures driving the event?\n"
      "2. Who is most affected by the outcome?";
  fixtures["Format: When"] =
      "1. When did the event begin to escalate?\n"
      "2. When could a resolution realistically arrive?";
  fixtures["Format: Why"] =
      "1. Why has the event attracted so much attention?\n"
      "2. Why do experts disagree about its causes?";
  fixtures["Format: How"] =
      "1. How has the event developed over time?\n"
      "2. How are institutions responding to it?";
  fixtures["Translate to "] = "{{user}}";
  fixtures["Question: "] =
      "In my view the situation remains tense and the outlook is negative. "
      "The pressure on sector {{hash}} could grow before talks resume. "
      "A peaceful settlement would be good for every side involved. "
      "I don't know every detail, but caution seems wise.";
  fixtures["Rate:"] = "Considering its relevance, I would give this a score of 7.";
  return fixtures;
}

}  // namespace mavens::testkit
