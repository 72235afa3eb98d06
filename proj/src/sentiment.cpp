#include "mavens/sentiment.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <unordered_map>
#include <unordered_set>

#include "mavens/errors.hpp"
#include "mavens/opinion_analysis.hpp"

namespace mavens {
namespace {

double round4(double v) { return std::round(v * 10000.0) / 10000.0; }

}  // namespace

void SentimentLexicon::validate() const {
  for (const auto& [term, polarity] : entries) {
    if (polarity < -1.0 || polarity > 1.0) {
      throw InvalidInput("lexicon polarity out of [-1,1] for term: " + term);
    }
    if (std::find(negators.begin(), negators.end(), term) != negators.end()) {
      throw InvalidInput("negator overlaps sentiment term: " + term);
    }
  }
}

SentimentLexicon SentimentLexicon::load(const std::string& lexicon_path,
                                        const std::string& negator_path) {
  SentimentLexicon lex;
  std::ifstream in(lexicon_path);
  if (!in) throw FormatError("cannot open lexicon: " + lexicon_path);
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    size_t tab = line.find('\t');
    if (tab == std::string::npos) {
      throw FormatError("malformed lexicon line: " + line);
    }
    std::string term = line.substr(0, tab);
    double polarity = std::stod(line.substr(tab + 1));
    lex.entries[term] = polarity;
    lex.sources[term] = LexiconSource::Seed;
  }
  std::ifstream nin(negator_path);
  if (!nin) throw FormatError("cannot open negator file: " + negator_path);
  while (std::getline(nin, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!line.empty() && line[0] != '#') lex.negators.push_back(line);
  }
  lex.validate();
  return lex;
}

void SentimentLexicon::save(const std::string& lexicon_path) const {
  std::ofstream out(lexicon_path, std::ios::trunc);
  if (!out) throw FormatError("cannot write lexicon: " + lexicon_path);
  for (const auto& [term, polarity] : entries) {
    out << term << '\t' << polarity << '\n';
  }
}

SentimentLexicon build_lexicon(const std::vector<std::string>& corpus,
                               const SentimentLexicon& seed,
                               const AdaptationConfig& cfg) {
  if (seed.entries.empty()) throw InvalidInput("build_lexicon: empty seed lexicon");
  if (corpus.empty()) return seed;

  std::vector<std::vector<std::string>> sentences;
  for (const std::string& text : corpus) {
    for (const std::string& s : split_sentences(text)) {
      auto toks = tokenize(s, cfg.cjk_bigrams);
      if (!toks.empty()) sentences.push_back(std::move(toks));
    }
  }
  if (sentences.empty()) return seed;

  std::unordered_map<std::string, long long> term_count;
  for (const auto& toks : sentences) {
    for (const std::string& t : toks) ++term_count[t];
  }

  // sentence-level co-occurrence counts against the seed polarity classes
  long long n = (long long)sentences.size();
  long long pos_sentences = 0, neg_sentences = 0;
  std::unordered_map<std::string, long long> in_sentences, with_pos, with_neg;
  for (const auto& toks : sentences) {
    std::unordered_set<std::string> uniq(toks.begin(), toks.end());
    bool has_pos = false, has_neg = false;
    for (const std::string& t : uniq) {
      auto it = seed.entries.find(t);
      if (it != seed.entries.end()) {
        if (it->second > 0) has_pos = true;
        if (it->second < 0) has_neg = true;
      }
    }
    if (has_pos) ++pos_sentences;
    if (has_neg) ++neg_sentences;
    for (const std::string& t : uniq) {
      ++in_sentences[t];
      if (has_pos) ++with_pos[t];
      if (has_neg) ++with_neg[t];
    }
  }

  // add-half smoothed PMI keeps a zero co-occurrence finite
  auto pmi = [&](long long cooc, long long ct, long long cc) {
    return std::log(((double(cooc) + 0.5) * double(n)) /
                    ((double(ct) + 0.5) * (double(cc) + 0.5)));
  };

  SentimentLexicon out = seed;
  for (const auto& [term, count] : term_count) {
    if (count < cfg.min_count) continue;
    if (seed.entries.count(term)) continue;
    if (std::find(seed.negators.begin(), seed.negators.end(), term) !=
        seed.negators.end()) {
      continue;
    }
    long long ct = in_sentences[term];
    double polarity = pmi(with_pos[term], ct, pos_sentences) -
                      pmi(with_neg[term], ct, neg_sentences);
    polarity = std::clamp(polarity, -1.0, 1.0);
    if (std::abs(polarity) < cfg.neutral_band) continue;  // emotionless
    out.entries[term] = polarity;
    out.sources[term] = LexiconSource::Discovered;
  }
  out.validate();
  return out;
}

double score_text(const std::string& text, const SentimentLexicon& lexicon,
                  const AdaptationConfig& cfg) {
  if (lexicon.entries.empty()) throw InvalidInput("score_text: empty lexicon");
  std::vector<std::string> tokens = tokenize(text, cfg.cjk_bigrams);
  std::unordered_set<std::string> negators(lexicon.negators.begin(),
                                           lexicon.negators.end());
  double sum = 0.0;
  long long matched = 0;
  for (size_t i = 0; i < tokens.size(); ++i) {
    auto it = lexicon.entries.find(tokens[i]);
    if (it == lexicon.entries.end()) continue;
    double polarity = it->second;
    for (size_t w = 1; w <= size_t(cfg.window) && w <= i; ++w) {
      if (negators.count(tokens[i - w])) {
        polarity = -polarity;
        break;
      }
    }
    sum += polarity;
    ++matched;
  }
  if (matched == 0) return 0.0;
  return std::clamp(sum / double(matched), -1.0, 1.0);
}

SentimentReport aggregate(const std::vector<ScoredText>& scores,
                          const std::vector<std::string>& domain_order) {
  if (scores.empty()) throw InvalidInput("aggregate: no scores");
  SentimentReport report;
  report.per_text = scores;

  std::map<std::string, std::pair<double, long long>> sums;
  double total = 0.0;
  for (const ScoredText& s : scores) {
    sums[s.domain].first += s.score;
    ++sums[s.domain].second;
    total += s.score;
  }
  std::vector<std::string> order = domain_order;
  for (const auto& [domain, _] : sums) {
    if (std::find(order.begin(), order.end(), domain) == order.end()) {
      order.push_back(domain);
    }
  }
  for (const std::string& domain : order) {
    auto it = sums.find(domain);
    if (it == sums.end()) continue;
    report.per_domain[domain] =
        round4(it->second.first / double(it->second.second));
  }
  report.overall = round4(total / double(scores.size()));
  return report;
}

}  // namespace mavens
