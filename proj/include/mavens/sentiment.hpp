#ifndef MAVENS_SENTIMENT_HPP
#define MAVENS_SENTIMENT_HPP

#include <map>
#include <string>
#include <vector>

namespace mavens {

enum class LexiconSource { Seed, Discovered };

struct SentimentLexicon {
  std::map<std::string, double> entries;  // term -> polarity in [-1, 1]
  std::map<std::string, LexiconSource> sources;
  std::vector<std::string> negators;

  void validate() const;

  /// term<TAB>polarity lines; negator file is one term per line.
  static SentimentLexicon load(const std::string& lexicon_path,
                               const std::string& negator_path);
  void save(const std::string& lexicon_path) const;
};

struct AdaptationConfig {
  int min_count = 3;
  double pmi_threshold = 0.5;
  int window = 2;        // token window for negation flips
  double neutral_band = 0.1;
  bool cjk_bigrams = true;
};

struct ScoredText {
  std::string role_id;
  std::string domain;
  double score = 0.0;
};

struct SentimentReport {
  std::vector<ScoredText> per_text;
  std::map<std::string, double> per_domain;  // arithmetic means
  double overall = 0.0;
};

/// Extend the seed lexicon with corpus-discovered terms: candidates are
/// frequent non-seed tokens; polarity = PMI(candidate, positive seeds) -
/// PMI(candidate, negative seeds) over sentence co-occurrence, clamped to
/// [-1, 1]; near-neutral candidates are screened out. Seed entries are
/// never removed or re-polarized.
SentimentLexicon build_lexicon(const std::vector<std::string>& corpus,
                               const SentimentLexicon& seed,
                               const AdaptationConfig& cfg);

/// Mean adjusted polarity over matched lexicon terms; a negator within the
/// preceding window flips a term's sign. No matches -> 0.
double score_text(const std::string& text, const SentimentLexicon& lexicon,
                  const AdaptationConfig& cfg);

SentimentReport aggregate(const std::vector<ScoredText>& scores,
                          const std::vector<std::string>& domain_order);

}  // namespace mavens

#endif
