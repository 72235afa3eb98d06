#ifndef MAVENS_OPINION_ANALYSIS_HPP
#define MAVENS_OPINION_ANALYSIS_HPP

#include <array>
#include <map>
#include <string>
#include <vector>

#include "mavens/moa.hpp"

namespace mavens {

struct OpinionSentence {
  std::string text;
  std::string source_role_id;
  std::string source_domain;
};

struct TfIdfMatrix {
  std::vector<std::vector<double>> rows;  // L2-normalized unless all-zero
  std::vector<std::string> vocabulary;
  size_t doc_count = 0;
};

struct ClusteringResult {
  size_t k = 0;
  std::vector<size_t> assignments;  // sentence index -> cluster in [0, k)
  std::vector<std::vector<double>> centers;
  std::map<size_t, double> inertia_curve;  // candidate k -> best WCSS
  std::map<size_t, std::vector<std::pair<std::string, double>>> top_terms;
  double inertia = 0.0;
};

struct AnalysisConfig {
  std::vector<std::string> skip_words = {"i don't know", "i do not know",
                                         "system prompt", "as an ai"};
  std::vector<std::string> hedges = {
      "i think",      "i believe",     "in my opinion", "personally",
      "i feel that",  "it seems that", "i guess",       "to be honest",
      "in my view",   "i suppose"};
  size_t min_sentence_len = 6;
  bool cjk_bigrams = true;
  size_t k_min = 2;
  size_t k_max = 12;
  unsigned long long seed = 42;
  int restarts = 8;
  int max_iter = 100;
  double tol = 1e-6;
  size_t top_terms_per_cluster = 10;
};

/// Split packaged responses into sentences; drop sentences containing a skip
/// word (case-insensitive substring) or shorter than the minimum length.
std::vector<OpinionSentence> segment_and_filter(
    const std::vector<RoleResponse>& responses, const AnalysisConfig& cfg);

std::vector<std::string> split_sentences(const std::string& text);

/// Rule-based opinion condenser: strip leading hedges, drop parentheticals,
/// collapse whitespace; identity when no rule fires.
std::string extract_opinion(const std::string& sentence, const AnalysisConfig& cfg);

/// Lowercase word tokens split on non-alphanumerics; contiguous CJK runs
/// become character bigrams when enabled.
std::vector<std::string> tokenize(const std::string& text, bool cjk_bigrams);

/// tf = raw count, idf = ln((1+N)/(1+df)) + 1, rows L2-normalized.
TfIdfMatrix tfidf(const std::vector<std::string>& sentences,
                  const AnalysisConfig& cfg);

/// Normalized chord-distance elbow over a non-increasing WCSS curve; ties go
/// to the smallest k; fewer than 3 points returns the smallest k.
size_t choose_k(const std::map<size_t, double>& inertia_curve);

/// Seeded k-means++ with restarts; empty clusters reseeded from the farthest
/// point; best-of-restarts by inertia. Throws InvalidInput when k > rows.
ClusteringResult kmeans(const TfIdfMatrix& matrix, size_t k,
                        unsigned long long seed, int restarts, int max_iter,
                        double tol);

/// Full clustering stage: sweep candidate k, pick the knee, attach the top
/// terms per cluster center.
ClusteringResult cluster_opinions(const TfIdfMatrix& matrix,
                                  const AnalysisConfig& cfg);

/// Deterministic classical-MDS projection of rows to 2-D (for scatter plots).
std::vector<std::array<double, 2>> mds_project(
    const std::vector<std::vector<double>>& rows);

}  // namespace mavens

#endif
