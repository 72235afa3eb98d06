#ifndef MAVENS_TESTKIT_HPP
#define MAVENS_TESTKIT_HPP

#include <map>
#include <string>
#include <vector>

#include "mavens/embedding.hpp"

namespace mavens::testkit {

/// Independent oracle for flat search: full stable sort by squared L2.
std::vector<std::pair<std::string, double>> brute_force_topk(
    const std::vector<std::pair<std::string, EmbeddingVector>>& entries,
    const EmbeddingVector& query, size_t k);

/// Reference TF-IDF from pre-tokenized docs: tf raw count,
/// idf = ln((1+N)/(1+df)) + 1, rows L2-normalized.
std::vector<std::map<std::string, double>> reference_tfidf(
    const std::vector<std::vector<std::string>>& docs);

double reference_mean(const std::vector<double>& values);
double reference_population_variance(const std::vector<double>& values);

/// Adjusted Rand index between two labelings of the same points.
double adjusted_rand_index(const std::vector<size_t>& a,
                           const std::vector<size_t>& b);

struct SyntheticCorpusSpec {
  std::vector<std::string> domains = {"politics",      "economics", "technology",
                                      "society",       "entertainment",
                                      "military"};
  int entities_per_domain = 10;
  int sentences_per_entity = 40;
  unsigned long long seed = 7;
  std::map<std::string, double> polarity_bias;  // domain -> [-1, 1]
};

/// Write corpus/<domain>/<entity>.txt persona blogs; deterministic per seed.
void generate_corpus(const SyntheticCorpusSpec& spec, const std::string& out_dir);

/// Mock fixture table that answers every pipeline prompt deterministically.
std::map<std::string, std::string> default_mock_fixtures();

}  // namespace mavens::testkit

#endif
