#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "mavens/errors.hpp"
#include "mavens/opinion_analysis.hpp"
#include "mavens/testkit.hpp"

using namespace mavens;

namespace {

TfIdfMatrix matrix_from_rows(std::vector<std::vector<double>> rows) {
  TfIdfMatrix m;
  m.doc_count = rows.size();
  size_t width = rows.empty() ? 0 : rows[0].size();
  for (size_t j = 0; j < width; ++j) m.vocabulary.push_back("t" + std::to_string(j));
  m.rows = std::move(rows);
  return m;
}

}  // namespace

TEST_CASE("split_sentences breaks on terminals and newlines") {
  auto s = split_sentences("One here. Two there! Three maybe?\nFour plain");
  REQUIRE(s.size() == 4);
  CHECK(s[0] == "One here.");
  CHECK(s[1] == "Two there!");
  CHECK(s[2] == "Three maybe?");
  CHECK(s[3] == "Four plain");

  auto cjk = split_sentences("\xE5\xA5\xBD\xE3\x80\x82next one.");
  REQUIRE(cjk.size() == 2);
  CHECK(cjk[0] == "\xE5\xA5\xBD\xE3\x80\x82");
}

TEST_CASE("segment_and_filter drops skip words and short fragments") {
  RoleResponse r;
  r.role_id = "role-economics";
  r.domain = "economics";
  r.packaged_text = "Prices will fall. I don't know. Ok. As an AI I cannot say.";
  AnalysisConfig cfg;
  auto out = segment_and_filter({r}, cfg);
  REQUIRE(out.size() == 1);
  CHECK(out[0].text == "Prices will fall.");
  CHECK(out[0].source_role_id == "role-economics");
  CHECK(out[0].source_domain == "economics");

  AnalysisConfig bad;
  bad.skip_words.clear();
  CHECK_THROWS_AS(segment_and_filter({r}, bad), InvalidInput);
}

TEST_CASE("extract_opinion strips hedges and parentheticals") {
  AnalysisConfig cfg;
  CHECK(extract_opinion("I think the conflict will persist.", cfg) ==
        "the conflict will persist.");
  CHECK(extract_opinion("In my opinion, (sadly) markets suffer.", cfg) ==
        "markets suffer.");
  CHECK(extract_opinion("I believe, personally, rates stay flat.", cfg) ==
        "rates stay flat.");
  // no rule fires: identity modulo whitespace
  CHECK(extract_opinion("Rates  stay   flat.", cfg) == "Rates stay flat.");
  // a sentence that is nothing but hedge survives as itself
  CHECK(extract_opinion("I think", cfg) == "I think");
  CHECK_THROWS_AS(extract_opinion("   ", cfg), InvalidInput);
}

TEST_CASE("tokenize lowercases words and emits CJK character bigrams") {
  auto t = tokenize("Hello, World 42!", true);
  CHECK(t == std::vector<std::string>{"hello", "world", "42"});
  auto c = tokenize("\xE4\xB8\xAD\xE5\x9B\xBD\xE5\xA5\xBD", true);
  REQUIRE(c.size() == 2);
  CHECK(c[0] == "\xE4\xB8\xAD\xE5\x9B\xBD");
  CHECK(c[1] == "\xE5\x9B\xBD\xE5\xA5\xBD");
  auto mixed = tokenize("GDP\xE5\xA2\x9E\xE9\x95\xBF up", true);
  CHECK(mixed == std::vector<std::string>{"gdp", "\xE5\xA2\x9E\xE9\x95\xBF", "up"});
}

TEST_CASE("tfidf idf hand values") {
  AnalysisConfig cfg;
  // two docs: "apple" in both, "pear" only in the second
  auto m = tfidf({"apple", "apple pear"}, cfg);
  REQUIRE(m.vocabulary.size() == 2);
  size_t ia = m.vocabulary[0] == "apple" ? 0 : 1;
  size_t ip = 1 - ia;
  // doc 0 has a single term, so its normalized weight is 1 regardless of idf
  CHECK(m.rows[0][ia] == doctest::Approx(1.0));
  CHECK(m.rows[0][ip] == 0.0);
  // doc 1 pre-normalization: apple = ln(3/3)+1 = 1, pear = ln(3/2)+1
  double wa = 1.0, wp = std::log(1.5) + 1.0;
  double norm = std::sqrt(wa * wa + wp * wp);
  CHECK(m.rows[1][ia] == doctest::Approx(wa / norm).epsilon(1e-12));
  CHECK(m.rows[1][ip] == doctest::Approx(wp / norm).epsilon(1e-12));
  CHECK_THROWS_AS(tfidf({}, cfg), InvalidInput);
}

TEST_CASE("tfidf matches the reference oracle on random corpora") {
  AnalysisConfig cfg;
  std::mt19937_64 rng(23);
  std::vector<std::string> words = {"alpha", "beta", "gamma", "delta",
                                    "epsilon", "zeta", "eta", "theta"};
  for (int trial = 0; trial < 20; ++trial) {
    std::uniform_int_distribution<size_t> ndocs(2, 12), nwords(1, 15),
        pick(0, words.size() - 1);
    std::vector<std::string> sentences;
    size_t d = ndocs(rng);
    for (size_t i = 0; i < d; ++i) {
      std::string s;
      size_t w = nwords(rng);
      for (size_t j = 0; j < w; ++j) s += words[pick(rng)] + " ";
      sentences.push_back(s);
    }
    auto m = tfidf(sentences, cfg);
    std::vector<std::vector<std::string>> docs;
    for (const auto& s : sentences) docs.push_back(tokenize(s, cfg.cjk_bigrams));
    auto ref = testkit::reference_tfidf(docs);
    REQUIRE(ref.size() == m.rows.size());
    for (size_t r = 0; r < m.rows.size(); ++r) {
      for (size_t j = 0; j < m.vocabulary.size(); ++j) {
        double expected = 0.0;
        auto it = ref[r].find(m.vocabulary[j]);
        if (it != ref[r].end()) expected = it->second;
        CHECK(m.rows[r][j] == doctest::Approx(expected).epsilon(1e-9));
      }
    }
  }
}

TEST_CASE("choose_k finds the knee; degenerate curves fall back") {
  CHECK(choose_k({{2, 100.0}, {3, 30.0}, {4, 12.0}, {5, 10.0}, {6, 9.5}}) == 3);
  // a straight line has no knee: smallest k
  CHECK(choose_k({{2, 40.0}, {3, 30.0}, {4, 20.0}, {5, 10.0}}) == 2);
  CHECK(choose_k({{2, 5.0}, {3, 4.0}}) == 2);
  CHECK(choose_k({{4, 1.0}}) == 4);
  CHECK_THROWS_AS(choose_k({}), InvalidInput);
}

TEST_CASE("kmeans separates two obvious 1-D groups") {
  auto m = matrix_from_rows({{0.0}, {1.0}, {10.0}, {11.0}});
  auto res = kmeans(m, 2, 42, 8, 100, 1e-6);
  REQUIRE(res.centers.size() == 2);
  CHECK(res.assignments[0] == res.assignments[1]);
  CHECK(res.assignments[2] == res.assignments[3]);
  CHECK(res.assignments[0] != res.assignments[2]);
  std::vector<double> centers = {res.centers[0][0], res.centers[1][0]};
  std::sort(centers.begin(), centers.end());
  CHECK(centers[0] == doctest::Approx(0.5));
  CHECK(centers[1] == doctest::Approx(10.5));
  CHECK(res.inertia == doctest::Approx(1.0));

  // k equal to the row count drives inertia to zero
  auto exact = kmeans(m, 4, 42, 8, 100, 1e-6);
  CHECK(exact.inertia == doctest::Approx(0.0));
  CHECK_THROWS_AS(kmeans(m, 5, 42, 8, 100, 1e-6), InvalidInput);
  CHECK_THROWS_AS(kmeans(m, 0, 42, 8, 100, 1e-6), InvalidInput);
}

TEST_CASE("kmeans is deterministic for a fixed seed") {
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<std::vector<double>> rows;
  for (int i = 0; i < 40; ++i) rows.push_back({u(rng), u(rng), u(rng)});
  auto m = matrix_from_rows(rows);
  auto a = kmeans(m, 5, 9, 8, 100, 1e-6);
  auto b = kmeans(m, 5, 9, 8, 100, 1e-6);
  CHECK(a.assignments == b.assignments);
  CHECK(a.inertia == b.inertia);
  auto c = kmeans(m, 5, 10, 8, 100, 1e-6);
  CHECK(c.inertia >= 0.0);  // different seed still valid
}

TEST_CASE("cluster_opinions recovers three planted blobs") {
  std::mt19937_64 rng(77);
  std::normal_distribution<double> noise(0.0, 0.05);
  std::vector<std::vector<double>> rows;
  std::vector<size_t> truth;
  std::vector<std::vector<double>> anchors = {{0, 0}, {5, 5}, {-5, 5}};
  for (size_t b = 0; b < anchors.size(); ++b) {
    for (int i = 0; i < 12; ++i) {
      rows.push_back({anchors[b][0] + noise(rng), anchors[b][1] + noise(rng)});
      truth.push_back(b);
    }
  }
  auto m = matrix_from_rows(rows);
  AnalysisConfig cfg;
  auto res = cluster_opinions(m, cfg);
  CHECK(res.k == 3);
  CHECK(testkit::adjusted_rand_index(res.assignments, truth) ==
        doctest::Approx(1.0));

  // the inertia curve is non-increasing in k
  double prev = std::numeric_limits<double>::infinity();
  for (const auto& [k, w] : res.inertia_curve) {
    CHECK(w <= prev + 1e-9);
    prev = w;
  }
  // top terms exist for every cluster and respect the cap
  REQUIRE(res.top_terms.size() == res.k);
  for (const auto& [c, terms] : res.top_terms) {
    CHECK(terms.size() <= cfg.top_terms_per_cluster);
  }
}

TEST_CASE("mds projection is deterministic and distance-faithful") {
  std::vector<std::vector<double>> rows = {
      {0, 0, 0}, {0.1, 0, 0}, {10, 10, 10}, {10.1, 10, 10}};
  auto a = mds_project(rows);
  auto b = mds_project(rows);
  REQUIRE(a.size() == 4);
  CHECK(a == b);
  auto d = [&](size_t i, size_t j) {
    double dx = a[i][0] - a[j][0], dy = a[i][1] - a[j][1];
    return std::sqrt(dx * dx + dy * dy);
  };
  // near pairs stay near, far pairs stay far
  CHECK(d(0, 1) < d(0, 2));
  CHECK(d(2, 3) < d(1, 2));
  CHECK(mds_project({{1.0}})[0] == std::array<double, 2>{0.0, 0.0});
}
