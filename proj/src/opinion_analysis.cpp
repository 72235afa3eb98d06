#include "mavens/opinion_analysis.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <limits>
#include <random>
#include <unordered_map>

#include "mavens/errors.hpp"

namespace mavens {
namespace {

std::string lower(std::string s) {
  for (char& c : s) c = char(std::tolower(uint8_t(c)));
  return s;
}

std::string trim(const std::string& s) {
  size_t a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  size_t b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

bool contains_ci(const std::string& haystack_lower, const std::string& needle) {
  return haystack_lower.find(lower(needle)) != std::string::npos;
}

double sq_dist(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (size_t i = 0; i < a.size(); ++i) {
    double d = a[i] - b[i];
    s += d * d;
  }
  return s;
}

}  // namespace

std::vector<std::string> split_sentences(const std::string& text) {
  std::vector<std::string> out;
  std::string current;
  size_t i = 0;
  auto flush = [&]() {
    std::string t = trim(current);
    if (!t.empty()) out.push_back(t);
    current.clear();
  };
  while (i < text.size()) {
    char c = text[i];
    if (c == '.' || c == '!' || c == '?') {
      current.push_back(c);
      ++i;
      flush();
      continue;
    }
    if (i + 2 < text.size()) {
      uint8_t b0 = uint8_t(text[i]), b1 = uint8_t(text[i + 1]),
              b2 = uint8_t(text[i + 2]);
      bool cjk_terminal = (b0 == 0xE3 && b1 == 0x80 && b2 == 0x82) ||
                          (b0 == 0xEF && b1 == 0xBC && (b2 == 0x81 || b2 == 0x9F));
      if (cjk_terminal) {
        current.append(text, i, 3);
        i += 3;
        flush();
        continue;
      }
    }
    if (c == '\n') {
      ++i;
      flush();
      continue;
    }
    current.push_back(c);
    ++i;
  }
  flush();
  return out;
}

std::vector<OpinionSentence> segment_and_filter(
    const std::vector<RoleResponse>& responses, const AnalysisConfig& cfg) {
  if (cfg.skip_words.empty()) {
    throw InvalidInput("segment_and_filter: skip word list is empty");
  }
  std::vector<OpinionSentence> out;
  for (const RoleResponse& resp : responses) {
    for (const std::string& sentence : split_sentences(resp.packaged_text)) {
      if (sentence.size() < cfg.min_sentence_len) continue;
      std::string low = lower(sentence);
      bool skip = false;
      for (const std::string& word : cfg.skip_words) {
        if (contains_ci(low, word)) {
          skip = true;
          break;
        }
      }
      if (skip) continue;
      out.push_back({sentence, resp.role_id, resp.domain});
    }
  }
  return out;
}

std::string extract_opinion(const std::string& sentence, const AnalysisConfig& cfg) {
  if (trim(sentence).empty()) throw InvalidInput("extract_opinion: empty sentence");
  std::string s = trim(sentence);

  // drop parentheticals
  std::string no_parens;
  int depth = 0;
  for (char c : s) {
    if (c == '(') {
      ++depth;
    } else if (c == ')') {
      if (depth > 0) --depth;
    } else if (depth == 0) {
      no_parens.push_back(c);
    }
  }
  s = no_parens;

  // strip leading hedges and discourse markers, repeatedly
  bool stripped = true;
  while (stripped) {
    stripped = false;
    std::string low = lower(s);
    for (const std::string& hedge : cfg.hedges) {
      std::string h = lower(hedge);
      if (low.rfind(h, 0) == 0) {
        size_t cut = h.size();
        while (cut < s.size() &&
               (s[cut] == ',' || s[cut] == ':' || s[cut] == ' ')) {
          ++cut;
        }
        if (cut < s.size()) {
          s = s.substr(cut);
          stripped = true;
        }
        break;
      }
    }
  }

  // collapse whitespace
  std::string collapsed;
  bool in_space = false;
  for (char c : s) {
    if (c == ' ' || c == '\t') {
      in_space = true;
    } else {
      if (in_space && !collapsed.empty()) collapsed.push_back(' ');
      in_space = false;
      collapsed.push_back(c);
    }
  }
  collapsed = trim(collapsed);
  return collapsed.empty() ? trim(sentence) : collapsed;
}

std::vector<std::string> tokenize(const std::string& text, bool cjk_bigrams) {
  std::vector<std::string> tokens;
  std::string word;
  std::vector<std::string> cjk_run;  // one UTF-8 char per element
  auto flush_word = [&]() {
    if (!word.empty()) tokens.push_back(word);
    word.clear();
  };
  auto flush_cjk = [&]() {
    if (cjk_run.empty()) return;
    if (!cjk_bigrams || cjk_run.size() == 1) {
      if (cjk_bigrams) {
        tokens.push_back(cjk_run[0]);
      } else {
        std::string joined;
        for (const auto& c : cjk_run) joined += c;
        tokens.push_back(joined);
      }
    } else {
      for (size_t i = 0; i + 1 < cjk_run.size(); ++i) {
        tokens.push_back(cjk_run[i] + cjk_run[i + 1]);
      }
    }
    cjk_run.clear();
  };
  size_t i = 0;
  while (i < text.size()) {
    uint8_t c = uint8_t(text[i]);
    if (c < 0x80) {
      flush_cjk();
      if (std::isalnum(c)) {
        word.push_back(char(std::tolower(c)));
      } else {
        flush_word();
      }
      ++i;
    } else {
      flush_word();
      size_t len = (c & 0xE0) == 0xC0 ? 2 : (c & 0xF0) == 0xE0 ? 3 : 4;
      len = std::min(len, text.size() - i);
      cjk_run.push_back(text.substr(i, len));
      i += len;
    }
  }
  flush_word();
  flush_cjk();
  return tokens;
}

TfIdfMatrix tfidf(const std::vector<std::string>& sentences,
                  const AnalysisConfig& cfg) {
  if (sentences.empty()) throw InvalidInput("tfidf: no sentences");
  std::vector<std::vector<std::string>> docs;
  docs.reserve(sentences.size());
  for (const std::string& s : sentences) docs.push_back(tokenize(s, cfg.cjk_bigrams));

  std::unordered_map<std::string, size_t> df;
  std::vector<std::string> vocab;
  std::unordered_map<std::string, size_t> vocab_pos;
  for (const auto& doc : docs) {
    std::unordered_map<std::string, bool> seen;
    for (const std::string& t : doc) {
      if (!seen[t]) {
        seen[t] = true;
        ++df[t];
        if (!vocab_pos.count(t)) {
          vocab_pos[t] = vocab.size();
          vocab.push_back(t);
        }
      }
    }
  }
  if (vocab.empty()) {
    throw StageFailure("analysis", "empty vocabulary after tokenization");
  }

  double n = double(sentences.size());
  std::vector<double> idf(vocab.size());
  for (size_t j = 0; j < vocab.size(); ++j) {
    idf[j] = std::log((1.0 + n) / (1.0 + double(df[vocab[j]]))) + 1.0;
  }

  TfIdfMatrix m;
  m.vocabulary = vocab;
  m.doc_count = sentences.size();
  m.rows.assign(docs.size(), std::vector<double>(vocab.size(), 0.0));
  for (size_t r = 0; r < docs.size(); ++r) {
    for (const std::string& t : docs[r]) {
      m.rows[r][vocab_pos[t]] += 1.0;
    }
    double norm_sq = 0.0;
    for (size_t j = 0; j < vocab.size(); ++j) {
      m.rows[r][j] *= idf[j];
      norm_sq += m.rows[r][j] * m.rows[r][j];
    }
    if (norm_sq > 0.0) {
      double inv = 1.0 / std::sqrt(norm_sq);
      for (double& v : m.rows[r]) v *= inv;
    }
  }
  return m;
}

size_t choose_k(const std::map<size_t, double>& inertia_curve) {
  if (inertia_curve.empty()) throw InvalidInput("choose_k: empty curve");
  if (inertia_curve.size() < 3) return inertia_curve.begin()->first;

  double k_lo = double(inertia_curve.begin()->first);
  double k_hi = double(inertia_curve.rbegin()->first);
  double w_min = std::numeric_limits<double>::infinity();
  double w_max = -std::numeric_limits<double>::infinity();
  for (const auto& [k, w] : inertia_curve) {
    w_min = std::min(w_min, w);
    w_max = std::max(w_max, w);
  }
  double w_span = w_max - w_min;
  if (w_span <= 0.0) return inertia_curve.begin()->first;  // flat curve

  // chord from first to last point in normalized coordinates
  auto norm = [&](size_t k, double w) -> std::array<double, 2> {
    return {(double(k) - k_lo) / (k_hi - k_lo), (w - w_min) / w_span};
  };
  auto p0 = norm(inertia_curve.begin()->first, inertia_curve.begin()->second);
  auto p1 = norm(inertia_curve.rbegin()->first, inertia_curve.rbegin()->second);
  double dx = p1[0] - p0[0], dy = p1[1] - p0[1];
  double chord_len = std::sqrt(dx * dx + dy * dy);

  size_t best_k = inertia_curve.begin()->first;
  double best_dist = -1.0;
  for (const auto& [k, w] : inertia_curve) {
    auto p = norm(k, w);
    double dist =
        std::abs(dy * p[0] - dx * p[1] + p1[0] * p0[1] - p1[1] * p0[0]) / chord_len;
    if (dist > best_dist + 1e-12) {
      best_dist = dist;
      best_k = k;
    }
  }
  return best_k;
}

namespace {

struct LloydResult {
  std::vector<size_t> assignments;
  std::vector<std::vector<double>> centers;
  double inertia = 0.0;
};

LloydResult lloyd(const std::vector<std::vector<double>>& rows,
                  std::vector<std::vector<double>> centers, int max_iter,
                  double tol) {
  size_t n = rows.size(), k = centers.size(), dims = rows[0].size();
  std::vector<size_t> assign(n, 0);
  double prev_inertia = std::numeric_limits<double>::infinity();
  for (int iter = 0; iter < max_iter; ++iter) {
    double inertia = 0.0;
    for (size_t i = 0; i < n; ++i) {
      double best = std::numeric_limits<double>::infinity();
      size_t best_c = 0;
      for (size_t c = 0; c < k; ++c) {
        double d = sq_dist(rows[i], centers[c]);
        if (d < best) {
          best = d;
          best_c = c;
        }
      }
      assign[i] = best_c;
      inertia += best;
    }
    if (inertia > prev_inertia + 1e-9 * std::max(1.0, prev_inertia)) {
      throw std::logic_error("kmeans: inertia increased across Lloyd iterations");
    }

    std::vector<std::vector<double>> next(k, std::vector<double>(dims, 0.0));
    std::vector<size_t> counts(k, 0);
    for (size_t i = 0; i < n; ++i) {
      ++counts[assign[i]];
      for (size_t j = 0; j < dims; ++j) next[assign[i]][j] += rows[i][j];
    }
    for (size_t c = 0; c < k; ++c) {
      if (counts[c] == 0) {
        // reseed from the point farthest from its center
        size_t far = 0;
        double far_d = -1.0;
        for (size_t i = 0; i < n; ++i) {
          double d = sq_dist(rows[i], centers[assign[i]]);
          if (d > far_d) {
            far_d = d;
            far = i;
          }
        }
        next[c] = rows[far];
      } else {
        for (size_t j = 0; j < dims; ++j) next[c][j] /= double(counts[c]);
      }
    }
    bool converged = prev_inertia != std::numeric_limits<double>::infinity() &&
                     std::abs(prev_inertia - inertia) <=
                         tol * std::max(1.0, prev_inertia);
    prev_inertia = inertia;
    centers = std::move(next);
    if (converged) break;
  }
  // final assignment against the settled centers
  double inertia = 0.0;
  for (size_t i = 0; i < n; ++i) {
    double best = std::numeric_limits<double>::infinity();
    size_t best_c = 0;
    for (size_t c = 0; c < k; ++c) {
      double d = sq_dist(rows[i], centers[c]);
      if (d < best) {
        best = d;
        best_c = c;
      }
    }
    assign[i] = best_c;
    inertia += best;
  }
  return {std::move(assign), std::move(centers), inertia};
}

std::vector<std::vector<double>> kmeans_pp_init(
    const std::vector<std::vector<double>>& rows, size_t k, std::mt19937_64& rng) {
  size_t n = rows.size();
  std::vector<std::vector<double>> centers;
  std::uniform_int_distribution<size_t> first(0, n - 1);
  centers.push_back(rows[first(rng)]);
  std::vector<double> d2(n);
  while (centers.size() < k) {
    double total = 0.0;
    for (size_t i = 0; i < n; ++i) {
      double best = std::numeric_limits<double>::infinity();
      for (const auto& c : centers) best = std::min(best, sq_dist(rows[i], c));
      d2[i] = best;
      total += best;
    }
    size_t pick;
    if (total <= 0.0) {
      pick = first(rng);
    } else {
      std::uniform_real_distribution<double> u(0.0, total);
      double target = u(rng), run = 0.0;
      pick = n - 1;
      for (size_t i = 0; i < n; ++i) {
        run += d2[i];
        if (run >= target) {
          pick = i;
          break;
        }
      }
    }
    centers.push_back(rows[pick]);
  }
  return centers;
}

}  // namespace

ClusteringResult kmeans(const TfIdfMatrix& matrix, size_t k,
                        unsigned long long seed, int restarts, int max_iter,
                        double tol) {
  if (k == 0 || k > matrix.rows.size()) {
    throw InvalidInput("kmeans: k must be in [1, row count]");
  }
  LloydResult best;
  best.inertia = std::numeric_limits<double>::infinity();
  for (int r = 0; r < restarts; ++r) {
    std::mt19937_64 rng(seed * 1000003ull + uint64_t(r));
    auto init = kmeans_pp_init(matrix.rows, k, rng);
    LloydResult res = lloyd(matrix.rows, std::move(init), max_iter, tol);
    if (res.inertia < best.inertia) best = std::move(res);
  }
  ClusteringResult out;
  out.k = k;
  out.assignments = std::move(best.assignments);
  out.centers = std::move(best.centers);
  out.inertia = best.inertia;
  return out;
}

ClusteringResult cluster_opinions(const TfIdfMatrix& matrix,
                                  const AnalysisConfig& cfg) {
  size_t n = matrix.rows.size();
  if (n < 2) throw InvalidInput("cluster_opinions: need at least 2 sentences");
  size_t k_lo = cfg.k_min;
  size_t k_hi = std::min(cfg.k_max, n - 1);
  if (k_hi < k_lo) k_hi = k_lo;

  std::map<size_t, double> curve;
  std::map<size_t, ClusteringResult> by_k;
  const ClusteringResult* prev = nullptr;
  for (size_t k = k_lo; k <= k_hi && k <= n; ++k) {
    ClusteringResult res =
        kmeans(matrix, k, cfg.seed, cfg.restarts, cfg.max_iter, cfg.tol);
    // warm restart from the previous k keeps the curve non-increasing
    if (prev && prev->inertia < res.inertia) {
      auto warm = prev->centers;
      size_t far = 0;
      double far_d = -1.0;
      for (size_t i = 0; i < n; ++i) {
        double d = sq_dist(matrix.rows[i], prev->centers[prev->assignments[i]]);
        if (d > far_d) {
          far_d = d;
          far = i;
        }
      }
      warm.push_back(matrix.rows[far]);
      LloydResult warm_res = lloyd(matrix.rows, std::move(warm), cfg.max_iter, cfg.tol);
      if (warm_res.inertia < res.inertia) {
        res.assignments = std::move(warm_res.assignments);
        res.centers = std::move(warm_res.centers);
        res.inertia = warm_res.inertia;
      }
    }
    curve[k] = res.inertia;
    by_k[k] = std::move(res);
    prev = &by_k[k];
  }

  size_t chosen = choose_k(curve);
  ClusteringResult out = std::move(by_k[chosen]);
  out.inertia_curve = curve;

  for (size_t c = 0; c < out.k; ++c) {
    std::vector<std::pair<std::string, double>> terms;
    for (size_t j = 0; j < matrix.vocabulary.size(); ++j) {
      if (out.centers[c][j] > 0.0) {
        terms.emplace_back(matrix.vocabulary[j], out.centers[c][j]);
      }
    }
    std::sort(terms.begin(), terms.end(), [](const auto& a, const auto& b) {
      if (a.second != b.second) return a.second > b.second;
      return a.first < b.first;
    });
    if (terms.size() > cfg.top_terms_per_cluster) {
      terms.resize(cfg.top_terms_per_cluster);
    }
    out.top_terms[c] = std::move(terms);
  }
  return out;
}

std::vector<std::array<double, 2>> mds_project(
    const std::vector<std::vector<double>>& rows) {
  size_t n = rows.size();
  std::vector<std::array<double, 2>> coords(n, {0.0, 0.0});
  if (n < 2) return coords;

  // classical MDS: double-center the squared-distance Gram matrix, take the
  // top two eigenvectors by deterministic power iteration with deflation
  std::vector<std::vector<double>> b(n, std::vector<double>(n, 0.0));
  for (size_t i = 0; i < n; ++i) {
    for (size_t j = i; j < n; ++j) {
      double d = sq_dist(rows[i], rows[j]);
      b[i][j] = d;
      b[j][i] = d;
    }
  }
  std::vector<double> row_mean(n, 0.0);
  double grand = 0.0;
  for (size_t i = 0; i < n; ++i) {
    for (size_t j = 0; j < n; ++j) row_mean[i] += b[i][j];
    row_mean[i] /= double(n);
    grand += row_mean[i];
  }
  grand /= double(n);
  for (size_t i = 0; i < n; ++i) {
    for (size_t j = 0; j < n; ++j) {
      b[i][j] = -0.5 * (b[i][j] - row_mean[i] - row_mean[j] + grand);
    }
  }

  auto power_iter = [&](int axis) {
    std::vector<double> v(n);
    for (size_t i = 0; i < n; ++i) {
      v[i] = std::cos(double(i + 1) * (axis + 1) * 0.7);  // fixed start
    }
    double eigen = 0.0;
    for (int it = 0; it < 200; ++it) {
      std::vector<double> next(n, 0.0);
      for (size_t i = 0; i < n; ++i) {
        for (size_t j = 0; j < n; ++j) next[i] += b[i][j] * v[j];
      }
      double norm = 0.0;
      for (double x : next) norm += x * x;
      norm = std::sqrt(norm);
      if (norm < 1e-15) break;
      for (size_t i = 0; i < n; ++i) next[i] /= norm;
      eigen = norm;
      v = std::move(next);
    }
    for (size_t i = 0; i < n; ++i) {
      coords[i][size_t(axis)] = v[i] * std::sqrt(std::max(eigen, 0.0));
    }
    // deflate
    for (size_t i = 0; i < n; ++i) {
      for (size_t j = 0; j < n; ++j) b[i][j] -= eigen * v[i] * v[j];
    }
  };
  power_iter(0);
  power_iter(1);
  return coords;
}

}  // namespace mavens
