#include "mavens/embedding.hpp"

#include <cmath>
#include <cstdint>

#include <nlohmann/json.hpp>

#include "mavens/errors.hpp"

#include <httplib.h>

namespace mavens {
namespace {

using json = nlohmann::json;

std::string trim(const std::string& s) {
  size_t a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  size_t b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

uint64_t fnv1a64(const char* data, size_t len) {
  uint64_t h = 14695981039346656037ull;
  for (size_t i = 0; i < len; ++i) {
    h ^= uint8_t(data[i]);
    h *= 1099511628211ull;
  }
  return h;
}

// Hashed character n-gram bag, n in {2,3}, signed feature hashing.
// Text is framed with '^'/'$' so even a one-character input yields n-grams.
EmbeddingVector embed_local(const std::string& text, size_t dims) {
  std::string framed = "^" + text + "$";
  std::vector<double> acc(dims, 0.0);
  for (size_t n = 2; n <= 3; ++n) {
    if (framed.size() < n) continue;
    for (size_t i = 0; i + n <= framed.size(); ++i) {
      uint64_t h = fnv1a64(framed.data() + i, n);
      size_t bucket = size_t(h % dims);
      double sign = ((h >> 32) & 1u) ? 1.0 : -1.0;
      acc[bucket] += sign;
    }
  }
  double norm_sq = 0.0;
  for (double v : acc) norm_sq += v * v;
  EmbeddingVector out(dims, 0.0f);
  if (norm_sq > 0.0) {
    double inv = 1.0 / std::sqrt(norm_sq);
    for (size_t i = 0; i < dims; ++i) out[i] = float(acc[i] * inv);
  } else {
    // All signs cancelled; fall back to a single deterministic spike.
    uint64_t h = fnv1a64(framed.data(), framed.size());
    out[size_t(h % dims)] = 1.0f;
  }
  return out;
}

std::pair<std::string, std::string> split_endpoint(const std::string& endpoint) {
  // "http://host:port/base" -> ("http://host:port", "/base")
  size_t scheme = endpoint.find("://");
  size_t path = scheme == std::string::npos ? endpoint.find('/')
                                            : endpoint.find('/', scheme + 3);
  if (path == std::string::npos) return {endpoint, ""};
  return {endpoint.substr(0, path), endpoint.substr(path)};
}

std::vector<EmbeddingVector> embed_remote(const std::vector<std::string>& texts,
                                          const EmbedderSpec& spec) {
  auto [host, base] = split_endpoint(*spec.endpoint);
  httplib::Client client(host);
  client.set_read_timeout(60, 0);
  json body = {{"input", texts}, {"model", spec.model_name}};
  auto res = client.Post(base + "/v1/embeddings", body.dump(), "application/json");
  if (!res || res->status != 200) {
    throw BackendUnavailable("embedding endpoint unreachable: " + *spec.endpoint);
  }
  json reply = json::parse(res->body);
  std::vector<EmbeddingVector> out;
  for (const auto& item : reply.at("data")) {
    EmbeddingVector v = item.at("embedding").get<EmbeddingVector>();
    if (v.size() != spec.dims) {
      throw FormatError("remote embedding has wrong dims");
    }
    out.push_back(std::move(v));
  }
  if (out.size() != texts.size()) {
    throw FormatError("remote embedding count mismatch");
  }
  return out;
}

}  // namespace

void EmbedderSpec::validate() const {
  if (dims < 1) throw InvalidInput("embedder dims must be >= 1");
  if (kind == EmbedderKind::RemoteService && !endpoint) {
    throw InvalidInput("remote-service embedder requires an endpoint");
  }
}

EmbeddingVector embed(const std::string& text, const EmbedderSpec& spec) {
  spec.validate();
  std::string t = trim(text);
  if (t.empty()) throw InvalidInput("embed: text is empty");
  if (spec.kind == EmbedderKind::DeterministicLocal) {
    return embed_local(t, spec.dims);
  }
  return embed_remote({t}, spec).front();
}

std::vector<EmbeddingVector> embed_batch(const std::vector<std::string>& texts,
                                         const EmbedderSpec& spec) {
  spec.validate();
  if (spec.kind == EmbedderKind::DeterministicLocal) {
    std::vector<EmbeddingVector> out;
    out.reserve(texts.size());
    for (const auto& t : texts) out.push_back(embed(t, spec));
    return out;
  }
  std::vector<std::string> trimmed;
  for (const auto& t : texts) {
    std::string s = trim(t);
    if (s.empty()) throw InvalidInput("embed_batch: text is empty");
    trimmed.push_back(std::move(s));
  }
  return embed_remote(trimmed, spec);
}

double l2_sq(const EmbeddingVector& a, const EmbeddingVector& b) {
  if (a.size() != b.size()) {
    throw InvalidInput("l2_sq: vector length mismatch");
  }
  double sum = 0.0;
  for (size_t i = 0; i < a.size(); ++i) {
    double d = double(a[i]) - double(b[i]);
    sum += d * d;
  }
  return sum;
}

}  // namespace mavens
