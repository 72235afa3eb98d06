#include "mavens/llm_gateway.hpp"

#include <cctype>
#include <chrono>
#include <functional>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <thread>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "mavens/digest.hpp"
#include "mavens/errors.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace mavens {
namespace {

// Scan "{name}" markers; name is [A-Za-z_][A-Za-z0-9_]*.
void for_each_placeholder(const std::string& text,
                          const std::function<void(size_t, size_t, const std::string&)>& fn) {
  size_t i = 0;
  while (i < text.size()) {
    if (text[i] == '{' && i + 1 < text.size() &&
        (std::isalpha(uint8_t(text[i + 1])) || text[i + 1] == '_')) {
      size_t j = i + 1;
      while (j < text.size() &&
             (std::isalnum(uint8_t(text[j])) || text[j] == '_')) {
        ++j;
      }
      if (j < text.size() && text[j] == '}') {
        fn(i, j + 1, text.substr(i + 1, j - i - 1));
        i = j + 1;
        continue;
      }
    }
    ++i;
  }
}

std::string substitute(const std::string& text,
                       const std::map<std::string, std::string>& bindings) {
  std::string out;
  out.reserve(text.size());
  size_t last = 0;
  for_each_placeholder(text, [&](size_t begin, size_t end, const std::string& name) {
    auto it = bindings.find(name);
    if (it == bindings.end()) {
      throw InvalidInput("render: missing binding for placeholder \"" + name + "\"");
    }
    out.append(text, last, begin - last);
    out.append(it->second);
    last = end;
  });
  out.append(text, last, text.size() - last);
  return out;
}

std::string replace_all(std::string s, const std::string& from, const std::string& to) {
  size_t pos = 0;
  while ((pos = s.find(from, pos)) != std::string::npos) {
    s.replace(pos, from.size(), to);
    pos += to.size();
  }
  return s;
}

std::pair<std::string, std::string> split_endpoint(const std::string& endpoint) {
  size_t scheme = endpoint.find("://");
  size_t path = scheme == std::string::npos ? endpoint.find('/')
                                            : endpoint.find('/', scheme + 3);
  if (path == std::string::npos) return {endpoint, ""};
  return {endpoint.substr(0, path), endpoint.substr(path)};
}

}  // namespace

std::set<std::string> PromptTemplate::placeholder_names() const {
  std::set<std::string> names;
  for (const std::string* part : {&system, &user}) {
    for_each_placeholder(*part, [&](size_t, size_t, const std::string& name) {
      names.insert(name);
    });
  }
  return names;
}

std::pair<std::string, std::string> PromptTemplate::render(
    const std::map<std::string, std::string>& bindings) const {
  return {substitute(system, bindings), substitute(user, bindings)};
}

void BackendSpec::validate() const {
  if (kind == BackendKind::Remote && !endpoint) {
    throw InvalidInput("remote backend requires an endpoint");
  }
  if (parallelism < 1) throw InvalidInput("parallelism must be >= 1");
}

LlmGateway::LlmGateway(BackendSpec spec) : spec_(std::move(spec)) {
  spec_.validate();
  if (spec_.fixture_path) {
    std::ifstream in(*spec_.fixture_path);
    if (!in) throw FormatError("cannot open fixture table: " + *spec_.fixture_path);
    json table = json::parse(in);
    for (auto& [key, value] : table.items()) {
      fixtures_[key] = value.get<std::string>();
    }
  }
  if (spec_.cache_dir) fs::create_directories(*spec_.cache_dir);
}

void LlmGateway::set_fixtures(std::map<std::string, std::string> fixtures) {
  fixtures_ = std::move(fixtures);
}

std::string LlmGateway::cache_key(const std::string& model, const ChatRequest& req) {
  std::ostringstream key;
  key << model << '\x1f' << req.system << '\x1f' << req.user << '\x1f'
      << req.temperature << '\x1f' << req.top_p << '\x1f' << req.max_length
      << '\x1f' << (req.seed ? std::to_string(*req.seed) : "none");
  return sha256_hex(key.str());
}

std::string LlmGateway::complete_mock(const ChatRequest& req) const {
  // Longest fixture key that prefixes the user text, falling back to the
  // system text. An empty key matches everything.
  const std::string* best = nullptr;
  size_t best_len = 0;
  bool have = false;
  for (const auto& [key, value] : fixtures_) {
    bool matches = req.user.rfind(key, 0) == 0 || req.system.rfind(key, 0) == 0;
    if (matches && (!have || key.size() > best_len)) {
      best = &value;
      best_len = key.size();
      have = true;
    }
  }
  if (!have) {
    throw FixtureMiss(req.user.substr(0, 80));
  }
  std::string out = *best;
  if (out.find("{{hash}}") != std::string::npos) {
    std::string h = sha256_hex(req.system + "\x1f" + req.user).substr(0, 8);
    out = replace_all(out, "{{hash}}", h);
  }
  out = replace_all(out, "{{user}}", req.user);
  return out;
}

std::string LlmGateway::complete_remote(const ChatRequest& req) const {
  auto [host, base] = split_endpoint(*spec_.endpoint);
  json body = {
      {"model", spec_.model_name},
      {"messages",
       {{{"role", "system"}, {"content", req.system}},
        {{"role", "user"}, {"content", req.user}}}},
      {"temperature", req.temperature},
      {"top_p", req.top_p},
      {"max_tokens", req.max_length},
  };
  std::string payload = body.dump();
  std::string last_error;
  int backoff_ms = spec_.backoff_initial_ms;
  for (int attempt = 1; attempt <= spec_.max_attempts; ++attempt) {
    if (attempt > 1) {
      std::this_thread::sleep_for(std::chrono::milliseconds(backoff_ms));
      backoff_ms *= 2;
    }
    httplib::Client client(host);
    client.set_read_timeout(120, 0);
    auto res = client.Post(base + "/v1/chat/completions", payload, "application/json");
    if (!res) {
      last_error = "connection failed";
      continue;
    }
    if (res->status != 200) {
      last_error = "status " + std::to_string(res->status);
      continue;
    }
    try {
      json reply = json::parse(res->body);
      std::string text =
          reply.at("choices").at(0).at("message").at("content").get<std::string>();
      if (text.empty()) {
        last_error = "empty completion";
        continue;
      }
      return text;
    } catch (const json::exception& e) {
      last_error = std::string("malformed reply: ") + e.what();
    }
  }
  throw BackendUnavailable("chat endpoint failed after " +
                           std::to_string(spec_.max_attempts) +
                           " attempts: " + last_error);
}

std::string LlmGateway::complete(const ChatRequest& req) {
  std::optional<fs::path> cache_file;
  if (spec_.cache_dir) {
    cache_file = fs::path(*spec_.cache_dir) / cache_key(spec_.model_name, req);
    if (fs::exists(*cache_file)) {
      std::ifstream in(*cache_file, std::ios::binary);
      std::ostringstream buf;
      buf << in.rdbuf();
      ++stats_.cache_hits;
      return buf.str();
    }
    ++stats_.cache_misses;
  }
  ++stats_.backend_calls;
  std::string text = spec_.kind == BackendKind::Mock ? complete_mock(req)
                                                     : complete_remote(req);
  if (cache_file) {
    // write-then-rename so readers never observe a partial entry
    fs::path tmp = *cache_file;
    tmp += ".tmp";
    {
      std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
      out << text;
    }
    fs::rename(tmp, *cache_file);
  }
  return text;
}

}  // namespace mavens
