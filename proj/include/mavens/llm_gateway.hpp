#ifndef MAVENS_LLM_GATEWAY_HPP
#define MAVENS_LLM_GATEWAY_HPP

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace mavens {

/// Two-part chat prompt with {name} placeholders.
struct PromptTemplate {
  std::string system;
  std::string user;

  /// Placeholder names appearing in system or user.
  std::set<std::string> placeholder_names() const;

  /// Substitute every placeholder verbatim. Missing binding -> InvalidInput
  /// naming the placeholder.
  std::pair<std::string, std::string> render(
      const std::map<std::string, std::string>& bindings) const;
};

struct ChatRequest {
  std::string system;
  std::string user;
  double temperature = 0.7;
  double top_p = 0.8;
  int max_length = 8192;
  std::optional<long long> seed;
};

enum class BackendKind { Remote, Mock };

struct BackendSpec {
  BackendKind kind = BackendKind::Mock;
  std::optional<std::string> endpoint;  // required for Remote
  std::string model_name = "mock";
  std::optional<std::string> cache_dir;
  int parallelism = 4;
  int max_attempts = 3;
  int backoff_initial_ms = 1000;  // doubles per retry
  std::optional<std::string> fixture_path;  // mock fixture table (JSON object)

  void validate() const;
};

struct GatewayStats {
  long long cache_hits = 0;
  long long cache_misses = 0;
  long long backend_calls = 0;
};

/// Chat-completion front end over a remote OpenAI-compatible endpoint or a
/// deterministic fixture-table mock, with an on-disk response cache.
class LlmGateway {
 public:
  explicit LlmGateway(BackendSpec spec);

  /// Replace the mock fixture table in memory (longest-prefix keys).
  /// Values may contain {{user}} and {{hash}} expansion markers.
  void set_fixtures(std::map<std::string, std::string> fixtures);

  std::string complete(const ChatRequest& req);

  const GatewayStats& stats() const { return stats_; }
  const BackendSpec& spec() const { return spec_; }

  /// Cache key for a request: digest over every request component.
  static std::string cache_key(const std::string& model, const ChatRequest& req);

 private:
  std::string complete_mock(const ChatRequest& req) const;
  std::string complete_remote(const ChatRequest& req) const;

  BackendSpec spec_;
  std::map<std::string, std::string> fixtures_;
  GatewayStats stats_;
};

}  // namespace mavens

#endif
