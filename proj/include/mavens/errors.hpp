#ifndef MAVENS_ERRORS_HPP
#define MAVENS_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace mavens {

// Precondition violations and malformed caller input.
struct InvalidInput : std::invalid_argument {
  explicit InvalidInput(const std::string& what) : std::invalid_argument(what) {}
};

// Remote backend could not be reached after retries.
struct BackendUnavailable : std::runtime_error {
  explicit BackendUnavailable(const std::string& what) : std::runtime_error(what) {}
};

// Mock backend had no fixture matching the request.
struct FixtureMiss : std::runtime_error {
  explicit FixtureMiss(const std::string& key)
      : std::runtime_error("no fixture matches request: " + key), unmatched_key(key) {}
  std::string unmatched_key;
};

// Persisted file failed validation (bad magic, dims mismatch, truncated).
struct FormatError : std::runtime_error {
  explicit FormatError(const std::string& what) : std::runtime_error(what) {}
};

// A pipeline stage produced nothing usable.
struct StageFailure : std::runtime_error {
  StageFailure(const std::string& stage, const std::string& what)
      : std::runtime_error(stage + ": " + what), stage(stage) {}
  std::string stage;
};

}  // namespace mavens

#endif
