#pragma once

#include <stdexcept>
#include <string>

namespace bexplore {

// Raised on malformed documents, bad labels, violated preconditions.
// `path` identifies the offending field (e.g. "state_prior" or "utility[1][0][2]").
class ValidationError : public std::runtime_error {
 public:
  ValidationError(std::string path, const std::string& message)
      : std::runtime_error(path.empty() ? message : path + ": " + message),
        path_(std::move(path)) {}

  const std::string& path() const { return path_; }

 private:
  std::string path_;
};

}  // namespace bexplore
